#include "oted/query.hpp"

#include <algorithm>

#include "oted/csv.hpp"
#include "oted/error.hpp"

namespace oted {

SortSpec parse_sort_spec(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) return {std::string(text), SortDirection::Ascending};
    auto dir = text.substr(colon + 1);
    SortSpec spec{std::string(text.substr(0, colon)), SortDirection::Ascending};
    if (dir == "desc") {
        spec.direction = SortDirection::Descending;
    } else if (dir != "asc") {
        throw ValidationError("bad_sort", "sort direction must be asc or desc, got " + std::string(dir));
    }
    return spec;
}

void sort_rows(const ColumnStore& store, RowIds& rows, const SortSpec& sort) {
    auto idx = store.schema().index_of(sort.field);
    if (!idx) throw ValidationError("unknown_sort_field", "unknown sort field " + sort.field);
    const auto& col = store.column(*idx);
    bool desc = sort.direction == SortDirection::Descending;

    // Nulls to the back first, then order the non-null prefix.
    auto split = std::stable_partition(rows.begin(), rows.end(),
                                       [&](std::uint32_t r) { return !col.is_null(r); });
    std::sort(rows.begin(), split);
    std::sort(split, rows.end());
    auto by_key = [&](auto less) {
        std::stable_sort(rows.begin(), split, [&](std::uint32_t a, std::uint32_t b) {
            return desc ? less(b, a) : less(a, b);
        });
    };
    if (col.type() == DataType::Integer) {
        by_key([&](auto a, auto b) { return col.integer_at(a) < col.integer_at(b); });
    } else {
        by_key([&](auto a, auto b) { return col.text_at(a) < col.text_at(b); });
    }
}

ResultPage select_page(const ColumnStore& store, RowIds rows, const std::optional<SortSpec>& sort,
                       std::size_t offset, std::size_t limit, std::string_view link_template) {
    if (limit == 0) throw ValidationError("bad_limit", "limit must be ≥ 1");
    if (sort) sort_rows(store, rows, *sort);

    ResultPage page;
    page.total_matches = rows.size();
    page.offset = offset;
    if (offset >= rows.size()) return page;

    const auto& schema = store.schema();
    auto id_col = schema.index_of(field::kNoticeId);
    auto end = std::min(rows.size(), offset + std::min(limit, rows.size() - offset));
    for (std::size_t i = offset; i < end; ++i) {
        ResultRow row;
        row.reserve(schema.size());
        for (std::size_t c = 0; c < schema.size(); ++c) {
            Cell cell = store.cell(rows[i], c);
            if (id_col && c == *id_col && cell) {
                cell = Value(*make_notice_link(std::get<std::string>(*cell), link_template));
            }
            row.emplace_back(schema.at(c).display_name, std::move(cell));
        }
        page.rows.push_back(std::move(row));
    }
    return page;
}

std::string export_csv(const ColumnStore& store, std::span<const std::uint32_t> rows) {
    const auto& schema = store.schema();
    std::string out;
    std::vector<std::string_view> fields;
    fields.reserve(schema.size());
    for (const auto& f : schema.fields()) fields.push_back(f.display_name);
    csv::append_record(out, fields);

    std::vector<std::string> owned(schema.size());
    for (auto r : rows) {
        fields.clear();
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const auto& col = store.column(c);
            if (col.is_null(r)) {
                fields.emplace_back();
            } else if (col.type() == DataType::Integer) {
                owned[c] = std::to_string(col.integer_at(r));
                fields.push_back(owned[c]);
            } else {
                fields.push_back(col.text_at(r));
            }
        }
        csv::append_record(out, fields);
    }
    return out;
}

}  // namespace oted
