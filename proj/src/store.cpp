#include "oted/store.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "oted/error.hpp"

namespace oted {

NullMask::NullMask(std::vector<std::uint8_t> bytes, std::size_t size)
    : bytes_(std::move(bytes)), size_(size) {
    if (bytes_.size() != (size + 7) / 8) {
        throw FormatError("bad_null_mask", "null bitset length does not match row count");
    }
}

void NullMask::push_back(bool null) {
    if ((size_ & 7) == 0) bytes_.push_back(0);
    ++size_;
    if (null) set_null(size_ - 1);
}

std::size_t NullMask::null_count() const {
    std::size_t n = 0;
    for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
}

Column Column::integers(NullMask nulls, std::vector<std::int64_t> values) {
    if (values.size() != nulls.size()) {
        throw FormatError("bad_column", "integer payload length does not match row count");
    }
    Column c(DataType::Integer, std::move(nulls));
    c.ints_ = std::move(values);
    return c;
}

Column Column::factors(NullMask nulls, std::vector<std::string> dictionary,
                       std::vector<std::uint32_t> codes) {
    if (codes.size() != nulls.size()) {
        throw FormatError("bad_column", "factor index count does not match row count");
    }
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!nulls.is_null(i) && codes[i] >= dictionary.size()) {
            throw FormatError("bad_column", "factor index out of dictionary range at row " +
                                                std::to_string(i));
        }
    }
    Column c(DataType::Factor, std::move(nulls));
    c.dictionary_ = std::move(dictionary);
    c.codes_ = std::move(codes);
    return c;
}

Column Column::strings(NullMask nulls, std::vector<std::uint64_t> offsets, std::string blob) {
    if (offsets.size() != nulls.size() + 1) {
        throw FormatError("bad_column", "string offset count does not match row count");
    }
    if (offsets.front() != 0 || offsets.back() != blob.size() ||
        !std::is_sorted(offsets.begin(), offsets.end())) {
        throw FormatError("bad_column", "string offsets are not a nondecreasing cover of the blob");
    }
    Column c(DataType::String, std::move(nulls));
    c.offsets_ = std::move(offsets);
    c.blob_ = std::move(blob);
    return c;
}

std::string_view Column::text_at(std::size_t row) const {
    if (type_ == DataType::Factor) return dictionary_[codes_[row]];
    return std::string_view(blob_).substr(offsets_[row], offsets_[row + 1] - offsets_[row]);
}

Cell Column::cell(std::size_t row) const {
    if (is_null(row)) return std::nullopt;
    if (type_ == DataType::Integer) return Value(ints_[row]);
    return Value(std::string(text_at(row)));
}

ColumnBuilder::ColumnBuilder(DataType type) : type_(type) {}

void ColumnBuilder::append_null() {
    nulls_.push_back(true);
    switch (type_) {
        case DataType::Integer: ints_.push_back(0); break;
        case DataType::Factor: codes_.push_back(0); break;
        case DataType::String: offsets_.push_back(blob_.size()); break;
    }
}

void ColumnBuilder::append(std::int64_t value) {
    if (type_ != DataType::Integer) {
        throw ValidationError("type_mismatch", "integer value for a " +
                                                   std::string(to_string(type_)) + " column");
    }
    nulls_.push_back(false);
    ints_.push_back(value);
}

void ColumnBuilder::append(std::string_view value) {
    switch (type_) {
        case DataType::Integer:
            throw ValidationError("type_mismatch", "text value for an Integer column");
        case DataType::Factor: {
            auto [it, inserted] = dict_index_.try_emplace(
                std::string(value), static_cast<std::uint32_t>(dictionary_.size()));
            if (inserted) dictionary_.emplace_back(value);
            codes_.push_back(it->second);
            break;
        }
        case DataType::String:
            blob_.append(value);
            offsets_.push_back(blob_.size());
            break;
    }
    nulls_.push_back(false);
}

void ColumnBuilder::append(const Cell& cell) {
    if (!cell) return append_null();
    std::visit([this](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::int64_t>) {
            append(v);
        } else {
            append(std::string_view(v));
        }
    }, *cell);
}

Column ColumnBuilder::finish() && {
    switch (type_) {
        case DataType::Integer: return Column::integers(std::move(nulls_), std::move(ints_));
        case DataType::String:
            return Column::strings(std::move(nulls_), std::move(offsets_), std::move(blob_));
        case DataType::Factor: {
            // Sort the dictionary so output does not depend on first-seen order.
            std::vector<std::uint32_t> order(dictionary_.size());
            std::iota(order.begin(), order.end(), 0u);
            std::sort(order.begin(), order.end(),
                      [&](auto a, auto b) { return dictionary_[a] < dictionary_[b]; });
            std::vector<std::uint32_t> remap(order.size());
            std::vector<std::string> sorted;
            sorted.reserve(order.size());
            for (std::uint32_t i = 0; i < order.size(); ++i) {
                remap[order[i]] = i;
                sorted.push_back(std::move(dictionary_[order[i]]));
            }
            for (std::size_t r = 0; r < codes_.size(); ++r) {
                codes_[r] = nulls_.is_null(r) ? 0 : remap[codes_[r]];
            }
            return Column::factors(std::move(nulls_), std::move(sorted), std::move(codes_));
        }
    }
    throw Error("internal", "bad column type");
}

ColumnStore::ColumnStore(const Schema& schema, std::vector<Column> columns)
    : schema_(&schema), columns_(std::move(columns)) {
    if (columns_.size() != schema.size()) {
        throw FormatError("bad_column_count", "store has " + std::to_string(columns_.size()) +
                                                  " columns, schema has " +
                                                  std::to_string(schema.size()));
    }
    row_count_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const auto& f = schema.at(i);
        if (columns_[i].type() != f.data_type) {
            throw FormatError("type_mismatch", "column " + f.source_name + " has type " +
                                                   std::string(to_string(columns_[i].type())) +
                                                   ", schema says " +
                                                   std::string(to_string(f.data_type)));
        }
        if (columns_[i].size() != row_count_) {
            throw FormatError("bad_column", "column " + f.source_name + " has " +
                                                std::to_string(columns_[i].size()) +
                                                " rows, expected " + std::to_string(row_count_));
        }
    }
}

ColumnStore ColumnStore::empty(const Schema& schema) { return StoreBuilder(schema).finish(); }

const Column& ColumnStore::column(std::string_view name) const {
    auto idx = schema_->index_of(name);
    if (!idx) throw ValidationError("unknown_field", "unknown field " + std::string(name));
    return columns_[*idx];
}

bool operator==(const ColumnStore& a, const ColumnStore& b) {
    if (a.row_count_ != b.row_count_ || a.columns_.size() != b.columns_.size()) return false;
    for (std::size_t c = 0; c < a.columns_.size(); ++c) {
        const auto& ca = a.columns_[c];
        const auto& cb = b.columns_[c];
        if (ca.type() != cb.type()) return false;
        for (std::size_t r = 0; r < a.row_count_; ++r) {
            if (ca.cell(r) != cb.cell(r)) return false;
        }
    }
    return true;
}

StoreBuilder::StoreBuilder(const Schema& schema) : schema_(&schema) {
    builders_.reserve(schema.size());
    for (const auto& f : schema.fields()) builders_.emplace_back(f.data_type);
}

void StoreBuilder::append_row(std::span<const Cell> row) {
    if (row.size() != builders_.size()) {
        throw ValidationError("bad_row", "row has " + std::to_string(row.size()) +
                                             " cells, schema has " +
                                             std::to_string(builders_.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) builders_[i].append(row[i]);
}

std::size_t StoreBuilder::row_count() const {
    return builders_.empty() ? 0 : builders_.front().size();
}

ColumnStore StoreBuilder::finish() && {
    std::vector<Column> columns;
    columns.reserve(builders_.size());
    for (auto& b : builders_) columns.push_back(std::move(b).finish());
    return ColumnStore(*schema_, std::move(columns));
}

std::vector<std::string> column_distinct_values(const ColumnStore& store, std::string_view field) {
    const auto& col = store.column(field);
    if (col.type() != DataType::Factor) {
        throw ValidationError("not_factor", "field " + std::string(field) + " is not a Factor");
    }
    auto dict = col.dictionary();
    std::vector<std::string> out(dict.begin(), dict.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oted
