#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oted/filter.hpp"
#include "oted/ingest.hpp"
#include "oted/store.hpp"

namespace oted {

enum class SortDirection { Ascending, Descending };

struct SortSpec {
    std::string field;
    SortDirection direction = SortDirection::Ascending;
};

/// "FIELD:asc" or "FIELD:desc"; a bare field name sorts ascending.
SortSpec parse_sort_spec(std::string_view text);

/// One result row: (display name, cell) pairs in schema order.
using ResultRow = std::vector<std::pair<std::string, Cell>>;

struct ResultPage {
    std::size_t total_matches = 0;
    std::size_t offset = 0;
    std::vector<ResultRow> rows;
};

/// Sorts row ids in place. Nulls go last in both directions; ties keep row-id order.
void sort_rows(const ColumnStore& store, RowIds& rows, const SortSpec& sort);

/// Throws ValidationError for limit == 0 or an unknown sort field.
ResultPage select_page(const ColumnStore& store, RowIds rows, const std::optional<SortSpec>& sort,
                       std::size_t offset, std::size_t limit,
                       std::string_view link_template = kDefaultLinkTemplate);

/// RFC-4180 CSV: display-name header, one CRLF-terminated line per row id, nulls empty.
std::string export_csv(const ColumnStore& store, std::span<const std::uint32_t> rows);

}  // namespace oted
