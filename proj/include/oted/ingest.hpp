#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oted/schema.hpp"
#include "oted/store.hpp"

namespace oted {

inline constexpr std::string_view kDefaultLinkTemplate =
    "https://ted.europa.eu/udl?uri=TED:NOTICE:{id}:TEXT:EN:HTML";

/// Fields whose distinct-value count is below this are Factor candidates.
inline constexpr std::size_t kFactorDistinctLimit = 300;

/// "DD-MON-YY" (any letter case) to "YYYY-MM-DD". Years 90..99 map to 19YY, others to 20YY.
/// Input already in "YYYY-MM-DD" form is returned unchanged. Empty input and
/// malformed input both give nullopt; use `is_malformed_date` to tell them apart.
std::optional<std::string> normalize_date(std::string_view raw);
bool is_malformed_date(std::string_view raw);

/// Full English name for an ISO-3166 alpha-2 code, plus the EU aliases UK and EL.
std::optional<std::string_view> country_name(std::string_view code);
/// True when `name` is one of the full names `country_name` can produce.
bool is_country_name(std::string_view name);

struct CountryExpansion {
    std::optional<std::string> value;
    bool unknown = false;
};
/// Unknown codes pass through unchanged with `unknown` set.
CountryExpansion expand_country(std::optional<std::string_view> code);

struct IntegerConversion {
    std::optional<std::int64_t> value;
    bool malformed = false;
};
/// Decimal text to integer, rounding to nearest with ties away from zero.
IntegerConversion to_integer_value(std::string_view raw);

/// Replaces every "{id}" in `link_template`. Null id gives null.
std::optional<std::string> make_notice_link(std::optional<std::string_view> notice_id,
                                            std::string_view link_template);

inline bool infer_factor_eligibility(std::size_t distinct_count) {
    return distinct_count < kFactorDistinctLimit;
}

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t files = 0;
    std::map<std::string, std::size_t> null_counts;
    std::map<std::string, std::size_t> warning_counts;
    std::vector<std::string> ignored_headers;
    /// Fields whose schema type disagrees with the distinct-count rule.
    std::vector<std::string> factor_mismatches;

    std::string to_text() const;
};

struct IngestResult {
    ColumnStore store;
    IngestReport report;
};

/// Files are concatenated in the given order. Headers may use source or display names.
IngestResult ingest_csv(const std::vector<std::filesystem::path>& paths,
                        const Schema& schema = builtin_schema());

/// Single-stream form used by ingest_csv; `name` labels errors.
IngestResult ingest_csv_stream(std::istream& in, std::string_view name,
                               const Schema& schema = builtin_schema());

}  // namespace oted
