#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oted/ingest.hpp"
#include "oted/store.hpp"

namespace oted {

/// Label for rows whose authority or contractor name is null.
inline constexpr std::string_view kUnknownParty = "(unknown)";
inline constexpr std::size_t kDefaultMaxLinks = 200;

struct SummaryStats {
    std::size_t n_authorities = 0;
    std::size_t n_contractors = 0;
    std::size_t n_contracts = 0;
    std::int64_t total_value_euros = 0;
    std::size_t rows_with_null_value = 0;

    friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

struct SankeyNode {
    std::string name;
    std::int64_t total_value = 0;
};

struct SankeyLink {
    std::size_t authority = 0;   // index into authority_nodes
    std::size_t contractor = 0;  // index into contractor_nodes
    std::int64_t value = 0;
    std::size_t contract_count = 0;
    std::vector<std::string> notice_links;
};

/// Authority-to-contractor money flows. Stats always describe the whole selection,
/// even when links are truncated.
struct SankeyGraph {
    std::vector<SankeyNode> authority_nodes;
    std::vector<SankeyNode> contractor_nodes;
    std::vector<SankeyLink> links;
    SummaryStats stats;
    std::size_t total_links = 0;  // before truncation
    bool truncated = false;
};

SummaryStats summary_stats(const ColumnStore& store, std::span<const std::uint32_t> rows);

/// Groups rows by exact (CAE_NAME, WIN_NAME) and sums VALUE_EURO per group.
/// Links are ordered by value descending, then authority name, then contractor name;
/// nodes by total descending, then name.
SankeyGraph build_sankey(const ColumnStore& store, std::span<const std::uint32_t> rows,
                         std::optional<std::size_t> max_links = kDefaultMaxLinks,
                         std::string_view link_template = kDefaultLinkTemplate);

}  // namespace oted
