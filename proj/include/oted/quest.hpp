#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oted/cpv.hpp"
#include "oted/error.hpp"
#include "oted/filter.hpp"
#include "oted/store.hpp"

namespace oted {

inline constexpr std::size_t kDefaultMinSupport = 10;

/// A challenge keyed on (CPV division, authority country, dispatch year).
struct Quest {
    std::string cpv_division;
    std::string division_label;
    std::string country;
    int year = 0;
    std::string title;
    std::size_t support = 0;  // rows matching the solution filter

    friend bool operator==(const Quest&, const Quest&) = default;
};

/// A (division, country, year) triple with its matching row count.
struct QuestCandidate {
    std::string cpv_division;
    std::string country;
    int year = 0;
    std::size_t support = 0;
};

/// All triples present in the store whose division exists in `cpv`, sorted by
/// (division, country, year). Support counts use the same predicate as solution_filter.
std::vector<QuestCandidate> quest_candidates(const ColumnStore& store, const CpvTable& cpv);

/// Uniform draw among candidates with support >= min_support.
/// Throws Error("no_quest_available") when none qualify.
Quest generate_quest(const ColumnStore& store, const CpvTable& cpv, std::uint64_t seed,
                     std::size_t min_support = kDefaultMinSupport);

Quest make_quest(const CpvTable& cpv, std::string division, std::string country, int year);

/// AND[country equal, CPV begins_with division, dispatch date within the year].
FilterExpr solution_filter(const Quest& quest);

}  // namespace oted
