#include "oted/quest.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <tuple>

namespace oted {

namespace {

bool digit(char c) { return c >= '0' && c <= '9'; }

std::string year_bound(int year, const char* month_day) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%s", year, month_day);
    return buf;
}

/// Unbiased draw in [0, n) from a 64-bit engine.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace

std::vector<QuestCandidate> quest_candidates(const ColumnStore& store, const CpvTable& cpv) {
    const auto& country = store.column(field::kAuthorityCountry);
    const auto& code = store.column(field::kCpv);
    const auto& date = store.column(field::kDispatchDate);

    std::map<std::tuple<std::string_view, std::string_view, int>, std::size_t> counts;
    for (std::size_t r = 0; r < store.row_count(); ++r) {
        if (country.is_null(r) || code.is_null(r) || date.is_null(r)) continue;
        auto c = code.text_at(r);
        auto d = date.text_at(r);
        if (c.size() < 2 || !digit(c[0]) || !digit(c[1])) continue;
        if (d.size() < 4 || !digit(d[0]) || !digit(d[1]) || !digit(d[2]) || !digit(d[3])) continue;
        int year = (d[0] - '0') * 1000 + (d[1] - '0') * 100 + (d[2] - '0') * 10 + (d[3] - '0');
        // Same test the solution filter applies.
        if (d < year_bound(year, "01-01") || d > year_bound(year, "12-31")) continue;
        ++counts[{c.substr(0, 2), country.text_at(r), year}];
    }

    std::vector<QuestCandidate> out;
    for (const auto& [key, n] : counts) {
        const auto& [division, name, year] = key;
        if (!cpv.find(division)) continue;
        out.push_back({std::string(division), std::string(name), year, n});
    }
    return out;
}

Quest make_quest(const CpvTable& cpv, std::string division, std::string country, int year) {
    Quest q;
    q.division_label = cpv.lookup(division).value_or(division);
    q.cpv_division = std::move(division);
    q.country = std::move(country);
    q.year = year;
    q.title = q.division_label + " in " + q.country + " in " + std::to_string(year);
    return q;
}

Quest generate_quest(const ColumnStore& store, const CpvTable& cpv, std::uint64_t seed,
                     std::size_t min_support) {
    auto candidates = quest_candidates(store, cpv);
    std::erase_if(candidates, [&](const auto& c) { return c.support < std::max<std::size_t>(min_support, 1); });
    if (candidates.empty()) {
        throw Error("no_quest_available", "no quest available with at least " +
                                              std::to_string(min_support) + " matching notices");
    }
    std::mt19937_64 rng(seed);
    const auto& pick = candidates[draw_below(rng, candidates.size())];
    auto q = make_quest(cpv, pick.cpv_division, pick.country, pick.year);
    q.support = pick.support;
    return q;
}

FilterExpr solution_filter(const Quest& quest) {
    return make_and({
        make_condition("Contracting_Authority_Country", Operator::Equal, {quest.country}),
        make_condition("CPV_Code", Operator::BeginsWith, {quest.cpv_division}),
        make_condition("Dispatch_Date", Operator::Between,
                       {year_bound(quest.year, "01-01"), year_bound(quest.year, "12-31")}),
    });
}

}  // namespace oted
