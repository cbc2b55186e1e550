#include "oted/analytics.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace oted {

namespace {

struct PartyColumns {
    const Column& authority;
    const Column& contractor;
    const Column& value;
    const Column& notice;

    explicit PartyColumns(const ColumnStore& s)
        : authority(s.column(field::kAuthorityName)),
          contractor(s.column(field::kContractorName)),
          value(s.column(field::kValueEuro)),
          notice(s.column(field::kNoticeId)) {}
};

std::vector<SankeyNode> order_nodes(std::map<std::string_view, std::int64_t>& totals,
                                    std::map<std::string_view, std::size_t>& index) {
    std::vector<SankeyNode> nodes;
    nodes.reserve(totals.size());
    for (const auto& [name, total] : totals) nodes.push_back({std::string(name), total});
    std::stable_sort(nodes.begin(), nodes.end(),
                     [](const auto& a, const auto& b) { return a.total_value > b.total_value; });
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].name] = i;
    return nodes;
}

}  // namespace

SummaryStats summary_stats(const ColumnStore& store, std::span<const std::uint32_t> rows) {
    PartyColumns cols(store);
    std::unordered_set<std::string_view> authorities, contractors;
    SummaryStats s;
    s.n_contracts = rows.size();
    for (auto r : rows) {
        if (!cols.authority.is_null(r)) authorities.insert(cols.authority.text_at(r));
        if (!cols.contractor.is_null(r)) contractors.insert(cols.contractor.text_at(r));
        if (cols.value.is_null(r)) {
            ++s.rows_with_null_value;
        } else {
            s.total_value_euros += cols.value.integer_at(r);
        }
    }
    s.n_authorities = authorities.size();
    s.n_contractors = contractors.size();
    return s;
}

SankeyGraph build_sankey(const ColumnStore& store, std::span<const std::uint32_t> rows,
                         std::optional<std::size_t> max_links, std::string_view link_template) {
    PartyColumns cols(store);
    SankeyGraph graph;
    graph.stats = summary_stats(store, rows);

    std::vector<std::uint32_t> ordered(rows.begin(), rows.end());
    std::sort(ordered.begin(), ordered.end());

    struct Flow {
        std::int64_t value = 0;
        std::size_t count = 0;
        std::vector<std::string_view> notices;
        std::unordered_set<std::string_view> seen;
    };
    std::map<std::pair<std::string_view, std::string_view>, Flow> flows;
    for (auto r : ordered) {
        std::string_view a = cols.authority.is_null(r) ? kUnknownParty : cols.authority.text_at(r);
        std::string_view w = cols.contractor.is_null(r) ? kUnknownParty : cols.contractor.text_at(r);
        auto& f = flows[{a, w}];
        ++f.count;
        if (!cols.value.is_null(r)) f.value += cols.value.integer_at(r);
        if (!cols.notice.is_null(r)) {
            auto id = cols.notice.text_at(r);
            if (f.seen.insert(id).second) f.notices.push_back(id);
        }
    }

    // std::map iteration is already (authority, contractor) ascending, so a stable
    // sort on value gives the documented tie-break.
    std::vector<decltype(flows)::iterator> order;
    order.reserve(flows.size());
    for (auto it = flows.begin(); it != flows.end(); ++it) order.push_back(it);
    std::stable_sort(order.begin(), order.end(),
                     [](auto x, auto y) { return x->second.value > y->second.value; });

    graph.total_links = order.size();
    if (max_links && order.size() > *max_links) {
        order.resize(*max_links);
        graph.truncated = true;
    }

    std::map<std::string_view, std::int64_t> authority_totals, contractor_totals;
    for (auto it : order) {
        authority_totals[it->first.first] += it->second.value;
        contractor_totals[it->first.second] += it->second.value;
    }
    std::map<std::string_view, std::size_t> authority_index, contractor_index;
    graph.authority_nodes = order_nodes(authority_totals, authority_index);
    graph.contractor_nodes = order_nodes(contractor_totals, contractor_index);

    graph.links.reserve(order.size());
    for (auto it : order) {
        SankeyLink link;
        link.authority = authority_index.at(it->first.first);
        link.contractor = contractor_index.at(it->first.second);
        link.value = it->second.value;
        link.contract_count = it->second.count;
        link.notice_links.reserve(it->second.notices.size());
        for (auto id : it->second.notices) {
            link.notice_links.push_back(*make_notice_link(id, link_template));
        }
        graph.links.push_back(std::move(link));
    }
    return graph;
}

}  // namespace oted
