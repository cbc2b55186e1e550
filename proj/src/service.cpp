#include "oted/service.hpp"

#include <charconv>
#include <optional>
#include <random>

#include <nlohmann/json.hpp>

#include "oted/error.hpp"
#include "oted/filter.hpp"
#include "oted/query.hpp"
#include "oted/quest.hpp"

namespace oted {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Error that maps directly to an HTTP status.
struct RequestError {
    int status;
    std::string code;
    std::string message;
    std::vector<FilterIssue> details;
};

HttpResponse json_response(int status, const ordered_json& body) {
    HttpResponse r;
    r.status = status;
    r.body = body.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
    return r;
}

HttpResponse error_response(const RequestError& e) {
    ordered_json err{{"code", e.code}, {"message", e.message}};
    if (!e.details.empty()) {
        ordered_json details = ordered_json::array();
        for (const auto& d : e.details) {
            details.push_back({{"code", d.code}, {"message", d.message}, {"path", d.path}});
        }
        err["details"] = std::move(details);
    }
    return json_response(e.status, ordered_json{{"error", std::move(err)}});
}

ordered_json cell_json(const Cell& cell) {
    if (!cell) return nullptr;
    return std::visit([](const auto& v) { return ordered_json(v); }, *cell);
}

json parse_body(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body.begin(), body.end());
    } catch (const json::parse_error& e) {
        throw RequestError{400, "syntax_error", e.what(), {}};
    }
    if (!doc.is_object()) throw RequestError{400, "bad_request", "request body must be a JSON object", {}};
    return doc;
}

std::optional<std::size_t> optional_count(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw RequestError{400, "bad_request", std::string(key) + " must be a non-negative integer", {}};
    }
    return it->get<std::size_t>();
}

std::optional<SortSpec> parse_sort(const json& body) {
    auto it = body.find("sort");
    if (it == body.end() || it->is_null()) return std::nullopt;
    try {
        if (it->is_string()) return parse_sort_spec(it->get<std::string>());
        if (it->is_object() && it->contains("field") && (*it)["field"].is_string()) {
            SortSpec spec{(*it)["field"].get<std::string>(), SortDirection::Ascending};
            auto dir = it->value("direction", std::string("asc"));
            if (dir == "desc" || dir == "descending") {
                spec.direction = SortDirection::Descending;
            } else if (dir != "asc" && dir != "ascending") {
                throw ValidationError("bad_sort", "sort direction must be asc or desc");
            }
            return spec;
        }
    } catch (const ValidationError& e) {
        throw RequestError{400, e.code(), e.what(), {}};
    }
    throw RequestError{400, "bad_sort", "sort must be \"FIELD:asc|desc\" or {field, direction}", {}};
}

class RequestContext {
public:
    RequestContext(const AppConfig& config, const Snapshot& snapshot)
        : config_(config), snapshot_(snapshot) {}

    /// Parses, bounds-checks and validates the "filter" member.
    FilterExpr filter(const json& body) const {
        auto it = body.find("filter");
        if (it == body.end()) throw RequestError{400, "bad_request", "missing \"filter\"", {}};
        FilterExpr expr;
        try {
            expr = it->is_string() ? parse_filter(it->get<std::string>()) : filter_from_json(*it);
        } catch (const FilterParseError& e) {
            int status = e.code() == "too_deep" ? 413 : 400;
            throw RequestError{status, e.code(), e.what(), {{e.code(), e.what(), "/filter" + e.path()}}};
        }
        auto depth = expression_depth(expr);
        auto conditions = condition_count(expr);
        if (depth > config_.max_depth || conditions > config_.max_conditions) {
            throw RequestError{413, "expression_too_large",
                               "expression has depth " + std::to_string(depth) + " and " +
                                   std::to_string(conditions) + " conditions; limits are " +
                                   std::to_string(config_.max_depth) + " and " +
                                   std::to_string(config_.max_conditions),
                               {}};
        }
        auto issues = validate(expr, snapshot_.store.schema());
        if (!issues.empty()) {
            for (auto& i : issues) i.path = "/filter" + i.path;
            throw RequestError{400, "validation_failed", issues.front().message, std::move(issues)};
        }
        return expr;
    }

    RowIds matches(const json& body) const { return evaluate(filter(body), snapshot_.store); }

private:
    const AppConfig& config_;
    const Snapshot& snapshot_;
};

std::optional<std::string> param(const QueryParams& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::optional<std::uint64_t> numeric_param(const QueryParams& params, const std::string& key) {
    auto v = param(params, key);
    if (!v) return std::nullopt;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw RequestError{400, "bad_request", key + " must be a non-negative integer", {}};
    }
    return out;
}

template <class F>
HttpResponse guarded(F&& f) {
    try {
        return f();
    } catch (const RequestError& e) {
        return error_response(e);
    } catch (const ValidationError& e) {
        return error_response({400, e.code(), e.what(), {}});
    } catch (const Error& e) {
        return error_response({500, e.code(), e.what(), {}});
    } catch (const std::exception& e) {
        return error_response({500, "internal", e.what(), {}});
    }
}

}  // namespace

void AppConfig::check() const {
    if (port < 1 || port > 65535) {
        throw ValidationError("bad_port", "port must be in 1..65535, got " + std::to_string(port));
    }
    for (const auto& p : {store_path, cpv_path}) {
        if (!std::filesystem::exists(p)) throw ValidationError("missing_path", p.string() + " does not exist");
    }
    if (!static_dir.empty() && !std::filesystem::is_directory(static_dir)) {
        throw ValidationError("missing_path", static_dir.string() + " is not a directory");
    }
}

std::shared_ptr<const Snapshot> load_snapshot(const AppConfig& config) {
    return std::make_shared<const Snapshot>(Snapshot{read_store(config.store_path), load_cpv(config.cpv_path)});
}

Service::Service(AppConfig config, std::shared_ptr<const Snapshot> snapshot)
    : config_(std::move(config)), snapshot_(std::move(snapshot)) {}

std::shared_ptr<const Snapshot> Service::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

void Service::replace_snapshot(std::shared_ptr<const Snapshot> next) {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = std::move(next);
}

HttpResponse Service::get_schema() const {
    return guarded([&] {
        auto snap = snapshot();
        const auto& schema = snap->store.schema();
        ordered_json fields = ordered_json::array();
        for (const auto& f : schema.fields()) {
            ordered_json entry{{"name", f.source_name},
                               {"display_name", f.display_name},
                               {"type", std::string(to_string(f.data_type))},
                               {"highlighted", f.highlighted},
                               {"catalog_row", f.catalog_row}};
            if (f.data_type == DataType::Factor) {
                entry["values"] = column_distinct_values(snap->store, f.source_name);
            }
            fields.push_back(std::move(entry));
        }
        ordered_json operators = ordered_json::object();
        for (auto t : {DataType::String, DataType::Factor, DataType::Integer}) {
            ordered_json ops = ordered_json::array();
            for (auto op : allowed_operators(t)) ops.push_back(std::string(to_string(op)));
            operators[std::string(to_string(t))] = std::move(ops);
        }
        return json_response(200, ordered_json{{"fields", std::move(fields)},
                                               {"catalog_rows", schema.catalog_row_count()},
                                               {"row_count", snap->store.row_count()},
                                               {"operators", std::move(operators)}});
    });
}

HttpResponse Service::post_query(std::string_view body_text) const {
    return guarded([&] {
        auto snap = snapshot();
        auto body = parse_body(body_text);
        RequestContext ctx(config_, *snap);
        auto sort = parse_sort(body);
        auto offset = optional_count(body, "offset").value_or(0);
        auto limit = optional_count(body, "limit").value_or(config_.default_page_size);
        if (limit < 1) throw RequestError{400, "bad_limit", "limit must be ≥ 1", {}};
        if (limit > config_.max_page_size) {
            throw RequestError{400, "bad_limit",
                               "limit must be ≤ " + std::to_string(config_.max_page_size), {}};
        }
        auto rows = ctx.matches(body);
        auto page = select_page(snap->store, std::move(rows), sort, offset, limit, config_.link_template);

        ordered_json out_rows = ordered_json::array();
        for (const auto& row : page.rows) {
            ordered_json obj = ordered_json::object();
            for (const auto& [name, cell] : row) obj[name] = cell_json(cell);
            out_rows.push_back(std::move(obj));
        }
        return json_response(200, ordered_json{{"total_matches", page.total_matches},
                                               {"offset", page.offset},
                                               {"limit", limit},
                                               {"rows", std::move(out_rows)}});
    });
}

HttpResponse Service::post_export(std::string_view body_text) const {
    return guarded([&] {
        auto snap = snapshot();
        auto body = parse_body(body_text);
        RequestContext ctx(config_, *snap);
        auto sort = parse_sort(body);
        auto rows = ctx.matches(body);
        if (sort) sort_rows(snap->store, rows, *sort);
        HttpResponse r;
        r.content_type = "text/csv; charset=utf-8";
        r.body = export_csv(snap->store, rows);
        r.headers.emplace_back("Content-Disposition", "attachment; filename=\"selection.csv\"");
        return r;
    });
}

HttpResponse Service::post_sankey(std::string_view body_text) const {
    return guarded([&] {
        auto snap = snapshot();
        auto body = parse_body(body_text);
        RequestContext ctx(config_, *snap);
        auto max_links = optional_count(body, "max_links").value_or(config_.max_links);
        if (max_links < 1) throw RequestError{400, "bad_request", "max_links must be ≥ 1", {}};
        auto rows = ctx.matches(body);
        auto graph = build_sankey(snap->store, rows, max_links, config_.link_template);

        auto nodes = [](const std::vector<SankeyNode>& list) {
            ordered_json out = ordered_json::array();
            for (const auto& n : list) out.push_back({{"name", n.name}, {"total_value", n.total_value}});
            return out;
        };
        ordered_json links = ordered_json::array();
        for (const auto& l : graph.links) {
            links.push_back({{"source", l.authority},
                             {"target", l.contractor},
                             {"authority", graph.authority_nodes[l.authority].name},
                             {"contractor", graph.contractor_nodes[l.contractor].name},
                             {"value", l.value},
                             {"contract_count", l.contract_count},
                             {"notice_links", l.notice_links}});
        }
        const auto& s = graph.stats;
        return json_response(
            200, ordered_json{{"stats",
                               {{"n_authorities", s.n_authorities},
                                {"n_contractors", s.n_contractors},
                                {"n_contracts", s.n_contracts},
                                {"total_value_euros", s.total_value_euros},
                                {"rows_with_null_value", s.rows_with_null_value}}},
                              {"authorities", nodes(graph.authority_nodes)},
                              {"contractors", nodes(graph.contractor_nodes)},
                              {"links", std::move(links)},
                              {"total_links", graph.total_links},
                              {"max_links", max_links},
                              {"truncated", graph.truncated}});
    });
}

HttpResponse Service::get_cpv(const QueryParams& params) const {
    return guarded([&] {
        auto snap = snapshot();
        auto query = param(params, "query").value_or("");
        auto digits = numeric_param(params, "digits");
        auto offset = numeric_param(params, "offset").value_or(0);
        auto limit = numeric_param(params, "limit").value_or(config_.default_page_size);
        constexpr std::uint64_t kMaxCpvPage = 10000;
        if (limit < 1 || limit > kMaxCpvPage) {
            throw RequestError{400, "bad_limit", "limit must be between 1 and 10000", {}};
        }
        auto found = snap->cpv.search(query, digits ? std::optional<std::size_t>(*digits) : std::nullopt);
        ordered_json entries = ordered_json::array();
        for (std::size_t i = offset; i < found.size() && i < offset + limit; ++i) {
            const auto& e = found[i];
            entries.push_back({{"code", e.code},
                               {"description", e.description},
                               {"division", std::string(e.division())}});
        }
        return json_response(200, ordered_json{{"total", found.size()},
                                               {"offset", offset},
                                               {"limit", limit},
                                               {"entries", std::move(entries)}});
    });
}

HttpResponse Service::get_quest(const QueryParams& params) const {
    return guarded([&] {
        auto snap = snapshot();
        auto seed = numeric_param(params, "seed");
        if (!seed) seed = std::random_device{}();
        auto min_support = numeric_param(params, "min_support").value_or(kDefaultMinSupport);
        Quest q;
        try {
            q = generate_quest(snap->store, snap->cpv, *seed, min_support);
        } catch (const Error& e) {
            if (e.code() != "no_quest_available") throw;
            throw RequestError{404, e.code(), e.what(), {}};
        }
        return json_response(200, ordered_json{{"seed", *seed},
                                               {"quest",
                                                {{"cpv_division", q.cpv_division},
                                                 {"division_label", q.division_label},
                                                 {"country", q.country},
                                                 {"year", q.year},
                                                 {"title", q.title},
                                                 {"support", q.support}}},
                                               {"filter", ordered_json::parse(serialize_filter(solution_filter(q)))}});
    });
}

HttpResponse Service::handle(std::string_view method, std::string_view path,
                             const QueryParams& params, std::string_view body) const {
    if (method == "GET" && path == "/api/schema") return get_schema();
    if (method == "POST" && path == "/api/query") return post_query(body);
    if (method == "POST" && path == "/api/export") return post_export(body);
    if (method == "POST" && path == "/api/sankey") return post_sankey(body);
    if (method == "GET" && path == "/api/cpv") return get_cpv(params);
    if (method == "GET" && path == "/api/quest") return get_quest(params);
    return error_response({404, "not_found", "no route for " + std::string(method) + " " + std::string(path), {}});
}

}  // namespace oted
