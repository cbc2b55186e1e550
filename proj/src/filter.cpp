#include "oted/filter.hpp"

#include <limits>

#include <nlohmann/json.hpp>

namespace oted {

using nlohmann::json;

FilterExpr make_and(std::vector<FilterExpr> children) {
    return FilterExpr{Group{Combinator::And, std::move(children)}};
}

FilterExpr make_or(std::vector<FilterExpr> children) {
    return FilterExpr{Group{Combinator::Or, std::move(children)}};
}

FilterExpr make_condition(std::string field, Operator op, std::vector<Literal> args) {
    return FilterExpr{Condition{std::move(field), op, std::move(args)}};
}

Arity operator_arity(Operator op) {
    switch (op) {
        case Operator::IsNull:
        case Operator::IsNotNull: return {0, 0};
        case Operator::Between: return {2, 2};
        case Operator::In:
        case Operator::NotIn: return {1, std::nullopt};
        default: return {1, 1};
    }
}

bool arity_ok(Operator op, std::size_t count) {
    auto a = operator_arity(op);
    return count >= a.min && (!a.max || count <= *a.max);
}

namespace {

constexpr std::size_t kMaxParseDepth = 64;

std::string_view combinator_key(Combinator c) { return c == Combinator::And ? "and" : "or"; }

std::string arity_message(Operator op, std::size_t got) {
    auto a = operator_arity(op);
    std::string want = a.max ? "exactly " + std::to_string(a.min)
                             : "at least " + std::to_string(a.min);
    return "operator " + std::string(to_string(op)) + " takes " + want + " operand" +
           (a.min == 1 && a.max ? "" : "s") + ", got " + std::to_string(got);
}

Literal literal_from_json(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) {
        if (v.is_number_unsigned() &&
            v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            throw FilterParseError("bad_literal", "integer literal out of range", path);
        }
        return v.get<std::int64_t>();
    }
    throw FilterParseError("bad_literal",
                           "operand must be a string or an integer, got " + std::string(v.type_name()),
                           path);
}

FilterExpr node_from_json(const json& v, const std::string& path, std::size_t depth) {
    if (depth > kMaxParseDepth) {
        throw FilterParseError("too_deep", "expression nests deeper than " +
                                               std::to_string(kMaxParseDepth) + " groups", path);
    }
    if (!v.is_object()) {
        throw FilterParseError("bad_node", "filter node must be an object", path);
    }
    for (auto c : {Combinator::And, Combinator::Or}) {
        auto key = std::string(combinator_key(c));
        auto it = v.find(key);
        if (it == v.end()) continue;
        if (v.size() != 1) {
            throw FilterParseError("bad_node", "group node must have exactly one key", path);
        }
        if (!it->is_array()) {
            throw FilterParseError("bad_node", "\"" + key + "\" must be an array", path + "/" + key);
        }
        if (it->empty()) throw FilterParseError("empty_group", "empty group", path + "/" + key);
        Group g{c, {}};
        g.children.reserve(it->size());
        for (std::size_t i = 0; i < it->size(); ++i) {
            g.children.push_back(
                node_from_json((*it)[i], path + "/" + key + "/" + std::to_string(i), depth + 1));
        }
        return FilterExpr{std::move(g)};
    }

    for (const auto& [key, _] : v.items()) {
        if (key != "field" && key != "op" && key != "args") {
            throw FilterParseError("unknown_key", "unexpected key \"" + key + "\"", path);
        }
    }
    auto field = v.find("field");
    if (field == v.end() || !field->is_string()) {
        throw FilterParseError("bad_node", "condition needs a string \"field\"", path);
    }
    auto op_it = v.find("op");
    if (op_it == v.end() || !op_it->is_string()) {
        throw FilterParseError("bad_node", "condition needs a string \"op\"", path);
    }
    auto op_name = op_it->get<std::string>();
    auto op = parse_operator(op_name);
    if (!op) throw FilterParseError("unknown_operator", "unknown operator " + op_name, path + "/op");

    Condition cond{field->get<std::string>(), *op, {}};
    if (auto args = v.find("args"); args != v.end()) {
        if (!args->is_array()) throw FilterParseError("bad_node", "\"args\" must be an array", path + "/args");
        for (std::size_t i = 0; i < args->size(); ++i) {
            cond.args.push_back(literal_from_json((*args)[i], path + "/args/" + std::to_string(i)));
        }
    }
    if (!arity_ok(cond.op, cond.args.size())) {
        throw FilterParseError("arity", arity_message(cond.op, cond.args.size()), path + "/args");
    }
    return FilterExpr{std::move(cond)};
}

void validate_node(const FilterExpr& expr, const Schema& schema, const std::string& path,
                   std::vector<FilterIssue>& out) {
    if (expr.is_group()) {
        const auto& g = expr.group();
        auto key = std::string(combinator_key(g.combinator));
        if (g.children.empty()) out.push_back({"empty_group", "empty group", path + "/" + key});
        for (std::size_t i = 0; i < g.children.size(); ++i) {
            validate_node(g.children[i], schema, path + "/" + key + "/" + std::to_string(i), out);
        }
        return;
    }
    const auto& c = expr.condition();
    auto idx = schema.index_of(c.field);
    if (!idx) {
        out.push_back({"unknown_field", "unknown field " + c.field, path + "/field"});
        return;
    }
    const auto& f = schema.at(*idx);
    if (!operator_allowed(f.data_type, c.op)) {
        out.push_back({"operator_not_allowed",
                       "operator " + std::string(to_string(c.op)) + " not allowed for " +
                           std::string(to_string(f.data_type)),
                       path + "/op"});
    }
    if (!arity_ok(c.op, c.args.size())) {
        out.push_back({"arity", arity_message(c.op, c.args.size()), path + "/args"});
    }
    bool want_integer = f.data_type == DataType::Integer;
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        bool is_integer = std::holds_alternative<std::int64_t>(c.args[i]);
        if (is_integer != want_integer) {
            out.push_back({"operand_type",
                           "field " + f.display_name + " is " + std::string(to_string(f.data_type)) +
                               " and needs " + (want_integer ? "integer" : "text") + " operands",
                           path + "/args/" + std::to_string(i)});
        }
    }
}

}  // namespace

FilterExpr filter_from_json(const json& value) { return node_from_json(value, "", 0); }

FilterExpr parse_filter(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FilterParseError("syntax_error", e.what(), "", e.byte);
    }
    return filter_from_json(doc);
}

json filter_to_json(const FilterExpr& expr) {
    if (expr.is_group()) {
        const auto& g = expr.group();
        json children = json::array();
        for (const auto& c : g.children) children.push_back(filter_to_json(c));
        return json{{std::string(combinator_key(g.combinator)), std::move(children)}};
    }
    const auto& c = expr.condition();
    json args = json::array();
    for (const auto& a : c.args) {
        std::visit([&](const auto& v) { args.push_back(v); }, a);
    }
    return json{{"field", c.field}, {"op", std::string(to_string(c.op))}, {"args", std::move(args)}};
}

std::string serialize_filter(const FilterExpr& expr) { return filter_to_json(expr).dump(); }

std::vector<FilterIssue> validate(const FilterExpr& expr, const Schema& schema) {
    std::vector<FilterIssue> out;
    validate_node(expr, schema, "", out);
    return out;
}

std::size_t expression_depth(const FilterExpr& expr) {
    if (!expr.is_group()) return 0;
    std::size_t deepest = 0;
    for (const auto& c : expr.group().children) deepest = std::max(deepest, expression_depth(c));
    return deepest + 1;
}

std::size_t condition_count(const FilterExpr& expr) {
    if (!expr.is_group()) return 1;
    std::size_t n = 0;
    for (const auto& c : expr.group().children) n += condition_count(c);
    return n;
}

}  // namespace oted
