#include "random_expr.hpp"

namespace oted::testing {

ExprGenerator::ExprGenerator(const Synthetic& data, std::uint64_t seed)
    : data_(data), rng_(seed), by_type_(3) {
    const auto& schema = data.store.schema();
    for (std::size_t i = 0; i < schema.size(); ++i) {
        by_type_[static_cast<std::size_t>(schema.at(i).data_type)].push_back(i);
    }
}

FilterExpr ExprGenerator::next(std::size_t max_depth) { return group(max_depth == 0 ? 1 : max_depth); }

FilterExpr ExprGenerator::node(std::size_t depth_left) {
    if (depth_left == 0 || uniform(rng_, 0, 99) < 40) return FilterExpr{condition()};
    return group(depth_left);
}

FilterExpr ExprGenerator::group(std::size_t depth_left) {
    auto n = static_cast<std::size_t>(uniform(rng_, 1, 4));
    std::vector<FilterExpr> children;
    for (std::size_t i = 0; i < n; ++i) children.push_back(node(depth_left - 1));
    return uniform(rng_, 0, 1) ? make_and(std::move(children)) : make_or(std::move(children));
}

Condition ExprGenerator::condition() {
    const auto& schema = data_.store.schema();
    auto type = static_cast<DataType>(uniform(rng_, 0, 2));
    auto ops = allowed_operators(type);
    auto op = ops[static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(ops.size()) - 1))];
    const auto& columns = by_type_[static_cast<std::size_t>(type)];
    auto column = columns[static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(columns.size()) - 1))];
    coverage_.emplace(type, op);

    const auto& f = schema.at(column);
    Condition c{uniform(rng_, 0, 1) ? f.display_name : f.source_name, op, {}};
    auto arity = operator_arity(op);
    std::size_t count = arity.min;
    if (!arity.max) count = static_cast<std::size_t>(uniform(rng_, 1, 4));
    for (std::size_t i = 0; i < count; ++i) c.args.push_back(literal(column, op));
    return c;
}

Literal ExprGenerator::literal(std::size_t column, Operator op) {
    const auto& pool = data_.pools[column];
    bool integer = data_.store.schema().at(column).data_type == DataType::Integer;
    if (pool.empty() || uniform(rng_, 0, 9) == 0) {
        if (integer) return uniform(rng_, -10, 6'000'000);
        return std::string(uniform(rng_, 0, 1) ? "no such value" : "");
    }
    const auto& v = pool[static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(pool.size()) - 1))];
    if (integer) return std::get<std::int64_t>(v);
    auto text = std::get<std::string>(v);
    if (op != Operator::BeginsWith && op != Operator::EndsWith) return text;
    // Cut on a UTF-8 character boundary so the literal stays valid text.
    auto cut = static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(text.size())));
    while (cut < text.size() && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) ++cut;
    return op == Operator::BeginsWith ? text.substr(0, cut) : text.substr(cut);
}

}  // namespace oted::testing
