#include <algorithm>
#include <bit>

#include "oted/filter.hpp"

namespace oted {

namespace {

/// Row-selection bitmap, 64 rows per word.
class Bitmap {
public:
    explicit Bitmap(std::size_t rows) : words_((rows + 63) / 64, 0), rows_(rows) {}

    void set(std::size_t row) { words_[row >> 6] |= std::uint64_t{1} << (row & 63); }
    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](auto w) { return w != 0; });
    }
    void and_with(const Bitmap& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    }
    void or_with(const Bitmap& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    }
    bool all() const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t full = (i + 1 == words_.size() && rows_ % 64) ? (std::uint64_t{1} << (rows_ % 64)) - 1
                                                                        : ~std::uint64_t{0};
            if (words_[i] != full) return false;
        }
        return true;
    }
    RowIds to_rows() const {
        RowIds out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto w = words_[i];
            while (w) {
                out.push_back(static_cast<std::uint32_t>(i * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

private:
    std::vector<std::uint64_t> words_;
    std::size_t rows_;
};

template <class Pred>
Bitmap scan(const Column& col, Operator op, Pred&& pred) {
    Bitmap out(col.size());
    const auto& nulls = col.nulls();
    for (std::size_t r = 0; r < col.size(); ++r) {
        bool null = nulls.is_null(r);
        bool hit = op == Operator::IsNull      ? null
                   : op == Operator::IsNotNull ? !null
                   : null                      ? false
                                               : pred(r);
        if (hit) out.set(r);
    }
    return out;
}

Bitmap eval_integer(const Column& col, const Condition& c) {
    auto arg = [&](std::size_t i) { return std::get<std::int64_t>(c.args[i]); };
    auto values = col.integer_payload();
    switch (c.op) {
        case Operator::Equal: return scan(col, c.op, [&, v = arg(0)](auto r) { return values[r] == v; });
        case Operator::NotEqual: return scan(col, c.op, [&, v = arg(0)](auto r) { return values[r] != v; });
        case Operator::Less: return scan(col, c.op, [&, v = arg(0)](auto r) { return values[r] < v; });
        case Operator::LessOrEqual: return scan(col, c.op, [&, v = arg(0)](auto r) { return values[r] <= v; });
        case Operator::Greater: return scan(col, c.op, [&, v = arg(0)](auto r) { return values[r] > v; });
        case Operator::GreaterOrEqual: return scan(col, c.op, [&, v = arg(0)](auto r) { return values[r] >= v; });
        case Operator::Between:
            return scan(col, c.op, [&, lo = arg(0), hi = arg(1)](auto r) {
                return lo <= values[r] && values[r] <= hi;
            });
        case Operator::In:
        case Operator::NotIn: {
            std::vector<std::int64_t> set;
            for (std::size_t i = 0; i < c.args.size(); ++i) set.push_back(arg(i));
            std::sort(set.begin(), set.end());
            bool want = c.op == Operator::In;
            return scan(col, c.op, [&](auto r) {
                return std::binary_search(set.begin(), set.end(), values[r]) == want;
            });
        }
        default: return scan(col, c.op, [](auto) { return false; });
    }
}

Bitmap eval_factor(const Column& col, const Condition& c) {
    if (c.op == Operator::Equal || c.op == Operator::NotEqual) {
        const auto& text = std::get<std::string>(c.args[0]);
        auto dict = col.dictionary();
        auto it = std::find(dict.begin(), dict.end(), text);
        bool found = it != dict.end();
        auto code = static_cast<std::uint32_t>(it - dict.begin());
        auto codes = col.code_payload();
        bool want = c.op == Operator::Equal;
        return scan(col, c.op, [&](auto r) { return (found && codes[r] == code) == want; });
    }
    return scan(col, c.op, [](auto) { return false; });
}

Bitmap eval_string(const Column& col, const Condition& c) {
    auto arg = [&](std::size_t i) -> std::string_view { return std::get<std::string>(c.args[i]); };
    auto text = [&](std::size_t r) { return col.text_at(r); };
    switch (c.op) {
        case Operator::Equal: return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r) == v; });
        case Operator::NotEqual: return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r) != v; });
        case Operator::Less: return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r) < v; });
        case Operator::LessOrEqual: return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r) <= v; });
        case Operator::Greater: return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r) > v; });
        case Operator::GreaterOrEqual: return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r) >= v; });
        case Operator::Between:
            return scan(col, c.op, [&, lo = arg(0), hi = arg(1)](auto r) {
                auto t = text(r);
                return lo <= t && t <= hi;
            });
        case Operator::In:
        case Operator::NotIn: {
            std::vector<std::string_view> set;
            for (std::size_t i = 0; i < c.args.size(); ++i) set.push_back(arg(i));
            std::sort(set.begin(), set.end());
            bool want = c.op == Operator::In;
            return scan(col, c.op, [&](auto r) {
                return std::binary_search(set.begin(), set.end(), text(r)) == want;
            });
        }
        case Operator::BeginsWith:
            return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r).starts_with(v); });
        case Operator::EndsWith:
            return scan(col, c.op, [&, v = arg(0)](auto r) { return text(r).ends_with(v); });
        default: return scan(col, c.op, [](auto) { return false; });
    }
}

Bitmap eval_node(const FilterExpr& expr, const ColumnStore& store) {
    if (!expr.is_group()) {
        const auto& c = expr.condition();
        const auto& col = store.column(c.field);
        switch (col.type()) {
            case DataType::Integer: return eval_integer(col, c);
            case DataType::Factor: return eval_factor(col, c);
            case DataType::String: return eval_string(col, c);
        }
    }
    const auto& g = expr.group();
    Bitmap acc = eval_node(g.children.front(), store);
    for (std::size_t i = 1; i < g.children.size(); ++i) {
        // Short-circuit once the accumulator is saturated.
        if (g.combinator == Combinator::And) {
            if (!acc.any()) break;
            acc.and_with(eval_node(g.children[i], store));
        } else {
            if (acc.all()) break;
            acc.or_with(eval_node(g.children[i], store));
        }
    }
    return acc;
}

}  // namespace

RowIds evaluate(const FilterExpr& expr, const ColumnStore& store) {
    auto issues = validate(expr, store.schema());
    if (!issues.empty()) throw ValidationError(issues.front().code, issues.front().message);
    return eval_node(expr, store).to_rows();
}

}  // namespace oted
