#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "oted/error.hpp"
#include "oted/schema.hpp"
#include "oted/store.hpp"

namespace oted {

/// Operand literal: text or integer.
using Literal = std::variant<std::string, std::int64_t>;

enum class Combinator : std::uint8_t { And, Or };

struct FilterExpr;

struct Condition {
    std::string field;
    Operator op;
    std::vector<Literal> args;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct Group {
    Combinator combinator;
    std::vector<FilterExpr> children;

    friend bool operator==(const Group&, const Group&);
};

/// Query AST node: a Group of children or a single Condition.
struct FilterExpr {
    std::variant<Group, Condition> node;

    bool is_group() const { return std::holds_alternative<Group>(node); }
    const Group& group() const { return std::get<Group>(node); }
    const Condition& condition() const { return std::get<Condition>(node); }

    friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

inline bool operator==(const Group& a, const Group& b) {
    return a.combinator == b.combinator && a.children == b.children;
}

FilterExpr make_and(std::vector<FilterExpr> children);
FilterExpr make_or(std::vector<FilterExpr> children);
FilterExpr make_condition(std::string field, Operator op, std::vector<Literal> args = {});

/// Thrown by parse_filter. `position` is a byte offset for syntax errors;
/// `path` is a JSON-pointer-like location ("/and/1/or/0") for structural errors.
class FilterParseError : public ValidationError {
public:
    FilterParseError(std::string code, const std::string& message, std::string path,
                     std::optional<std::size_t> position = std::nullopt)
        : ValidationError(std::move(code), message),
          path_(std::move(path)),
          position_(position) {}

    const std::string& path() const noexcept { return path_; }
    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    std::string path_;
    std::optional<std::size_t> position_;
};

/// Number of operands an operator takes: exact count, or a minimum for in/not_in.
struct Arity {
    std::size_t min;
    std::optional<std::size_t> max;
};
Arity operator_arity(Operator op);
bool arity_ok(Operator op, std::size_t count);

FilterExpr parse_filter(std::string_view text);
FilterExpr filter_from_json(const nlohmann::json& value);
nlohmann::json filter_to_json(const FilterExpr& expr);
std::string serialize_filter(const FilterExpr& expr);

struct FilterIssue {
    std::string code;
    std::string message;
    std::string path;

    friend bool operator==(const FilterIssue&, const FilterIssue&) = default;
};

/// Empty result means the expression is valid for `schema`.
std::vector<FilterIssue> validate(const FilterExpr& expr, const Schema& schema = builtin_schema());

/// Group nesting depth; a bare condition has depth 0.
std::size_t expression_depth(const FilterExpr& expr);
std::size_t condition_count(const FilterExpr& expr);

using RowIds = std::vector<std::uint32_t>;

/// Matching rows in ascending order. Throws ValidationError when `expr` is invalid
/// for the store's schema.
RowIds evaluate(const FilterExpr& expr, const ColumnStore& store);

}  // namespace oted
