#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oted {

enum class DataType : std::uint8_t { String = 0, Factor = 1, Integer = 2 };

std::string_view to_string(DataType type);
std::optional<DataType> parse_data_type(std::string_view text);

/// Filter operators, in the order they are listed for String fields.
enum class Operator : std::uint8_t {
    Equal,
    NotEqual,
    Less,
    LessOrEqual,
    Greater,
    GreaterOrEqual,
    Between,
    In,
    NotIn,
    BeginsWith,
    EndsWith,
    IsNull,
    IsNotNull,
};

inline constexpr std::array<Operator, 13> kAllOperators = {
    Operator::Equal,      Operator::NotEqual, Operator::Less,       Operator::LessOrEqual,
    Operator::Greater,    Operator::GreaterOrEqual, Operator::Between, Operator::In,
    Operator::NotIn,      Operator::BeginsWith, Operator::EndsWith, Operator::IsNull,
    Operator::IsNotNull,
};

std::string_view to_string(Operator op);
std::optional<Operator> parse_operator(std::string_view text);

/// Operators admitted for a data type, in canonical order.
std::span<const Operator> allowed_operators(DataType type);

/// Throws ValidationError("unknown_operator") when `op` is not one of the 13 identifiers.
bool operator_allowed(DataType type, std::string_view op);
bool operator_allowed(DataType type, Operator op);

struct FieldDescriptor {
    std::string source_name;
    std::string display_name;
    DataType data_type;
    bool highlighted;
    /// 1-based row of the field-list table this field comes from. The four
    /// ADDITIONAL_CPVn fields share one row.
    int catalog_row;
};

/// Registry of CAN fields. Immutable once built.
class Schema {
public:
    explicit Schema(std::vector<FieldDescriptor> fields);

    std::size_t size() const { return fields_.size(); }
    std::span<const FieldDescriptor> fields() const { return fields_; }
    const FieldDescriptor& at(std::size_t index) const { return fields_.at(index); }

    /// Lookup by source or display name.
    std::optional<std::size_t> index_of(std::string_view name) const;
    const FieldDescriptor& field(std::string_view name) const;

    std::size_t catalog_row_count() const;

private:
    std::vector<FieldDescriptor> fields_;
};

const Schema& builtin_schema();

/// Source names of the fields that hold CAN/CA money values.
std::span<const std::string_view> value_fields();

namespace field {
inline constexpr std::string_view kNoticeId = "ID_NOTICE_CAN";
inline constexpr std::string_view kDispatchDate = "DT_DISPATCH";
inline constexpr std::string_view kAwardDate = "DT_AWARD";
inline constexpr std::string_view kAuthorityName = "CAE_NAME";
inline constexpr std::string_view kAuthorityCountry = "ISO_COUNTRY_CODE";
inline constexpr std::string_view kContractorName = "WIN_NAME";
inline constexpr std::string_view kContractorCountry = "WIN_COUNTRY_CODE";
inline constexpr std::string_view kValueEuro = "VALUE_EURO";
inline constexpr std::string_view kCpv = "CPV";
}  // namespace field

}  // namespace oted
