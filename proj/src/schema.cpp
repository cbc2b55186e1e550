#include "oted/schema.hpp"

#include <algorithm>
#include <set>

#include "oted/error.hpp"

namespace oted {

namespace {

constexpr std::array<std::string_view, 13> kOperatorNames = {
    "equal",   "not_equal",        "less",    "less_or_equal", "greater",
    "greater_or_equal", "between", "in",      "not_in",        "begins_with",
    "ends_with", "is_null",        "is_not_null",
};

constexpr std::array<Operator, 13> kStringOps = kAllOperators;

constexpr std::array<Operator, 4> kFactorOps = {
    Operator::Equal, Operator::NotEqual, Operator::IsNull, Operator::IsNotNull};

constexpr std::array<Operator, 11> kIntegerOps = {
    Operator::Equal,   Operator::NotEqual,       Operator::Less,    Operator::LessOrEqual,
    Operator::Greater, Operator::GreaterOrEqual, Operator::Between, Operator::In,
    Operator::NotIn,   Operator::IsNull,         Operator::IsNotNull};

std::vector<FieldDescriptor> builtin_fields() {
    using enum DataType;
    int row = 0;
    std::vector<FieldDescriptor> out;
    auto add = [&](std::string_view source, DataType type, std::string_view renamed = {}) {
        ++row;
        out.push_back({std::string(source), std::string(renamed.empty() ? source : renamed), type,
                       !renamed.empty(), row});
    };

    // Notice metadata
    add("ID_NOTICE_CAN", String, "Award_Notice_Id_Link");
    add("YEAR", Integer);
    add("ID_TYPE", Factor);
    add("DT_DISPATCH", String, "Dispatch_Date");
    add("XSD_VERSION", Factor);
    add("CANCELLED", Factor);
    // Contracting authority or entity identification
    add("CAE_NAME", String, "Contracting_Authority_Name");
    add("CAE_NATIONALID", String);
    add("CAE_ADDRESS", String);
    add("CAE_TOWN", String);
    add("CAE_POSTAL_CODE", String);
    add("ISO_COUNTRY_CODE", Factor, "Contracting_Authority_Country");
    // Winning bidder identification
    add("WIN_NAME", String, "Contractor_Name");
    add("WIN_ADDRESS", String);
    add("WIN_TOWN", String);
    add("WIN_POSTAL_CODE", String);
    add("WIN_COUNTRY_CODE", Factor, "Contractor_Country");
    // Various CAN level variables
    add("CAE_TYPE", Factor);
    add("MAIN_ACTIVITY", String);
    add("B_ON_BEHALF", Factor);
    add("TYPE_OF_CONTRACT", Factor);
    add("TAL_LOCATION_NUTS", String);
    add("B_FRA_AGREEMENT", Factor);
    add("B_DYN_PURCH_SYST", Factor);
    add("CPV", String, "CPV_Code");
    ++row;
    for (int i = 1; i <= 4; ++i) {
        out.push_back({"ADDITIONAL_CPV" + std::to_string(i), "ADDITIONAL_CPV" + std::to_string(i),
                       String, false, row});
    }
    add("B_GPA", Factor);
    add("VALUE_EURO", Integer, "Contract_Value_Euros");
    add("VALUE_EURO_FIN_1", Integer);
    add("VALUE_EURO_FIN_2", Integer);
    add("TOP_TYPE", Factor);
    add("CRIT_CODE", Factor);
    add("CRIT_CRITERIA", String);
    add("CRIT_WEIGHTS", String);
    add("B_ELECTRONIC_AUCTION", Factor);
    add("NUMBER_AWARDS", Integer);
    // Various CA level variables
    add("ID_AWARD", String);
    add("CONTRACT_NUMBER", String);
    add("LOT_NUMBER", String);
    add("TITLE", String);
    add("NUMBER_OFFERS", Integer, "Number_Offers_Received");
    add("NUMBER_OFFERS_ELECTR", Integer);
    add("AWARD_EST_VALUE_EURO", Integer);
    add("AWARD_VALUE_EURO", Integer);
    add("AWARD_VALUE_EURO_FIN_1", Integer);
    add("B_SUBCONTRACTED", Factor);
    add("B_EU_FUNDS", Factor);
    add("DT_AWARD", String);
    return out;
}

constexpr std::array<std::string_view, 6> kValueFields = {
    "VALUE_EURO",           "VALUE_EURO_FIN_1", "VALUE_EURO_FIN_2",
    "AWARD_EST_VALUE_EURO", "AWARD_VALUE_EURO", "AWARD_VALUE_EURO_FIN_1"};

}  // namespace

std::string_view to_string(DataType type) {
    switch (type) {
        case DataType::String: return "String";
        case DataType::Factor: return "Factor";
        case DataType::Integer: return "Integer";
    }
    return "?";
}

std::optional<DataType> parse_data_type(std::string_view text) {
    for (auto t : {DataType::String, DataType::Factor, DataType::Integer}) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

std::string_view to_string(Operator op) { return kOperatorNames[static_cast<std::size_t>(op)]; }

std::optional<Operator> parse_operator(std::string_view text) {
    auto it = std::find(kOperatorNames.begin(), kOperatorNames.end(), text);
    if (it == kOperatorNames.end()) return std::nullopt;
    return static_cast<Operator>(it - kOperatorNames.begin());
}

std::span<const Operator> allowed_operators(DataType type) {
    switch (type) {
        case DataType::String: return kStringOps;
        case DataType::Factor: return kFactorOps;
        case DataType::Integer: return kIntegerOps;
    }
    return {};
}

bool operator_allowed(DataType type, Operator op) {
    auto ops = allowed_operators(type);
    return std::find(ops.begin(), ops.end(), op) != ops.end();
}

bool operator_allowed(DataType type, std::string_view op) {
    auto parsed = parse_operator(op);
    if (!parsed) throw ValidationError("unknown_operator", "unknown operator " + std::string(op));
    return operator_allowed(type, *parsed);
}

Schema::Schema(std::vector<FieldDescriptor> fields) : fields_(std::move(fields)) {
    std::set<std::string_view> names;
    for (const auto& f : fields_) {
        if (!names.insert(f.source_name).second) {
            throw ValidationError("duplicate_field", "duplicate field name " + f.source_name);
        }
        if (f.display_name != f.source_name && !names.insert(f.display_name).second) {
            throw ValidationError("duplicate_field", "duplicate field name " + f.display_name);
        }
    }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (fields_[i].source_name == name || fields_[i].display_name == name) return i;
    }
    return std::nullopt;
}

const FieldDescriptor& Schema::field(std::string_view name) const {
    auto idx = index_of(name);
    if (!idx) throw ValidationError("unknown_field", "unknown field " + std::string(name));
    return fields_[*idx];
}

std::size_t Schema::catalog_row_count() const {
    std::set<int> rows;
    for (const auto& f : fields_) rows.insert(f.catalog_row);
    return rows.size();
}

const Schema& builtin_schema() {
    static const Schema schema(builtin_fields());
    return schema;
}

std::span<const std::string_view> value_fields() { return kValueFields; }

}  // namespace oted
