#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "oted/schema.hpp"

namespace oted {

using Value = std::variant<std::int64_t, std::string>;
/// One logical table entry; nullopt is a null cell.
using Cell = std::optional<Value>;

/// Null bitset, LSB-first within each byte: row i maps to byte i/8, bit i%8.
class NullMask {
public:
    NullMask() = default;
    explicit NullMask(std::size_t size) : bytes_((size + 7) / 8, 0), size_(size) {}
    NullMask(std::vector<std::uint8_t> bytes, std::size_t size);

    std::size_t size() const { return size_; }
    bool is_null(std::size_t row) const { return (bytes_[row >> 3] >> (row & 7)) & 1u; }
    void set_null(std::size_t row) { bytes_[row >> 3] |= static_cast<std::uint8_t>(1u << (row & 7)); }
    void push_back(bool null);
    std::size_t null_count() const;
    std::span<const std::uint8_t> bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

class Column {
public:
    static Column integers(NullMask nulls, std::vector<std::int64_t> values);
    static Column factors(NullMask nulls, std::vector<std::string> dictionary,
                          std::vector<std::uint32_t> codes);
    static Column strings(NullMask nulls, std::vector<std::uint64_t> offsets, std::string blob);

    DataType type() const { return type_; }
    std::size_t size() const { return nulls_.size(); }
    const NullMask& nulls() const { return nulls_; }
    bool is_null(std::size_t row) const { return nulls_.is_null(row); }

    // Payload accessors; callers check is_null first.
    std::int64_t integer_at(std::size_t row) const { return ints_[row]; }
    std::uint32_t code_at(std::size_t row) const { return codes_[row]; }
    /// Text of a String or Factor entry.
    std::string_view text_at(std::size_t row) const;

    Cell cell(std::size_t row) const;

    std::span<const std::int64_t> integer_payload() const { return ints_; }
    std::span<const std::string> dictionary() const { return dictionary_; }
    std::span<const std::uint32_t> code_payload() const { return codes_; }
    std::span<const std::uint64_t> offsets() const { return offsets_; }
    std::string_view blob() const { return blob_; }

private:
    explicit Column(DataType type, NullMask nulls) : type_(type), nulls_(std::move(nulls)) {}

    DataType type_;
    NullMask nulls_;
    std::vector<std::int64_t> ints_;
    std::vector<std::string> dictionary_;
    std::vector<std::uint32_t> codes_;
    std::vector<std::uint64_t> offsets_;
    std::string blob_;
};

/// Accumulates cells for one column. Factor dictionaries come out sorted and
/// contain only values seen in non-null rows.
class ColumnBuilder {
public:
    explicit ColumnBuilder(DataType type);

    void append_null();
    void append(std::int64_t value);
    void append(std::string_view value);
    void append(const Cell& cell);
    std::size_t size() const { return nulls_.size(); }

    Column finish() &&;

private:
    DataType type_;
    NullMask nulls_;
    std::vector<std::int64_t> ints_;
    std::unordered_map<std::string, std::uint32_t> dict_index_;
    std::vector<std::string> dictionary_;
    std::vector<std::uint32_t> codes_;
    std::vector<std::uint64_t> offsets_{0};
    std::string blob_;
};

/// Immutable columnar snapshot, one column per schema field in schema order.
class ColumnStore {
public:
    ColumnStore(const Schema& schema, std::vector<Column> columns);

    static ColumnStore empty(const Schema& schema = builtin_schema());

    std::size_t row_count() const { return row_count_; }
    const Schema& schema() const { return *schema_; }
    std::size_t column_count() const { return columns_.size(); }
    const Column& column(std::size_t index) const { return columns_.at(index); }
    /// By source or display name; throws ValidationError("unknown_field").
    const Column& column(std::string_view name) const;
    Cell cell(std::size_t row, std::size_t column) const { return columns_[column].cell(row); }

    /// Logical (cell-by-cell) equality.
    friend bool operator==(const ColumnStore& a, const ColumnStore& b);

private:
    const Schema* schema_;
    std::size_t row_count_ = 0;
    std::vector<Column> columns_;
};

class StoreBuilder {
public:
    explicit StoreBuilder(const Schema& schema = builtin_schema());

    /// `row` holds one cell per schema field, in schema order.
    void append_row(std::span<const Cell> row);
    ColumnBuilder& column(std::size_t index) { return builders_[index]; }
    std::size_t row_count() const;

    ColumnStore finish() &&;

private:
    const Schema* schema_;
    std::vector<ColumnBuilder> builders_;
};

std::vector<std::uint8_t> encode_store(const ColumnStore& store);
/// Throws FormatError naming the defect ("bad magic", "unsupported version", "truncated ...").
ColumnStore decode_store(std::span<const std::uint8_t> bytes, const Schema& schema = builtin_schema());

void write_store(const ColumnStore& store, const std::filesystem::path& path);
ColumnStore read_store(const std::filesystem::path& path, const Schema& schema = builtin_schema());

/// Sorted dictionary of a Factor column; throws ValidationError for other types.
std::vector<std::string> column_distinct_values(const ColumnStore& store, std::string_view field);

}  // namespace oted
