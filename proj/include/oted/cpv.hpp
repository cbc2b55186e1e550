#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace oted {

struct CpvEntry {
    /// 8-digit stem, optionally followed by a 9th check digit (stored, never validated).
    std::string code;
    std::string description;

    std::string_view stem() const { return std::string_view(code).substr(0, 8); }
    std::string_view division() const { return std::string_view(code).substr(0, 2); }
};

/// First two digits of a CPV code. Throws ValidationError for short or non-digit input.
std::string division_of(std::string_view code);

/// The CPV nomenclature, sorted by code. Immutable after load.
class CpvTable {
public:
    CpvTable() = default;
    /// Throws ValidationError("duplicate_code") when two entries share a stem.
    explicit CpvTable(std::vector<CpvEntry> entries);

    std::size_t size() const { return entries_.size(); }
    std::span<const CpvEntry> entries() const { return entries_; }

    /// Exact stem match. Shorter digit strings are right-padded with zeros
    /// ("30" finds the division entry); a 9th digit or "-N" suffix is ignored.
    const CpvEntry* find(std::string_view code) const;
    std::optional<std::string> lookup(std::string_view code) const;

    /// Case-insensitive description substring OR code prefix. With `digit_limit` d,
    /// only stems whose digits after position d are all '0' are kept.
    /// Throws ValidationError when d is outside 2..8.
    std::vector<CpvEntry> search(std::string_view query,
                                 std::optional<std::size_t> digit_limit = std::nullopt) const;

private:
    std::vector<CpvEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_stem_;
};

/// CSV rows of code,description. A leading "code,..." header is skipped, as is
/// the "-N" check-digit separator of the official notation ("03000000-1").
/// Throws FormatError naming the line for malformed rows.
CpvTable load_cpv(const std::filesystem::path& path);
CpvTable load_cpv(std::istream& in, std::string_view name = "<stream>");

/// True when every stem digit after the first `digits` is '0'.
bool stem_within_digits(std::string_view stem, std::size_t digits);

}  // namespace oted
