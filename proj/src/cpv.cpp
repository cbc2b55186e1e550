#include "oted/cpv.hpp"

#include <algorithm>
#include <fstream>

#include "oted/csv.hpp"
#include "oted/error.hpp"

namespace oted {

namespace {

bool is_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) { return ascii_lower(a) == ascii_lower(b); });
    return it != haystack.end();
}

/// "30124530-4" -> "301245304"; other text unchanged.
std::string strip_check_separator(std::string_view code) {
    if (code.size() == 10 && code[8] == '-') {
        return std::string(code.substr(0, 8)) + code[9];
    }
    return std::string(code);
}

}  // namespace

std::string division_of(std::string_view code) {
    if (code.size() < 2 || !is_digits(code)) {
        throw ValidationError("bad_cpv_code", "CPV code must be at least two digits, got \"" +
                                                  std::string(code) + "\"");
    }
    return std::string(code.substr(0, 2));
}

bool stem_within_digits(std::string_view stem, std::size_t digits) {
    if (digits >= stem.size()) return true;
    return std::all_of(stem.begin() + static_cast<std::ptrdiff_t>(digits), stem.end(),
                       [](char c) { return c == '0'; });
}

CpvTable::CpvTable(std::vector<CpvEntry> entries) : entries_(std::move(entries)) {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const auto& a, const auto& b) { return a.code < b.code; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto [it, inserted] = by_stem_.emplace(std::string(entries_[i].stem()), i);
        if (!inserted) {
            throw ValidationError("duplicate_code", "duplicate code " + it->first);
        }
    }
}

const CpvEntry* CpvTable::find(std::string_view code) const {
    auto normalized = strip_check_separator(code);
    if (!is_digits(normalized) || normalized.size() > 9) return nullptr;
    normalized.resize(8, '0');
    auto it = by_stem_.find(normalized);
    return it == by_stem_.end() ? nullptr : &entries_[it->second];
}

std::optional<std::string> CpvTable::lookup(std::string_view code) const {
    if (const auto* e = find(code)) return e->description;
    return std::nullopt;
}

std::vector<CpvEntry> CpvTable::search(std::string_view query,
                                       std::optional<std::size_t> digit_limit) const {
    if (digit_limit && (*digit_limit < 2 || *digit_limit > 8)) {
        throw ValidationError("bad_digit_limit", "digit limit must be between 2 and 8");
    }
    std::vector<CpvEntry> out;
    for (const auto& e : entries_) {
        if (digit_limit && !stem_within_digits(e.stem(), *digit_limit)) continue;
        if (e.code.starts_with(query) || contains_ci(e.description, query)) out.push_back(e);
    }
    return out;
}

CpvTable load_cpv(std::istream& in, std::string_view name) {
    csv::Reader reader(in);
    std::vector<std::string> record;
    std::vector<CpvEntry> entries;
    std::unordered_map<std::string, std::size_t> first_line;
    auto fail = [&](std::string code, const std::string& message) {
        throw FormatError(std::move(code), std::string(name) + ":" +
                                               std::to_string(reader.record_line()) + ": " + message);
    };
    bool first = true;
    while (true) {
        try {
            if (!reader.next(record)) break;
        } catch (const FormatError& e) {
            throw FormatError(e.code(), std::string(name) + ": " + e.what());
        }
        bool header = first && !record.empty() && record[0] == "code";
        first = false;
        if (header) continue;
        if (record.size() == 1 && record[0].empty()) continue;
        if (record.size() < 2) fail("malformed_row", "expected code,description");
        auto code = strip_check_separator(record[0]);
        if (!is_digits(code) || (code.size() != 8 && code.size() != 9)) {
            fail("malformed_row", "code \"" + record[0] + "\" is not 8 or 9 digits");
        }
        if (record[1].empty()) fail("malformed_row", "empty description for " + record[0]);
        auto stem = code.substr(0, 8);
        auto [it, inserted] = first_line.emplace(stem, reader.record_line());
        if (!inserted) {
            fail("duplicate_code", "duplicate code " + stem + " (first seen on line " +
                                       std::to_string(it->second) + ")");
        }
        entries.push_back({std::move(code), std::move(record[1])});
    }
    return CpvTable(std::move(entries));
}

CpvTable load_cpv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    return load_cpv(in, path.string());
}

}  // namespace oted
