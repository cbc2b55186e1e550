#include "oted/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "oted/csv.hpp"
#include "oted/error.hpp"

namespace oted {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"JAN", "FEB", "MAR", "APR", "MAY", "JUN",
                                                      "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view digits) {
    int v = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), v);
    return v;
}

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

std::string format_iso(int year, int month, int day) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<std::string> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
    int year = to_int(y), month = to_int(m), day = to_int(d);
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
    return std::string(s);
}

std::optional<std::string> parse_dmy_date(std::string_view s) {
    auto first = s.find('-');
    auto second = first == std::string_view::npos ? first : s.find('-', first + 1);
    if (second == std::string_view::npos) return std::nullopt;
    auto d = s.substr(0, first);
    auto mon = s.substr(first + 1, second - first - 1);
    auto y = s.substr(second + 1);
    if (!all_digits(d) || d.size() > 2 || mon.size() != 3 || !all_digits(y) ||
        (y.size() != 2 && y.size() != 4)) {
        return std::nullopt;
    }
    char upper[3];
    for (int i = 0; i < 3; ++i) {
        char c = mon[i];
        upper[i] = (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
    }
    auto it = std::find(kMonths.begin(), kMonths.end(), std::string_view(upper, 3));
    if (it == kMonths.end()) return std::nullopt;
    int month = static_cast<int>(it - kMonths.begin()) + 1;
    int year = to_int(y);
    if (y.size() == 2) year += year >= 90 ? 1900 : 2000;
    int day = to_int(d);
    if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
    return format_iso(year, month, day);
}

}  // namespace

std::optional<std::string> normalize_date(std::string_view raw) {
    raw = trim(raw);
    if (raw.empty()) return std::nullopt;
    if (auto iso = parse_iso_date(raw)) return iso;
    return parse_dmy_date(raw);
}

bool is_malformed_date(std::string_view raw) {
    return !trim(raw).empty() && !normalize_date(raw);
}

CountryExpansion expand_country(std::optional<std::string_view> code) {
    if (!code) return {};
    auto c = trim(*code);
    if (c.empty()) return {};
    if (auto name = country_name(c)) return {std::string(*name), false};
    if (is_country_name(c)) return {std::string(c), false};
    return {std::string(c), true};
}

IntegerConversion to_integer_value(std::string_view raw) {
    auto s = trim(raw);
    if (s.empty()) return {};

    // Exact decimal path: [sign] digits [. digits]
    std::string_view body = s;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    auto dot = body.find('.');
    auto int_part = body.substr(0, dot);
    auto frac_part = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    bool decimal_ok = (!int_part.empty() || !frac_part.empty()) &&
                      (int_part.empty() || all_digits(int_part)) &&
                      (frac_part.empty() || all_digits(frac_part)) &&
                      !(dot != std::string_view::npos && int_part.empty() && frac_part.empty());
    if (decimal_ok) {
        std::uint64_t magnitude = 0;
        if (!int_part.empty()) {
            auto [ptr, ec] = std::from_chars(int_part.data(), int_part.data() + int_part.size(), magnitude);
            if (ec != std::errc{}) return {std::nullopt, true};
        }
        if (!frac_part.empty() && frac_part.front() >= '5') ++magnitude;
        constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        if (magnitude > kMax + (negative ? 1 : 0)) return {std::nullopt, true};
        if (negative) {
            return {magnitude == kMax + 1 ? std::numeric_limits<std::int64_t>::min()
                                          : -static_cast<std::int64_t>(magnitude),
                    false};
        }
        return {static_cast<std::int64_t>(magnitude), false};
    }

    // Scientific notation fallback, e.g. "1.5E+07".
    double d = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(d) ||
        std::fabs(d) >= 9.2e18) {
        return {std::nullopt, true};
    }
    return {static_cast<std::int64_t>(std::llround(d)), false};
}

std::optional<std::string> make_notice_link(std::optional<std::string_view> notice_id,
                                            std::string_view link_template) {
    if (!notice_id) return std::nullopt;
    static constexpr std::string_view kPlaceholder = "{id}";
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto hit = link_template.find(kPlaceholder, pos);
        out.append(link_template.substr(pos, hit - pos));
        if (hit == std::string_view::npos) break;
        out.append(*notice_id);
        pos = hit + kPlaceholder.size();
    }
    return out;
}

std::string IngestReport::to_text() const {
    std::ostringstream os;
    os << "files: " << files << "\n"
       << "rows_read: " << rows_read << "\n"
       << "rows_kept: " << rows_kept << "\n";
    for (const auto& h : ignored_headers) os << "ignored header: " << h << "\n";
    for (const auto& [name, n] : warning_counts) {
        if (n) os << "warnings " << name << ": " << n << "\n";
    }
    for (const auto& [name, n] : null_counts) os << "nulls " << name << ": " << n << "\n";
    for (const auto& f : factor_mismatches) {
        os << "note: " << f << " distinct-count disagrees with its schema type\n";
    }
    return os.str();
}

namespace {

enum class Normalizer { None, Date, Country, Integer };

Normalizer normalizer_for(const FieldDescriptor& f) {
    if (f.source_name == field::kDispatchDate || f.source_name == field::kAwardDate) {
        return Normalizer::Date;
    }
    if (f.source_name == field::kAuthorityCountry || f.source_name == field::kContractorCountry) {
        return Normalizer::Country;
    }
    if (f.data_type == DataType::Integer) return Normalizer::Integer;
    return Normalizer::None;
}

class Ingestor {
public:
    explicit Ingestor(const Schema& schema) : schema_(schema), builder_(schema) {
        for (const auto& f : schema.fields()) {
            normalizers_.push_back(normalizer_for(f));
            report_.null_counts[f.source_name] = 0;
            report_.warning_counts[f.source_name] = 0;
        }
        if (schema.size() > 0) report_.warning_counts["(short records)"] = 0;
    }

    void add(std::istream& in, std::string_view name) {
        csv::Reader reader(in);
        std::vector<std::string> header;
        try {
            if (!reader.next(header)) {
                throw FormatError("empty_file", std::string(name) + ": no header row");
            }
        } catch (const FormatError& e) {
            throw FormatError(e.code(), std::string(name) + ": " + e.what());
        }
        // column position in file for each schema field, or npos
        std::vector<std::size_t> source(schema_.size(), std::string::npos);
        std::size_t recognized = 0;
        for (std::size_t i = 0; i < header.size(); ++i) {
            auto h = trim(header[i]);
            auto idx = schema_.index_of(h);
            if (!idx) {
                report_.ignored_headers.push_back(std::string(name) + ":" + std::string(h));
                continue;
            }
            if (source[*idx] == std::string::npos) {
                source[*idx] = i;
                ++recognized;
            }
        }
        if (recognized == 0) {
            throw FormatError("no_recognized_fields",
                              std::string(name) + ": header has no recognized fields");
        }
        ++report_.files;

        std::vector<std::string> record;
        while (true) {
            try {
                if (!reader.next(record)) break;
            } catch (const FormatError& e) {
                throw FormatError(e.code(), std::string(name) + ": " + e.what());
            }
            if (record.size() == 1 && record[0].empty()) continue;  // blank line
            ++report_.rows_read;
            if (record.size() < header.size()) ++report_.warning_counts["(short records)"];
            for (std::size_t c = 0; c < schema_.size(); ++c) {
                std::size_t pos = source[c];
                std::string_view raw =
                    pos < record.size() ? std::string_view(record[pos]) : std::string_view{};
                append_cell(c, raw);
            }
            ++report_.rows_kept;
        }
    }

    IngestResult finish() && {
        auto store = std::move(builder_).finish();
        for (std::size_t c = 0; c < schema_.size(); ++c) {
            const auto& f = schema_.at(c);
            report_.null_counts[f.source_name] = store.column(c).nulls().null_count();
            if (f.data_type == DataType::Factor &&
                !infer_factor_eligibility(store.column(c).dictionary().size())) {
                report_.factor_mismatches.push_back(f.source_name);
            }
        }
        return {std::move(store), std::move(report_)};
    }

private:
    void append_cell(std::size_t c, std::string_view raw) {
        auto& col = builder_.column(c);
        const auto& name = schema_.at(c).source_name;
        if (raw.empty()) {
            col.append_null();
            return;
        }
        switch (normalizers_[c]) {
            case Normalizer::None: col.append(raw); break;
            case Normalizer::Date: {
                auto iso = normalize_date(raw);
                if (iso) {
                    col.append(std::string_view(*iso));
                } else {
                    if (!trim(raw).empty()) ++report_.warning_counts[name];
                    col.append_null();
                }
                break;
            }
            case Normalizer::Country: {
                auto expanded = expand_country(raw);
                if (expanded.unknown) ++report_.warning_counts[name];
                if (expanded.value) {
                    col.append(std::string_view(*expanded.value));
                } else {
                    col.append_null();
                }
                break;
            }
            case Normalizer::Integer: {
                auto v = to_integer_value(raw);
                if (v.malformed) ++report_.warning_counts[name];
                if (v.value) {
                    col.append(*v.value);
                } else {
                    col.append_null();
                }
                break;
            }
        }
    }

    const Schema& schema_;
    StoreBuilder builder_;
    std::vector<Normalizer> normalizers_;
    IngestReport report_;
};

}  // namespace

IngestResult ingest_csv_stream(std::istream& in, std::string_view name, const Schema& schema) {
    Ingestor ingestor(schema);
    ingestor.add(in, name);
    return std::move(ingestor).finish();
}

IngestResult ingest_csv(const std::vector<std::filesystem::path>& paths, const Schema& schema) {
    Ingestor ingestor(schema);
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError(p.string(), "cannot open for reading");
        ingestor.add(in, p.string());
        if (in.bad()) throw IoError(p.string(), "read failed");
    }
    return std::move(ingestor).finish();
}

}  // namespace oted
