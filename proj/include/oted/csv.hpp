#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oted::csv {

/// RFC-4180 record reader: comma separator, double-quote quoting with "" escapes,
/// CRLF or LF line ends, quoted fields may span lines. A leading UTF-8 BOM is skipped.
class Reader {
public:
    explicit Reader(std::istream& in);

    /// Reads the next record into `fields`. Returns false at end of input.
    /// Throws FormatError on an unterminated quoted field.
    bool next(std::vector<std::string>& fields);

    /// 1-based line on which the last returned record started.
    std::size_t record_line() const { return record_line_; }

private:
    int get();
    int peek();

    std::streambuf* buf_;
    std::string pending_;
    std::size_t pending_pos_ = 0;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Appends `field`, quoted when it contains a comma, quote, CR or LF.
void append_field(std::string& out, std::string_view field);
/// Appends a full record terminated by CRLF.
void append_record(std::string& out, std::span<const std::string_view> fields);

}  // namespace oted::csv
