#include "oted/csv.hpp"

#include "oted/error.hpp"

namespace oted::csv {

namespace {
constexpr int kEof = std::char_traits<char>::eof();
}

Reader::Reader(std::istream& in) : buf_(in.rdbuf()) {
    static constexpr unsigned char kBom[3] = {0xEF, 0xBB, 0xBF};
    for (auto b : kBom) {
        if (buf_->sgetc() != b) return;
        pending_.push_back(static_cast<char>(buf_->sbumpc()));
    }
    pending_.clear();
}

int Reader::get() {
    if (pending_pos_ < pending_.size()) {
        return static_cast<unsigned char>(pending_[pending_pos_++]);
    }
    return buf_->sbumpc();
}

int Reader::peek() {
    if (pending_pos_ < pending_.size()) return static_cast<unsigned char>(pending_[pending_pos_]);
    return buf_->sgetc();
}

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = peek();
    if (c == kEof) return false;
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool in_quotes = false;
    while (true) {
        c = get();
        if (in_quotes) {
            if (c == kEof) {
                throw FormatError("unterminated_quote", "unterminated quoted field starting on line " +
                                                            std::to_string(record_line_));
            }
            if (c == '"') {
                if (peek() == '"') {
                    get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(static_cast<char>(c));
            }
            continue;
        }
        if (c == kEof || c == '\n' || c == '\r') {
            if (c == '\r' && peek() == '\n') get();
            if (c != kEof) ++line_;
            fields.push_back(std::move(field));
            return true;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            quoted = false;
        } else if (c == '"' && field.empty() && !quoted) {
            quoted = true;
            in_quotes = true;
        } else {
            // Stray quotes inside unquoted fields are kept literally.
            field.push_back(static_cast<char>(c));
        }
    }
}

void append_field(std::string& out, std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
}

void append_record(std::string& out, std::span<const std::string_view> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        append_field(out, fields[i]);
    }
    out.append("\r\n");
}

}  // namespace oted::csv
