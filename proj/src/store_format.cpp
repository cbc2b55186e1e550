// OTED v1 on-disk layout. All integers little-endian.
//
//   "OTED" | u16 version | u64 row_count | u32 column_count
//   column directory, per column:
//     u32 name_len | name bytes | u8 type tag | u64 payload_offset | u64 payload_length
//   payloads
//
// Integer payload: null bitset | n x i64
// Factor payload:  u32 dict_count | dict entries (u32 len + bytes) | null bitset | n x u32
// String payload:  null bitset | (n+1) x u64 offsets | blob

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>

#include "oted/error.hpp"
#include "oted/store.hpp"

namespace oted {

namespace {

constexpr std::uint8_t kMagic[4] = {0x4F, 0x54, 0x45, 0x44};
constexpr std::uint16_t kVersion = 1;

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void text(std::string_view s) {
        out_.insert(out_.end(), reinterpret_cast<const std::uint8_t*>(s.data()),
                    reinterpret_cast<const std::uint8_t*>(s.data()) + s.size());
    }
    void sized_text(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        text(s);
    }
    void patch_u64(std::size_t at, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
    std::size_t size() const { return out_.size(); }
    std::vector<std::uint8_t> take() && { return std::move(out_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> data, std::string context)
        : data_(data), context_(std::move(context)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
    std::span<const std::uint8_t> bytes(std::uint64_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    std::string text(std::uint64_t n) {
        auto b = bytes(n);
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    /// Fails early when `count` items of `width` bytes cannot fit in what is left.
    void expect(std::uint64_t width, std::uint64_t count) const {
        if (count > remaining() / width) need(remaining() + 1);
    }

private:
    void need(std::uint64_t n) const {
        if (n > remaining()) {
            throw FormatError("truncated", "truncated " + context_ + ": need " + std::to_string(n) +
                                               " bytes, " + std::to_string(remaining()) + " left");
        }
    }
    std::uint64_t get(int n) {
        need(n);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
        pos_ += n;
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    std::string context_;
};

void encode_payload(ByteWriter& w, const Column& col) {
    switch (col.type()) {
        case DataType::Integer:
            w.bytes(col.nulls().bytes());
            for (auto v : col.integer_payload()) w.i64(v);
            break;
        case DataType::Factor:
            w.u32(static_cast<std::uint32_t>(col.dictionary().size()));
            for (const auto& s : col.dictionary()) w.sized_text(s);
            w.bytes(col.nulls().bytes());
            for (auto c : col.code_payload()) w.u32(c);
            break;
        case DataType::String:
            w.bytes(col.nulls().bytes());
            for (auto o : col.offsets()) w.u64(o);
            w.text(col.blob());
            break;
    }
}

NullMask read_nulls(ByteReader& r, std::uint64_t rows) {
    auto b = r.bytes((rows + 7) / 8);
    return NullMask(std::vector<std::uint8_t>(b.begin(), b.end()), rows);
}

Column decode_payload(std::span<const std::uint8_t> payload, DataType type, std::uint64_t rows,
                      const std::string& name) {
    ByteReader r(payload, "payload of column " + name);
    std::optional<Column> col;
    switch (type) {
        case DataType::Integer: {
            auto nulls = read_nulls(r, rows);
            r.expect(8, rows);
            std::vector<std::int64_t> values(rows);
            for (auto& v : values) v = r.i64();
            col = Column::integers(std::move(nulls), std::move(values));
            break;
        }
        case DataType::Factor: {
            std::uint32_t dict_count = r.u32();
            r.expect(4, dict_count);
            std::vector<std::string> dict(dict_count);
            for (auto& s : dict) s = r.text(r.u32());
            auto nulls = read_nulls(r, rows);
            r.expect(4, rows);
            std::vector<std::uint32_t> codes(rows);
            for (auto& c : codes) c = r.u32();
            col = Column::factors(std::move(nulls), std::move(dict), std::move(codes));
            break;
        }
        case DataType::String: {
            auto nulls = read_nulls(r, rows);
            r.expect(8, rows + 1);
            std::vector<std::uint64_t> offsets(rows + 1);
            for (auto& o : offsets) o = r.u64();
            std::uint64_t blob_len = offsets.back();
            auto blob = r.text(blob_len);
            col = Column::strings(std::move(nulls), std::move(offsets), std::move(blob));
            break;
        }
    }
    if (r.remaining() != 0) {
        throw FormatError("bad_payload", "payload of column " + name + " has " +
                                             std::to_string(r.remaining()) + " trailing bytes");
    }
    return std::move(*col);
}

}  // namespace

std::vector<std::uint8_t> encode_store(const ColumnStore& store) {
    ByteWriter w;
    for (auto b : kMagic) w.u8(b);
    w.u16(kVersion);
    w.u64(store.row_count());
    w.u32(static_cast<std::uint32_t>(store.column_count()));

    std::vector<std::size_t> offset_slots;
    for (std::size_t c = 0; c < store.column_count(); ++c) {
        w.sized_text(store.schema().at(c).source_name);
        w.u8(static_cast<std::uint8_t>(store.column(c).type()));
        offset_slots.push_back(w.size());
        w.u64(0);
        w.u64(0);
    }
    for (std::size_t c = 0; c < store.column_count(); ++c) {
        std::size_t start = w.size();
        encode_payload(w, store.column(c));
        w.patch_u64(offset_slots[c], start);
        w.patch_u64(offset_slots[c] + 8, w.size() - start);
    }
    return std::move(w).take();
}

ColumnStore decode_store(std::span<const std::uint8_t> bytes, const Schema& schema) {
    ByteReader r(bytes, "header");
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw FormatError("bad_magic", "bad magic");
    }
    r.bytes(4);
    auto version = r.u16();
    if (version != kVersion) {
        throw FormatError("unsupported_version", "unsupported version " + std::to_string(version));
    }
    std::uint64_t rows = r.u64();
    std::uint32_t ncols = r.u32();

    struct Entry {
        DataType type;
        std::uint64_t offset;
        std::uint64_t length;
    };
    std::map<std::string, Entry> directory;
    for (std::uint32_t c = 0; c < ncols; ++c) {
        auto name = r.text(r.u32());
        auto tag = r.u8();
        if (tag > 2) {
            throw FormatError("bad_type_tag", "column " + name + " has type tag " +
                                                  std::to_string(tag));
        }
        Entry e{static_cast<DataType>(tag), r.u64(), r.u64()};
        if (e.offset > bytes.size() || e.length > bytes.size() - e.offset) {
            throw FormatError("truncated", "truncated file: payload of column " + name +
                                               " extends past end of file");
        }
        if (!directory.emplace(name, e).second) {
            throw FormatError("duplicate_column", "duplicate column " + name);
        }
    }

    std::vector<Column> columns;
    columns.reserve(schema.size());
    for (const auto& f : schema.fields()) {
        auto it = directory.find(f.source_name);
        if (it == directory.end()) {
            throw FormatError("missing_column", "missing column " + f.source_name);
        }
        const auto& e = it->second;
        if (e.type != f.data_type) {
            throw FormatError("type_mismatch", "column " + f.source_name + " stored as " +
                                                   std::string(to_string(e.type)) + ", schema says " +
                                                   std::string(to_string(f.data_type)));
        }
        columns.push_back(decode_payload(bytes.subspan(e.offset, e.length), e.type, rows,
                                         f.source_name));
        directory.erase(it);
    }
    if (!directory.empty()) {
        throw FormatError("unknown_column", "unknown column " + directory.begin()->first);
    }
    return ColumnStore(schema, std::move(columns));
}

void write_store(const ColumnStore& store, const std::filesystem::path& path) {
    auto bytes = encode_store(store);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError(path.string(), "write failed");
}

ColumnStore read_store(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    in.seekg(0, std::ios::end);
    auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw IoError(path.string(), "read failed");
    try {
        return decode_store(bytes, schema);
    } catch (const FormatError& e) {
        throw FormatError(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace oted
