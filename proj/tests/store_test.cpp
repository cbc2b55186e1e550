#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "oted/error.hpp"
#include "oted/store.hpp"
#include "synthetic.hpp"

namespace oted {
namespace {

namespace fs = std::filesystem;

std::uint64_t read_u64(const std::vector<std::uint8_t>& b, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
    return v;
}

TEST(Store, EmptyRoundTrip) {
    auto empty = ColumnStore::empty();
    EXPECT_EQ(empty.row_count(), 0u);
    EXPECT_EQ(empty.column_count(), builtin_schema().size());
    auto back = decode_store(encode_store(empty));
    EXPECT_TRUE(back == empty);
}

TEST(Store, HeaderLayout) {
    auto data = testing::make_synthetic({3, 0.2, 5});
    auto bytes = encode_store(data.store);
    ASSERT_GE(bytes.size(), 18u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "OTED");
    EXPECT_EQ(bytes[4] | (bytes[5] << 8), 1);
    EXPECT_EQ(read_u64(bytes, 6), 3u);
    std::uint32_t ncols = bytes[14] | (bytes[15] << 8) | (bytes[16] << 16) | (bytes[17] << 24);
    EXPECT_EQ(ncols, builtin_schema().size());
}

TEST(Store, IntegerPayloadBits) {
    // One Integer column schema: rows {5, null, -1}.
    Schema schema({{"N", "N", DataType::Integer, false, 1}});
    StoreBuilder b(schema);
    std::vector<Cell> row(1);
    row[0] = Value(std::int64_t{5});
    b.append_row(row);
    row[0].reset();
    b.append_row(row);
    row[0] = Value(std::int64_t{-1});
    b.append_row(row);
    auto store = std::move(b).finish();
    auto bytes = encode_store(store);
    // header 18 + name len 4 + "N" 1 + tag 1 + offset 8 + length 8
    std::size_t dir = 18;
    EXPECT_EQ(bytes[dir + 5], 2);  // Integer tag
    auto offset = read_u64(bytes, dir + 6);
    auto length = read_u64(bytes, dir + 14);
    EXPECT_EQ(length, 1u + 3 * 8);
    EXPECT_EQ(bytes[offset], 0b010);
    EXPECT_EQ(read_u64(bytes, offset + 1), 5u);
    EXPECT_EQ(read_u64(bytes, offset + 17), ~std::uint64_t{0});
    EXPECT_TRUE(decode_store(bytes, schema) == store);
}

TEST(Store, SyntheticRoundTripThroughFile) {
    auto dir = fs::temp_directory_path() / "oted_store_test";
    fs::create_directories(dir);
    for (double density : {0.0, 0.3, 1.0}) {
        auto data = testing::make_synthetic({257, density, 9});
        auto p1 = dir / "a.oted", p2 = dir / "b.oted";
        write_store(data.store, p1);
        write_store(data.store, p2);
        auto back = read_store(p1);
        EXPECT_TRUE(back == data.store);
        for (std::size_t c = 0; c < back.column_count(); ++c) {
            for (std::size_t r = 0; r < back.row_count(); ++r) ASSERT_EQ(back.cell(r, c), data.store.cell(r, c));
        }
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::string s1((std::istreambuf_iterator<char>(f1)), {}), s2((std::istreambuf_iterator<char>(f2)), {});
        EXPECT_EQ(s1, s2);
    }
    fs::remove_all(dir);
}

TEST(Store, BadMagic) {
    auto bytes = encode_store(ColumnStore::empty());
    bytes[0] = 'X';
    try {
        decode_store(bytes);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.code(), "bad_magic");
        EXPECT_EQ(std::string(e.what()), "bad magic");
    }
}

TEST(Store, BadVersion) {
    auto bytes = encode_store(ColumnStore::empty());
    bytes[4] = 2;
    try {
        decode_store(bytes);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.code(), "unsupported_version");
    }
}

TEST(Store, EveryTruncationFails) {
    auto data = testing::make_synthetic({20, 0.3, 2});
    auto bytes = encode_store(data.store);
    for (std::size_t n = 0; n < bytes.size(); n += 7) {
        std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
        EXPECT_THROW(decode_store(cut), FormatError) << n;
    }
}

TEST(Store, MissingFile) { EXPECT_THROW(read_store("/nonexistent/x.oted"), IoError); }

TEST(Store, DistinctValues) {
    Schema schema({{"C", "C", DataType::Factor, false, 1}});
    StoreBuilder b(schema);
    for (const char* v : {"France", "France", "Poland"}) {
        std::vector<Cell> row{Value(std::string(v))};
        b.append_row(row);
    }
    auto store = std::move(b).finish();
    EXPECT_EQ(column_distinct_values(store, "C"), (std::vector<std::string>{"France", "Poland"}));

    auto all_null = testing::make_synthetic({10, 1.0, 1});
    EXPECT_TRUE(column_distinct_values(all_null.store, "ISO_COUNTRY_CODE").empty());
    EXPECT_THROW(column_distinct_values(all_null.store, "CAE_NAME"), ValidationError);
}

TEST(Store, DistinctValuesMatchRowScan) {
    Schema schema({{"C", "C", DataType::Factor, false, 1}});
    StoreBuilder b(schema);
    std::mt19937_64 rng(8);
    std::set<std::string> seen;
    for (int i = 0; i < 5000; ++i) {
        auto k = testing::uniform(rng, 0, 120);
        std::vector<Cell> row(1);
        if (k < 100) {
            row[0] = Value("v" + std::to_string(k));
            seen.insert("v" + std::to_string(k));
        }
        b.append_row(row);
    }
    auto store = std::move(b).finish();
    EXPECT_EQ(column_distinct_values(store, "C"), std::vector<std::string>(seen.begin(), seen.end()));
}

TEST(Store, ColumnInvariants) {
    EXPECT_THROW(Column::strings(NullMask(2), {0, 3, 2}, "abc"), FormatError);
    EXPECT_THROW(Column::strings(NullMask(1), {0, 2}, "abc"), FormatError);
    EXPECT_THROW(Column::factors(NullMask(1), {"a"}, {3}), FormatError);
    EXPECT_THROW(Column::integers(NullMask(2), {1}), FormatError);
}

}  // namespace
}  // namespace oted
