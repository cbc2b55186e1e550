#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "oted/cpv.hpp"
#include "oted/error.hpp"

namespace oted {
namespace {

const CpvTable& official() {
    static const CpvTable table = load_cpv(OTED_CPV_FILE);
    return table;
}

TEST(Cpv, OfficialCount) { EXPECT_EQ(official().size(), 9454u); }

TEST(Cpv, DivisionThirty) {
    EXPECT_EQ(official().lookup("30"),
              "Office and computing machinery, equipment and supplies except furniture and software packages");
}

TEST(Cpv, ScannerAdapters) {
    const CpvEntry* hit = nullptr;
    for (const auto& e : official().entries()) {
        if (e.description == "Scanner transparency adapters") hit = &e;
    }
    ASSERT_NE(hit, nullptr);
    EXPECT_TRUE(std::string(hit->stem()).starts_with("3012453"));
    EXPECT_EQ(official().lookup(hit->stem()), "Scanner transparency adapters");
    EXPECT_EQ(official().lookup(std::string(hit->stem()) + "7"), "Scanner transparency adapters");
    EXPECT_EQ(official().lookup(std::string(hit->stem()) + "-7"), "Scanner transparency adapters");
}

TEST(Cpv, NotFound) {
    EXPECT_EQ(official().lookup("00"), std::nullopt);
    EXPECT_EQ(official().find("abc"), nullptr);
}

TEST(Cpv, DivisionOf) {
    EXPECT_EQ(division_of("30124530"), "30");
    EXPECT_EQ(division_of("301"), "30");
    EXPECT_THROW(division_of("9"), ValidationError);
    EXPECT_THROW(division_of("3x"), ValidationError);
}

TEST(Cpv, SearchDivisionLevel) {
    auto divisions = official().search("", 2);
    EXPECT_EQ(divisions.size(), 45u);
    for (const auto& e : divisions) EXPECT_TRUE(e.code.ends_with("000000")) << e.code;
}

TEST(Cpv, SearchOffice) {
    auto hits = official().search("office");
    EXPECT_TRUE(std::any_of(hits.begin(), hits.end(), [](const auto& e) { return e.code == "30000000"; }));
    EXPECT_TRUE(official().search("zzzz-no-such-thing").empty());
    EXPECT_THROW(official().search("", 1), ValidationError);
    EXPECT_THROW(official().search("", 9), ValidationError);
}

TEST(Cpv, SearchByCodePrefixIsSorted) {
    auto hits = official().search("3012");
    ASSERT_FALSE(hits.empty());
    EXPECT_TRUE(std::is_sorted(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.code < b.code; }));
}

TEST(Cpv, DigitLimitsNest) {
    for (std::size_t d = 2; d < 8; ++d) {
        auto coarse = official().search("", d);
        auto fine = official().search("", d + 1);
        EXPECT_TRUE(std::includes(fine.begin(), fine.end(), coarse.begin(), coarse.end(),
                                  [](const auto& a, const auto& b) { return a.code < b.code; }));
        EXPECT_LE(coarse.size(), fine.size());
    }
}

TEST(Cpv, TableInvariants) {
    for (const auto& e : official().entries()) {
        ASSERT_TRUE(official().find(e.division()) != nullptr) << e.code;
        ASSERT_EQ(official().lookup(e.code), e.description);
    }
}

TEST(LoadCpv, EmptyAndErrors) {
    std::istringstream empty("");
    EXPECT_EQ(load_cpv(empty).size(), 0u);

    std::istringstream dup("code,description\n03000000-1,A\n09000000-3,B\n03000000,C\n");
    try {
        load_cpv(dup, "dup.csv");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.code(), "duplicate_code");
        std::string msg = e.what();
        EXPECT_NE(msg.find("duplicate code"), std::string::npos);
        EXPECT_NE(msg.find(":4:"), std::string::npos);
        EXPECT_NE(msg.find("line 2"), std::string::npos);
    }

    std::istringstream bad("code,description\n123,A\n");
    try {
        load_cpv(bad, "bad.csv");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.code(), "malformed_row");
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    }
}

TEST(LoadCpv, CheckDigitKept) {
    std::istringstream in("03000000-1,Agricultural products\n");
    auto t = load_cpv(in);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.entries()[0].code, "030000001");
    EXPECT_EQ(t.entries()[0].stem(), "03000000");
}

}  // namespace
}  // namespace oted
