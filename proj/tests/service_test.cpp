#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oted/filter.hpp"
#include "oted/quest.hpp"
#include "oted/service.hpp"
#include "synthetic.hpp"

namespace oted {
namespace {

using nlohmann::json;

const char* kWorked = R"({"and":[
  {"field":"Contracting_Authority_Country","op":"equal","args":["Belgium"]},
  {"or":[{"field":"CPV_Code","op":"begins_with","args":["301"]},
         {"field":"CPV_Code","op":"begins_with","args":["302"]}]},
  {"field":"Contract_Value_Euros","op":"greater","args":[1000000]}]})";

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        auto data = testing::make_synthetic({4000, 0.1, 404});
        snapshot_ = new std::shared_ptr<const Snapshot>(
            std::make_shared<const Snapshot>(Snapshot{std::move(data.store), load_cpv(OTED_CPV_FILE)}));
    }
    static void TearDownTestSuite() { delete snapshot_; }

    ServiceTest() : service(AppConfig{}, *snapshot_) {}

    json body_of(const HttpResponse& r) { return json::parse(r.body); }
    std::string query_body(const std::string& filter, const std::string& extra = "") {
        return R"({"filter":)" + filter + extra + "}";
    }

    static std::shared_ptr<const Snapshot>* snapshot_;
    Service service;
};
std::shared_ptr<const Snapshot>* ServiceTest::snapshot_ = nullptr;

TEST_F(ServiceTest, Schema) {
    auto r = service.get_schema();
    ASSERT_EQ(r.status, 200);
    auto b = body_of(r);
    EXPECT_EQ(b["fields"].size(), builtin_schema().size());
    EXPECT_EQ(b["catalog_rows"], 48);
    int highlighted = 0;
    for (const auto& f : b["fields"]) {
        highlighted += f["highlighted"].get<bool>();
        if (f["name"] == "ISO_COUNTRY_CODE") {
            EXPECT_EQ(f["display_name"], "Contracting_Authority_Country");
            auto names = testing::synthetic_countries();
            std::sort(names.begin(), names.end());
            EXPECT_EQ(f["values"], json(names));
        }
        if (f["type"] == "Factor") EXPECT_TRUE(f.contains("values"));
        else EXPECT_FALSE(f.contains("values"));
    }
    EXPECT_EQ(highlighted, 9);
    EXPECT_EQ(b["operators"]["Factor"], json({"equal", "not_equal", "is_null", "is_not_null"}));
    EXPECT_EQ(b["operators"]["String"].size(), 13u);
    EXPECT_EQ(b["operators"]["Integer"].size(), 11u);
}

TEST_F(ServiceTest, QueryWorkedFilter) {
    auto r = service.post_query(query_body(kWorked, R"(,"sort":"VALUE_EURO:desc","limit":5)"));
    ASSERT_EQ(r.status, 200) << r.body;
    auto b = body_of(r);
    auto expected = evaluate(parse_filter(kWorked), service.snapshot()->store).size();
    EXPECT_EQ(b["total_matches"], expected);
    EXPECT_GT(expected, 0u);
    ASSERT_LE(b["rows"].size(), 5u);
    std::int64_t prev = std::numeric_limits<std::int64_t>::max();
    for (const auto& row : b["rows"]) {
        EXPECT_EQ(row["Contracting_Authority_Country"], "Belgium");
        EXPECT_TRUE(row["Award_Notice_Id_Link"].get<std::string>().starts_with("https://"));
        auto v = row["Contract_Value_Euros"].get<std::int64_t>();
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST_F(ServiceTest, QueryPaging) {
    const std::string all = R"({"field":"YEAR","op":"is_not_null"})";
    auto b = body_of(service.post_query(query_body(all)));
    EXPECT_EQ(b["rows"].size(), 50u);
    EXPECT_EQ(b["limit"], 50);
    b = body_of(service.post_query(query_body(all, R"(,"offset":1000000,"limit":10)")));
    EXPECT_TRUE(b["rows"].empty());
    EXPECT_GT(b["total_matches"].get<std::size_t>(), 0u);
    b = body_of(service.post_query(query_body(all, R"(,"sort":{"field":"Dispatch_Date","direction":"asc"},"limit":1000)")));
    EXPECT_EQ(b["rows"].size(), 1000u);
}

TEST_F(ServiceTest, QueryErrors) {
    const std::string all = R"({"field":"YEAR","op":"is_not_null"})";
    auto r = service.post_query(query_body(all, R"(,"limit":0)"));
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(body_of(r)["error"]["message"], "limit must be ≥ 1");
    EXPECT_EQ(service.post_query(query_body(all, R"(,"limit":1001)")).status, 400);
    EXPECT_EQ(service.post_query(query_body(all, R"(,"offset":-1)")).status, 400);
    EXPECT_EQ(service.post_query(query_body(all, R"(,"sort":"NOPE:asc")")).status, 400);

    r = service.post_query(query_body(R"({"and":[{"field":"ISO_COUNTRY_CODE","op":"begins_with","args":["B"]}]})"));
    EXPECT_EQ(r.status, 400);
    auto b = body_of(r);
    EXPECT_EQ(b["error"]["details"][0]["code"], "operator_not_allowed");
    EXPECT_EQ(b["error"]["details"][0]["message"], "operator begins_with not allowed for Factor");
    EXPECT_EQ(b["error"]["details"][0]["path"], "/filter/and/0/op");

    for (const char* bad : {"", "not json", "[]", R"({"nofilter":1})", R"({"filter":{"and":[]}})",
                            R"({"filter":{"field":"YEAR","op":"equal","args":["x"]}})"}) {
        auto resp = service.post_query(bad);
        EXPECT_EQ(resp.status, 400) << bad;
        EXPECT_TRUE(body_of(resp)["error"].contains("code")) << bad;
    }
}

TEST_F(ServiceTest, Guardrails) {
    auto nested = [](int depth) {
        std::string s;
        for (int i = 0; i < depth; ++i) s += R"({"and":[)";
        s += R"({"field":"YEAR","op":"is_null"})";
        for (int i = 0; i < depth; ++i) s += "]}";
        return s;
    };
    EXPECT_EQ(service.post_query(query_body(nested(10))).status, 200);
    EXPECT_EQ(service.post_query(query_body(nested(11))).status, 413);
    EXPECT_EQ(service.post_query(query_body(nested(500))).status, 413);

    auto wide = [](int n) {
        std::string s = R"({"or":[)";
        for (int i = 0; i < n; ++i) s += std::string(i ? "," : "") + R"({"field":"YEAR","op":"equal","args":[)" + std::to_string(i) + "]}";
        return s + "]}";
    };
    EXPECT_EQ(service.post_query(query_body(wide(200))).status, 200);
    EXPECT_EQ(service.post_query(query_body(wide(201))).status, 413);
    EXPECT_EQ(service.post_sankey(query_body(wide(201))).status, 413);
    EXPECT_EQ(service.post_export(query_body(nested(11))).status, 413);
}

TEST_F(ServiceTest, Export) {
    auto r = service.post_export(query_body(R"({"field":"CAE_NAME","op":"equal","args":["nobody"]})"));
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.content_type, "text/csv; charset=utf-8");
    ASSERT_EQ(r.headers.size(), 1u);
    EXPECT_EQ(r.headers[0].first, "Content-Disposition");
    EXPECT_TRUE(r.headers[0].second.starts_with("attachment"));
    EXPECT_EQ(std::count(r.body.begin(), r.body.end(), '\n'), 1);

    r = service.post_export(query_body(kWorked, R"(,"sort":"VALUE_EURO:asc")"));
    std::istringstream in(r.body);
    auto back = ingest_csv_stream(in, "export").store;
    auto total = body_of(service.post_query(query_body(kWorked)))["total_matches"].get<std::size_t>();
    ASSERT_EQ(back.row_count(), total);
    for (std::size_t i = 1; i < back.row_count(); ++i) {
        EXPECT_LE(back.column("VALUE_EURO").integer_at(i - 1), back.column("VALUE_EURO").integer_at(i));
    }
}

TEST_F(ServiceTest, SankeyMatchesQuery) {
    for (const std::string filter : {std::string(kWorked), std::string(R"({"field":"YEAR","op":"is_not_null"})"),
                                     std::string(R"({"field":"CAE_NAME","op":"equal","args":["Authority 3"]})")}) {
        auto q = body_of(service.post_query(query_body(filter)));
        auto s = body_of(service.post_sankey(query_body(filter, R"(,"max_links":20)")));
        EXPECT_EQ(s["stats"]["n_contracts"], q["total_matches"]);
        EXPECT_LE(s["links"].size(), 20u);
        for (const auto& l : s["links"]) {
            EXPECT_EQ(s["authorities"][l["source"].get<std::size_t>()]["name"], l["authority"]);
            EXPECT_EQ(s["contractors"][l["target"].get<std::size_t>()]["name"], l["contractor"]);
        }
    }
}

TEST_F(ServiceTest, SankeySingleRow) {
    const auto& store = service.snapshot()->store;
    const auto& ids = store.column("ID_NOTICE_CAN");
    std::string id;
    for (std::size_t r = 0; r < store.row_count() && id.empty(); ++r) {
        if (ids.is_null(r)) continue;
        auto rows = evaluate(make_condition("ID_NOTICE_CAN", Operator::Equal, {std::string(ids.text_at(r))}), store);
        if (rows.size() == 1) id = ids.text_at(r);
    }
    ASSERT_FALSE(id.empty());
    auto s = body_of(service.post_sankey(query_body(R"({"field":"ID_NOTICE_CAN","op":"equal","args":[")" + id + R"("]})")));
    ASSERT_EQ(s["links"].size(), 1u);
    EXPECT_EQ(s["links"][0]["notice_links"], json({make_notice_link(id, kDefaultLinkTemplate).value()}));
    EXPECT_EQ(s["stats"]["n_contracts"], 1);
    EXPECT_EQ(s["truncated"], false);
}

TEST_F(ServiceTest, Cpv) {
    auto b = body_of(service.get_cpv({}));
    EXPECT_EQ(b["total"], 9454);
    EXPECT_EQ(b["entries"].size(), 50u);
    b = body_of(service.get_cpv({{"limit", "10000"}}));
    EXPECT_EQ(b["entries"].size(), 9454u);
    b = body_of(service.get_cpv({{"digits", "2"}, {"limit", "100"}}));
    EXPECT_EQ(b["total"], 45);
    b = body_of(service.get_cpv({{"query", "office"}, {"digits", "2"}}));
    EXPECT_EQ(b["entries"][0]["code"], "30000000");
    EXPECT_EQ(service.get_cpv({{"digits", "1"}}).status, 400);
    EXPECT_EQ(service.get_cpv({{"digits", "x"}}).status, 400);
    EXPECT_EQ(service.get_cpv({{"limit", "0"}}).status, 400);
}

TEST_F(ServiceTest, Quest) {
    auto a = service.get_quest({{"seed", "42"}});
    auto b = service.get_quest({{"seed", "42"}});
    ASSERT_EQ(a.status, 200) << a.body;
    EXPECT_EQ(a.body, b.body);
    auto q = body_of(a);
    EXPECT_EQ(q["seed"], 42);
    auto check = service.post_query(R"({"filter":)" + q["filter"].dump() + "}");
    ASSERT_EQ(check.status, 200);
    EXPECT_EQ(body_of(check)["total_matches"], q["quest"]["support"]);
    EXPECT_GE(q["quest"]["support"].get<std::size_t>(), kDefaultMinSupport);

    auto random = body_of(service.get_quest({}));
    EXPECT_TRUE(random.contains("seed"));
    EXPECT_EQ(service.get_quest({{"min_support", "100000"}}).status, 404);
}

TEST_F(ServiceTest, RoutingAndPurity) {
    EXPECT_EQ(service.handle("GET", "/api/nope", {}, "").status, 404);
    EXPECT_EQ(service.handle("GET", "/api/query", {}, "").status, 404);
    auto body = query_body(kWorked);
    EXPECT_EQ(service.handle("POST", "/api/query", {}, body).body, service.handle("POST", "/api/query", {}, body).body);
    EXPECT_EQ(service.handle("POST", "/api/sankey", {}, body).body, service.handle("POST", "/api/sankey", {}, body).body);
}

TEST_F(ServiceTest, SnapshotSwap) {
    Service local(AppConfig{}, *snapshot_);
    auto before = local.snapshot();
    local.replace_snapshot(std::make_shared<const Snapshot>(Snapshot{ColumnStore::empty(), before->cpv}));
    EXPECT_EQ(before->store.row_count(), 4000u);
    auto b = body_of(local.post_query(R"({"filter":{"field":"YEAR","op":"is_null"}})"));
    EXPECT_EQ(b["total_matches"], 0);
}

TEST_F(ServiceTest, InvalidUtf8InData) {
    const auto& schema = builtin_schema();
    StoreBuilder b;
    std::vector<Cell> row(schema.size());
    row[*schema.index_of("CAE_NAME")] = Value(std::string("Caf\xE9"));
    b.append_row(row);
    Service local(AppConfig{}, std::make_shared<const Snapshot>(Snapshot{std::move(b).finish(), service.snapshot()->cpv}));
    auto r = local.post_query(R"({"filter":{"field":"CAE_NAME","op":"is_not_null"}})");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(body_of(r)["rows"][0]["Contracting_Authority_Name"], "Caf\uFFFD");
    EXPECT_EQ(local.post_sankey(R"({"filter":{"field":"CAE_NAME","op":"is_not_null"}})").status, 200);
}

TEST(AppConfig, Check) {
    AppConfig c;
    c.store_path = "/nonexistent";
    c.cpv_path = OTED_CPV_FILE;
    EXPECT_THROW(c.check(), ValidationError);
    c.store_path = OTED_CPV_FILE;
    EXPECT_NO_THROW(c.check());
    c.port = 0;
    EXPECT_THROW(c.check(), ValidationError);
    c.port = 65536;
    EXPECT_THROW(c.check(), ValidationError);
}

TEST_F(ServiceTest, OverHttp) {
    HttpServer server(service);
    int port = server.bind("127.0.0.1", 0);
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto schema = client.Get("/api/schema");
    ASSERT_TRUE(schema);
    EXPECT_EQ(schema->status, 200);
    EXPECT_EQ(schema->get_header_value("Content-Type"), "application/json");

    auto query = client.Post("/api/query", query_body(kWorked), "application/json");
    ASSERT_TRUE(query);
    EXPECT_EQ(json::parse(query->body)["total_matches"],
              body_of(service.post_query(query_body(kWorked)))["total_matches"]);

    auto cpv = client.Get("/api/cpv?query=office&digits=2");
    ASSERT_TRUE(cpv);
    EXPECT_EQ(json::parse(cpv->body)["entries"][0]["code"], "30000000");

    auto exported = client.Post("/api/export", query_body(kWorked), "application/json");
    ASSERT_TRUE(exported);
    EXPECT_EQ(exported->get_header_value("Content-Type"), "text/csv; charset=utf-8");

    auto bad = client.Post("/api/query", "{", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    auto root = client.Get("/");
    ASSERT_TRUE(root);
    EXPECT_EQ(root->status, 200);

    server.stop();
    t.join();
}

}  // namespace
}  // namespace oted
