// Command-line front end: ingest CSV, query a store, browse CPV, run the server.
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oted/cpv.hpp"
#include "oted/error.hpp"
#include "oted/filter.hpp"
#include "oted/ingest.hpp"
#include "oted/query.hpp"
#include "oted/schema.hpp"
#include "oted/service.hpp"
#include "oted/store.hpp"

namespace {

oted::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw oted::IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_ingest(const std::vector<std::string>& inputs, const std::string& output, bool quiet) {
    std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
    auto result = oted::ingest_csv(paths);
    oted::write_store(result.store, output);
    if (!quiet) std::cerr << result.report.to_text();
    std::cout << "wrote " << result.store.row_count() << " rows to " << output << "\n";
    return 0;
}

int run_query(const std::string& store_path, const std::string& filter_path,
              const std::string& sort, std::size_t limit, std::size_t offset, const std::string& csv_out) {
    auto store = oted::read_store(store_path);
    auto expr = oted::parse_filter(read_text(filter_path));
    auto issues = oted::validate(expr, store.schema());
    if (!issues.empty()) {
        for (const auto& i : issues) std::cerr << i.path << ": " << i.message << "\n";
        return 2;
    }
    auto rows = oted::evaluate(expr, store);
    std::optional<oted::SortSpec> spec;
    if (!sort.empty()) spec = oted::parse_sort_spec(sort);

    if (!csv_out.empty()) {
        auto sorted = rows;
        if (spec) oted::sort_rows(store, sorted, *spec);
        std::ofstream out(csv_out, std::ios::binary);
        if (!out) throw oted::IoError(csv_out, "cannot open for writing");
        out << oted::export_csv(store, sorted);
    }

    auto page = oted::select_page(store, std::move(rows), spec, offset, limit);
    std::cout << "matches: " << page.total_matches << "\n";
    for (const auto& row : page.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const auto& [name, cell] : row) {
            if (!cell) continue;
            std::visit([&](const auto& v) { obj[name] = v; }, *cell);
        }
        std::cout << obj.dump() << "\n";
    }
    return 0;
}

int run_cpv(const std::string& file, const std::string& search, std::optional<std::size_t> digits) {
    auto table = oted::load_cpv(file);
    for (const auto& e : table.search(search, digits)) {
        std::cout << e.code << "\t" << e.description << "\n";
    }
    return 0;
}

int run_schema() {
    const auto& schema = oted::builtin_schema();
    nlohmann::ordered_json fields = nlohmann::ordered_json::array();
    for (const auto& f : schema.fields()) {
        nlohmann::ordered_json ops = nlohmann::ordered_json::array();
        for (auto op : oted::allowed_operators(f.data_type)) ops.push_back(std::string(oted::to_string(op)));
        fields.push_back({{"name", f.source_name},
                          {"display_name", f.display_name},
                          {"type", std::string(oted::to_string(f.data_type))},
                          {"highlighted", f.highlighted},
                          {"catalog_row", f.catalog_row},
                          {"operators", std::move(ops)}});
    }
    std::cout << nlohmann::ordered_json{{"fields", std::move(fields)}}.dump(2) << "\n";
    return 0;
}

int run_serve(oted::AppConfig config) {
    config.check();
    oted::Service service(config, oted::load_snapshot(config));
    oted::HttpServer server(service);
    int port = server.bind(config.host, config.port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << config.host << ":" << port << "\n";
    server.listen();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contract award notice browser"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "Convert CSV exports into a column store");
    std::vector<std::string> inputs;
    std::string output;
    bool quiet = false;
    ingest->add_option("--input,-i", inputs, "CSV files")->required()->check(CLI::ExistingFile);
    ingest->add_option("--output,-o", output, "Store file to write")->required();
    ingest->add_flag("--quiet,-q", quiet, "Suppress the ingest report");

    auto* query = app.add_subcommand("query", "Evaluate a filter expression against a store");
    std::string store_path, filter_path, sort, csv_out;
    std::size_t limit = 20, offset = 0;
    query->add_option("--store,-s", store_path)->required()->check(CLI::ExistingFile);
    query->add_option("--filter,-f", filter_path, "JSON filter file, or - for stdin")->required();
    query->add_option("--sort", sort, "FIELD:asc or FIELD:desc");
    query->add_option("--limit", limit)->check(CLI::Range(1, 1000000));
    query->add_option("--offset", offset);
    query->add_option("--csv", csv_out, "Write every match as CSV");

    auto* cpv = app.add_subcommand("cpv", "Search the CPV nomenclature");
    std::string cpv_file, cpv_search;
    std::optional<std::size_t> digits;
    cpv->add_option("--file", cpv_file)->required()->check(CLI::ExistingFile);
    cpv->add_option("--search", cpv_search, "Code prefix or description text");
    cpv->add_option("--digits", digits, "Keep codes with at most this many significant digits")
        ->check(CLI::Range(2, 8));

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    oted::AppConfig config;
    std::string static_dir;
    serve->add_option("--store", config.store_path)->required();
    serve->add_option("--cpv", config.cpv_path)->required();
    serve->add_option("--host", config.host);
    serve->add_option("--port", config.port);
    serve->add_option("--link-template", config.link_template);
    serve->add_option("--static-dir", static_dir);

    app.add_subcommand("schema", "Print the field schema as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return run_ingest(inputs, output, quiet);
        if (*query) return run_query(store_path, filter_path, sort, limit, offset, csv_out);
        if (*cpv) return run_cpv(cpv_file, cpv_search, digits);
        if (*serve) {
            config.static_dir = static_dir;
            return run_serve(config);
        }
        return run_schema();
    } catch (const oted::Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
