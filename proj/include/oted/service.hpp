#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oted/analytics.hpp"
#include "oted/cpv.hpp"
#include "oted/ingest.hpp"
#include "oted/store.hpp"

namespace oted {

struct AppConfig {
    std::filesystem::path store_path;
    std::filesystem::path cpv_path;
    std::filesystem::path static_dir;  // optional web client assets
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string link_template = std::string(kDefaultLinkTemplate);
    std::size_t default_page_size = 50;
    std::size_t max_page_size = 1000;
    std::size_t max_links = kDefaultMaxLinks;
    std::size_t max_depth = 10;
    std::size_t max_conditions = 200;

    /// Throws ValidationError when paths are missing or the port is out of range.
    void check() const;
};

/// Everything a request reads. Replaced as a whole, never mutated.
struct Snapshot {
    ColumnStore store;
    CpvTable cpv;
};

std::shared_ptr<const Snapshot> load_snapshot(const AppConfig& config);

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

using QueryParams = std::multimap<std::string, std::string>;

/// Request handlers for the /api endpoints, independent of the HTTP transport.
/// Every handler is a pure function of (request, current snapshot).
class Service {
public:
    Service(AppConfig config, std::shared_ptr<const Snapshot> snapshot);

    const AppConfig& config() const { return config_; }
    std::shared_ptr<const Snapshot> snapshot() const;
    /// Atomic swap; in-flight requests keep the snapshot they started with.
    void replace_snapshot(std::shared_ptr<const Snapshot> next);

    HttpResponse get_schema() const;
    HttpResponse post_query(std::string_view body) const;
    HttpResponse post_export(std::string_view body) const;
    HttpResponse post_sankey(std::string_view body) const;
    HttpResponse get_cpv(const QueryParams& params) const;
    HttpResponse get_quest(const QueryParams& params) const;

    /// Routes by method and path; unknown routes give 404, exceptions give a
    /// structured 500.
    HttpResponse handle(std::string_view method, std::string_view path, const QueryParams& params,
                        std::string_view body) const;

private:
    AppConfig config_;
    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
};

/// HTTP/1.1 front end over a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Port 0 binds an ephemeral port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace oted
