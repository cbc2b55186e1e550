#include <httplib.h>

#include "oted/error.hpp"
#include "oted/service.hpp"

namespace oted {

namespace {

constexpr const char* kFallbackPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>oted</title></head>"
    "<body><p>API: /api/schema, /api/query, /api/export, /api/sankey, /api/cpv, /api/quest</p>"
    "</body></html>";

}  // namespace

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) {}

    void reply(const httplib::Request& req, httplib::Response& res) {
        QueryParams params(req.params.begin(), req.params.end());
        auto out = service.handle(req.method, req.path, params, req.body);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_content(out.body, out.content_type);
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto& srv = impl_->server;
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->reply(req, res); };
    srv.Get(R"(/api/.*)", handler);
    srv.Post(R"(/api/.*)", handler);

    const auto& dir = service.config().static_dir;
    if (!dir.empty()) {
        if (!srv.set_mount_point("/", dir.string())) {
            throw IoError(dir.string(), "cannot serve static directory");
        }
    } else {
        srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kFallbackPage, "text/html; charset=utf-8");
        });
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    if (port == 0) {
        int bound = srv.bind_to_any_port(host);
        if (bound < 0) throw IoError(host, "cannot bind an ephemeral port");
        return bound;
    }
    if (!srv.bind_to_port(host, port)) throw IoError(host + ":" + std::to_string(port), "cannot bind");
    return port;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace oted
