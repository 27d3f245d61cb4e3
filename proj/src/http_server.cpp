#include "parity/api.hpp"
#include "parity/error.hpp"

// After the Eigen headers: <resolv.h> defines a `_res` macro.
#include <httplib.h>

namespace parity {

struct HttpServer::Impl {
    const Api& api;
    httplib::Server server;
};

namespace {

void forward(const Api& api, const httplib::Request& req, httplib::Response& res) {
    ApiRequest r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query[k] = v;
    const auto out = api.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(const Api& api) : impl_(new Impl{api, {}}) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { forward(impl_->api, req, res); };
    impl_->server.Get(R"(/.*)", handler);
    impl_->server.Post(R"(/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) fail(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace parity
