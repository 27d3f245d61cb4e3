#pragma once

// JSON request handling for the service, independent of any transport.
// HttpServer binds it to cpp-httplib.

#include <map>
#include <memory>
#include <string>

#include "parity/engine.hpp"

namespace parity {

struct ApiRequest {
    std::string method;  // "GET" or "POST"
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    Json body;
};

int http_status(ErrorCode code);

/// Routes:
///   POST /investors                      {id, preference}
///   GET  /investors/{id}
///   POST /investors/{id}/deposit         {amount, preference?}
///   POST /investors/{id}/withdraw        {fraction}
///   POST /investors/{id}/withdraw/cancel
///   POST /investors/{id}/preference      {preference}
///   GET  /quote?mode=risk&risk=… | mode=return&ret=… | mode=weights&w_alpha=…&w_beta=…&w_gamma=…
///   GET  /line
///   GET  /frontier?points=n
///   GET  /fees/preview?action=deposit|preference|withdraw&investor=…&amount=…&preference_change=true
///   GET  /report?cycle=n
///   GET  /state
///   POST /admin/rebalance
///   POST /admin/prices                   {alpha_price, beta_price, gamma_price, as_of?}
///   POST /admin/funds                    {funds} or {} to re-estimate from stored prices
///   POST /admin/line                     {slope, intercept}
///   POST /admin/ingest                   {rows}
///   POST /admin/deliver                  {alpha_rcvd, beta_rcvd, gamma_rcvd, cash_rcvd} or {requested: true}
/// Every POST body may carry "date"; it defaults to the engine clock.
class Api {
public:
    explicit Api(Engine& engine) : engine_(engine) {}
    ApiResponse handle(const ApiRequest& request) const;

private:
    ApiResponse route(const ApiRequest& request) const;
    Engine& engine_;
};

class HttpServer {
public:
    explicit HttpServer(const Api& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to `port` (0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace parity
