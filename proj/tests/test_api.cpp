#include <doctest.h>

#include <thread>

#include "parity/api.hpp"
#include "parity/error.hpp"

// Eigen first: <resolv.h> defines a `_res` macro.
#include <httplib.h>

using namespace parity;

namespace {

ApiResponse post(const Api& api, const std::string& path, const Json& body) {
    return api.handle({"POST", path, {}, body.dump()});
}

ApiResponse get(const Api& api, const std::string& path, std::map<std::string, std::string> query = {}) {
    return api.handle({"GET", path, std::move(query), ""});
}

void seed(const Api& api) {
    REQUIRE(post(api, "/admin/funds",
                 {{"date", "2024-01-02"},
                  {"funds",
                   {{"alpha", {{"sigma", 0.20}, {"exp_return", 0.12}}},
                    {"beta", {{"sigma", 0.10}, {"exp_return", 0.07}}},
                    {"gamma", {{"sigma", 0.04}, {"exp_return", 0.035}}}}}})
                .status == 200);
    REQUIRE(post(api, "/admin/prices", {{"alpha_price", "10"}, {"beta_price", "5"}, {"gamma_price", "2"}}).status == 200);
}

}  // namespace

TEST_CASE("status mapping") {
    CHECK(http_status(ErrorCode::UnknownInvestor) == 404);
    CHECK(http_status(ErrorCode::NotReady) == 503);
    CHECK(http_status(ErrorCode::Conflict) == 409);
    CHECK(http_status(ErrorCode::Parse) == 400);
    CHECK(http_status(ErrorCode::BelowRiskFree) == 422);
}

TEST_CASE("api before a line exists") {
    Engine engine;
    Api api(engine);
    const auto q = get(api, "/quote", {{"mode", "risk"}, {"risk", "0.1"}});
    CHECK(q.status == 503);
    CHECK(q.body.at("error") == "not-ready");
    CHECK(get(api, "/line").status == 503);
    CHECK(get(api, "/nowhere").status == 404);
    CHECK(api.handle({"POST", "/investors", {}, "{not json"}).status == 400);
}

TEST_CASE("investor lifecycle through the api") {
    Engine engine;
    Api api(engine);
    seed(api);

    auto r = post(api, "/investors", {{"id", "kim"}, {"preference", {{"mode", "risk"}, {"risk", 0.1}}}});
    CHECK(r.status == 200);
    CHECK(r.body.at("result").at("id") == "kim");
    CHECK(post(api, "/investors", {{"id", "kim"}, {"preference", {{"mode", "risk"}, {"risk", 0.1}}}}).status == 409);

    r = post(api, "/investors/kim/deposit", {{"amount", "400"}});
    CHECK(r.status == 200);
    CHECK(r.body.at("result").at("fee") == "2");

    const auto preview = get(api, "/fees/preview", {{"action", "deposit"}, {"amount", "400"}});
    CHECK(preview.body.at("fee") == "2");
    CHECK(get(api, "/fees/preview", {{"action", "preference"}, {"investor", "kim"}}).body.at("fee") == "0.398");

    CHECK(post(api, "/admin/rebalance", Json::object()).status == 200);
    CHECK(post(api, "/admin/deliver", {{"requested", true}, {"date", "2024-01-03"}}).status == 200);
    CHECK(post(api, "/admin/prices", {{"alpha_price", "10"}, {"beta_price", "5"}, {"gamma_price", "2"}}).status == 200);
    CHECK(post(api, "/admin/rebalance", Json::object()).status == 200);

    const auto acct = get(api, "/investors/kim");
    CHECK(acct.status == 200);
    CHECK(acct.body.at("intrinsic_value").get<Decimal>() > Decimal(397));
    CHECK(acct.body.at("stale_allocation") == false);
    CHECK(get(api, "/investors/nobody").status == 404);

    CHECK(post(api, "/investors/kim/withdraw", {{"fraction", "0.5"}}).status == 200);
    CHECK(engine.account("kim")->withdraw_pending.is_positive());
    CHECK(post(api, "/investors/kim/withdraw/cancel", Json::object()).status == 200);
    CHECK(engine.account("kim")->withdraw_pending.is_zero());
    CHECK(post(api, "/investors/kim/preference", {{"preference", {{"mode", "return"}, {"ret", 0.05}}}}).status == 200);

    const auto rep = get(api, "/report");
    CHECK(rep.body.at("cycles").size() == 2);
    CHECK(get(api, "/report", {{"cycle", "2"}}).status == 200);
    CHECK(get(api, "/report", {{"cycle", "9"}}).status == 400);

    const auto state = get(api, "/state");
    CHECK(state.body.at("state_hash") == engine.state_hash());
    CHECK(post(api, "/investors/kim/deposit", {{"amount", "10"}, {"date", "2023-01-01"}}).status == 409);
}

TEST_CASE("quote, line and frontier payloads") {
    Engine engine;
    Api api(engine);
    seed(api);
    const auto q = get(api, "/quote", {{"mode", "weights"}, {"w_alpha", "0"}, {"w_beta", "0"}, {"w_gamma", "1"}});
    CHECK(q.status == 200);
    CHECK(q.body.at("weights").at("w_gamma") == 1.0);
    CHECK(q.body.at("line_version") == 1);
    CHECK(get(api, "/quote", {{"mode", "return"}, {"ret", "-5"}}).status == 422);
    CHECK(get(api, "/quote", {{"mode", "risk"}}).status == 400);

    const auto line = get(api, "/line");
    CHECK(line.body.at("line").at("slope").get<double>() > 0.0);
    const auto fr = get(api, "/frontier", {{"points", "7"}});
    CHECK(fr.body.at("points").size() == 7);
    CHECK(fr.body.at("disclaimer").get<std::string>() == engine.config().disclaimer);
    CHECK(fr.body.at("parabola").contains("A"));
}

TEST_CASE("http round trip") {
    Engine engine;
    Api api(engine);
    HttpServer server(api);
    const int port = server.bind("127.0.0.1", 0);
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto res = client.Post("/admin/line", R"({"slope": 0.5, "intercept": 0.02, "date": "2024-01-02"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = client.Get("/line");
    REQUIRE(res);
    CHECK(res->status == 503);  // a manual line without fund points cannot quote
    res = client.Get("/frontier?points=5");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = Json::parse(res->body);
    CHECK(body.at("points").size() == 5);
    CHECK(body.at("line").at("method") == "manual");
    res = client.Get("/investors/none");
    REQUIRE(res);
    CHECK(res->status == 404);

    server.stop();
    t.join();
}
