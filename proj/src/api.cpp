#include "parity/api.hpp"

#include <optional>
#include <string_view>
#include <vector>

#include "parity/error.hpp"

namespace parity {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Parse: return 400;
        case ErrorCode::UnknownInvestor: return 404;
        case ErrorCode::Conflict: return 409;
        case ErrorCode::NotReady: return 503;
        case ErrorCode::Io:
        case ErrorCode::Script: return 500;
        default: return 422;
    }
}

namespace {

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        const auto j = path.find('/', i);
        parts.emplace_back(path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
        if (j == std::string_view::npos) break;
        i = j;
    }
    return parts;
}

std::optional<std::string> param(const ApiRequest& r, const std::string& key) {
    auto it = r.query.find(key);
    if (it == r.query.end()) return std::nullopt;
    return it->second;
}

double number_param(const ApiRequest& r, const std::string& key) {
    const auto v = param(r, key);
    if (!v) fail(ErrorCode::InvalidArgument, "missing query parameter '" + key + "'");
    try {
        std::size_t used = 0;
        const double d = std::stod(*v, &used);
        if (used == v->size()) return d;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::InvalidArgument, "query parameter '" + key + "' is not a number");
}

InvestorPreferenced quote_preference(const ApiRequest& r) {
    const auto mode = param(r, "mode");
    if (!mode) fail(ErrorCode::InvalidArgument, "missing query parameter 'mode'");
    if (*mode == "risk") return InvestorPreferenced::by_risk(number_param(r, "risk"));
    if (*mode == "return") return InvestorPreferenced::by_return(number_param(r, "ret"));
    if (*mode == "weights")
        return InvestorPreferenced::by_weights({number_param(r, "w_alpha"), number_param(r, "w_beta"), number_param(r, "w_gamma")});
    fail(ErrorCode::InvalidArgument, "mode must be risk, return or weights");
}

}  // namespace

ApiResponse Api::handle(const ApiRequest& request) const {
    try {
        return route(request);
    } catch (const Error& e) {
        return {http_status(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}};
    } catch (const Json::exception& e) {
        return {400, {{"error", "parse"}, {"message", e.what()}}};
    } catch (const std::exception& e) {
        return {500, {{"error", "internal"}, {"message", e.what()}}};
    }
}

ApiResponse Api::route(const ApiRequest& r) const {
    const auto parts = split_path(r.path);
    const bool get = r.method == "GET";
    const bool post = r.method == "POST";
    const auto n = parts.size();

    Json body = Json::object();
    if (post && !r.body.empty()) {
        body = Json::parse(r.body);
        if (!body.is_object()) fail(ErrorCode::Parse, "request body must be a JSON object");
    }
    auto command = [&](std::string type, std::string investor, Json payload) {
        Command c{std::move(type), engine_.state().clock, std::move(investor), std::move(payload)};
        if (c.payload.contains("date")) {
            c.date = c.payload.at("date").get<Date>();
            c.payload.erase("date");
        }
        const auto applied = engine_.apply(c);
        return ApiResponse{200, {{"seq", applied.event.seq}, {"state_hash", applied.event.state_hash}, {"result", applied.result}}};
    };

    if (n >= 1 && parts[0] == "investors") {
        if (n == 1 && post) {
            const auto id = require(body, "id").get<std::string>();
            body.erase("id");
            return command("create-investor", id, body);
        }
        if (n == 2 && get) return {200, engine_.account_view(parts[1])};
        if (n == 3 && post && parts[2] == "deposit") return command("deposit", parts[1], body);
        if (n == 3 && post && parts[2] == "withdraw") return command("withdraw", parts[1], body);
        if (n == 4 && post && parts[2] == "withdraw" && parts[3] == "cancel") return command("cancel-withdraw", parts[1], body);
        if (n == 3 && post && parts[2] == "preference") return command("set-preference", parts[1], body);
    }
    if (n == 1 && get) {
        if (parts[0] == "quote") return {200, engine_.quote(quote_preference(r))};
        if (parts[0] == "line") return {200, engine_.line_info()};
        if (parts[0] == "frontier") {
            std::optional<int> points;
            if (param(r, "points")) points = static_cast<int>(number_param(r, "points"));
            return {200, engine_.frontier(points)};
        }
        if (parts[0] == "report") {
            const auto reports = engine_.reports();
            if (param(r, "cycle")) {
                const auto k = static_cast<std::size_t>(number_param(r, "cycle"));
                if (k < 1 || k > reports.size()) fail(ErrorCode::InvalidArgument, "no such cycle");
                return {200, reports[k - 1]};
            }
            Json cycles = Json::array();
            for (const auto& c : reports) cycles.push_back(c);
            return {200, {{"cycles", cycles}}};
        }
        if (parts[0] == "state") return {200, {{"seq", engine_.seq()}, {"state_hash", engine_.state_hash()}}};
    }
    if (n == 2 && get && parts[0] == "fees" && parts[1] == "preview") {
        const auto action = param(r, "action").value_or("");
        std::optional<Decimal> amount;
        if (auto a = param(r, "amount")) amount = Decimal::parse(*a);
        if (auto f = param(r, "fraction")) amount = Decimal::parse(*f);
        const bool pref = param(r, "preference_change").value_or("false") == "true";
        return {200, engine_.fee_preview(action, param(r, "investor").value_or(""), amount, pref)};
    }
    if (n == 2 && post && parts[0] == "admin") {
        const auto& what = parts[1];
        if (what == "rebalance") return command("rebalance", "", body);
        if (what == "prices") return command("set-prices", "", body);
        if (what == "line") return command("set-line", "", body);
        if (what == "ingest") return command("ingest-prices", "", body);
        if (what == "funds") {
            if (body.contains("funds")) {
                if (!body["funds"].contains("as_of")) body["funds"]["as_of"] = body.value("date", engine_.state().clock.to_string());
                return command("set-funds", "", body);
            }
            return command("refresh-funds", "", body);
        }
        if (what == "deliver") {
            if (body.value("requested", false)) {
                body.erase("requested");
                return command("deliver-requested", "", body);
            }
            return command("deliver-received", "", body);
        }
    }
    return {404, {{"error", "not_found"}, {"message", r.method + " " + r.path}}};
}

}  // namespace parity
