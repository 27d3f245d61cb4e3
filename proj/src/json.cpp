#include "parity/json.hpp"

#include "parity/error.hpp"

namespace parity {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object()) fail(ErrorCode::Parse, std::string("expected an object holding '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) fail(ErrorCode::Parse, std::string("missing field '") + key + "'");
    return *it;
}

namespace {

template <typename T>
T get(const Json& j, const char* key) {
    const Json& v = require(j, key);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::Parse, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
std::optional<T> get_opt(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return get<T>(j, key);
}

}  // namespace

void to_json(Json& j, const Decimal& d) { j = d.to_string(); }

void from_json(const Json& j, Decimal& d) {
    if (j.is_string()) {
        d = Decimal::parse(j.get<std::string>());
    } else if (j.is_number_integer()) {
        d = Decimal::parse(j.dump());
    } else if (j.is_number_float()) {
        d = Decimal::from_double(j.get<double>());
    } else {
        fail(ErrorCode::Parse, "expected a decimal number");
    }
}

void to_json(Json& j, const Date& d) { j = d.to_string(); }
void from_json(const Json& j, Date& d) {
    if (!j.is_string()) fail(ErrorCode::Parse, "expected a YYYY-MM-DD date string");
    d = Date::parse(j.get<std::string>());
}

void to_json(Json& j, const RiskReturnPointd& p) { j = {{"sigma", p.sigma}, {"exp_return", p.exp_return}}; }
void from_json(const Json& j, RiskReturnPointd& p) {
    p.sigma = get<double>(j, "sigma");
    p.exp_return = get<double>(j, "exp_return");
}

void to_json(Json& j, const FundCorrelationsd& c) { j = {{"rho_ab", c.rho_ab}, {"rho_bg", c.rho_bg}, {"rho_ag", c.rho_ag}}; }
void from_json(const Json& j, FundCorrelationsd& c) {
    c.rho_ab = get<double>(j, "rho_ab");
    c.rho_bg = get<double>(j, "rho_bg");
    c.rho_ag = get<double>(j, "rho_ag");
}

void to_json(Json& j, const FundTripled& t) {
    j = {{"alpha", t.alpha}, {"beta", t.beta}, {"gamma", t.gamma}, {"as_of", t.as_of}};
    j["correlations"] = t.correlations ? Json(*t.correlations) : Json(nullptr);
}
void from_json(const Json& j, FundTripled& t) {
    t.alpha = get<RiskReturnPointd>(j, "alpha");
    t.beta = get<RiskReturnPointd>(j, "beta");
    t.gamma = get<RiskReturnPointd>(j, "gamma");
    t.as_of = get<Date>(j, "as_of");
    t.correlations = get_opt<FundCorrelationsd>(j, "correlations");
}

void to_json(Json& j, const ParityLined& l) {
    j = {{"slope", l.slope}, {"intercept", l.intercept}, {"fitted_at", l.fitted_at}, {"method", to_string(l.method)}};
}
void from_json(const Json& j, ParityLined& l) {
    l.slope = get<double>(j, "slope");
    l.intercept = get<double>(j, "intercept");
    l.fitted_at = get_opt<Date>(j, "fitted_at").value_or(Date{});
    const std::string m = get_opt<std::string>(j, "method").value_or("manual");
    if (m == "regression")
        l.method = LineMethod::Regression;
    else if (m == "two-point")
        l.method = LineMethod::TwoPoint;
    else if (m == "fallback")
        l.method = LineMethod::Fallback;
    else if (m == "manual")
        l.method = LineMethod::Manual;
    else
        fail(ErrorCode::Parse, "unknown line method '" + m + "'");
}

void to_json(Json& j, const WeightVectord& w) {
    j = {{"w_alpha", w.w_alpha}, {"w_beta", w.w_beta}, {"w_gamma", w.w_gamma}};
}
void from_json(const Json& j, WeightVectord& w) {
    w.w_alpha = get<double>(j, "w_alpha");
    w.w_beta = get<double>(j, "w_beta");
    w.w_gamma = get<double>(j, "w_gamma");
}

void to_json(Json& j, const InvestorPreferenced& p) {
    j = {{"mode", to_string(p.mode)}};
    if (p.risk) j["risk"] = *p.risk;
    if (p.ret) j["ret"] = *p.ret;
    if (p.weights) j["weights"] = *p.weights;
}
void from_json(const Json& j, InvestorPreferenced& p) {
    const std::string mode = get<std::string>(j, "mode");
    if (mode == "risk")
        p = InvestorPreferenced::by_risk(get<double>(j, "risk"));
    else if (mode == "return")
        p = InvestorPreferenced::by_return(get<double>(j, "ret"));
    else if (mode == "weights")
        p = InvestorPreferenced::by_weights(get<WeightVectord>(j, "weights"));
    else
        fail(ErrorCode::Parse, "unknown preference mode '" + mode + "'");
}

void to_json(Json& j, const CombinedPortfoliod& c) {
    j = {{"w_c_alpha", c.w_c_alpha}, {"w_c_beta", c.w_c_beta}, {"point", c.point}};
}
void from_json(const Json& j, CombinedPortfoliod& c) {
    c.w_c_alpha = get<double>(j, "w_c_alpha");
    c.w_c_beta = get<double>(j, "w_c_beta");
    c.point = get<RiskReturnPointd>(j, "point");
}

void to_json(Json& j, const AllocationRecordd& a) {
    j = {{"sigma_i", a.sigma_i},
         {"exp_return_i", a.exp_return_i},
         {"weights", a.weights},
         {"line_version", a.line_version},
         {"trimmed", a.trimmed}};
}
void from_json(const Json& j, AllocationRecordd& a) {
    a.sigma_i = get<double>(j, "sigma_i");
    a.exp_return_i = get<double>(j, "exp_return_i");
    a.weights = get<WeightVectord>(j, "weights");
    a.line_version = get<std::uint64_t>(j, "line_version");
    a.trimmed = get_opt<bool>(j, "trimmed").value_or(false);
}

void to_json(Json& j, const RedemptionTier& t) {
    j = {{"max_holding_days", t.max_holding_days}, {"penalty_rate", t.penalty_rate}};
}
void from_json(const Json& j, RedemptionTier& t) {
    t.max_holding_days = get<long>(j, "max_holding_days");
    t.penalty_rate = get<Decimal>(j, "penalty_rate");
}

void to_json(Json& j, const FeeSchedule& s) {
    j = {{"deposit_rate", s.deposit_rate},
         {"pref_change_rate", s.pref_change_rate},
         {"pref_change_cap", s.pref_change_cap},
         {"redemption_tiers", s.redemption_tiers},
         {"subfund_rates", {{"direct", fund_object(s.subfund_direct_rates)}, {"parity", fund_object(s.subfund_parity_rates)}}}};
}
void from_json(const Json& j, FeeSchedule& s) {
    s.deposit_rate = get<Decimal>(j, "deposit_rate");
    s.pref_change_rate = get<Decimal>(j, "pref_change_rate");
    s.pref_change_cap = get<Decimal>(j, "pref_change_cap");
    s.redemption_tiers = get<std::vector<RedemptionTier>>(j, "redemption_tiers");
    const Json& rates = require(j, "subfund_rates");
    s.subfund_direct_rates = fund_amounts(require(rates, "direct"));
    s.subfund_parity_rates = fund_amounts(require(rates, "parity"));
}

void to_json(Json& j, const DepositLot& l) { j = {{"timestamp", l.when}, {"amount", l.amount}}; }
void from_json(const Json& j, DepositLot& l) {
    l.when = get<Date>(j, "timestamp");
    l.amount = get<Decimal>(j, "amount");
}

void to_json(Json& j, const PricePoint& p) {
    j = {{"asset_id", p.asset_id}, {"timestamp", p.timestamp}, {"price", p.price}};
}
void from_json(const Json& j, PricePoint& p) {
    p.asset_id = get<std::string>(j, "asset_id");
    p.timestamp = get<Date>(j, "timestamp");
    p.price = get<Decimal>(j, "price");
}

Json fund_object(const FundAmounts& a) { return {{"alpha", a[0]}, {"beta", a[1]}, {"gamma", a[2]}}; }

FundAmounts fund_amounts(const Json& j) {
    return {get<Decimal>(j, "alpha"), get<Decimal>(j, "beta"), get<Decimal>(j, "gamma")};
}

void put_funds(Json& j, const FundAmounts& a, const std::string& prefix, const std::string& suffix) {
    for (Fund f : kFunds) j[prefix + std::string(fund_name(f)) + suffix] = at(a, f);
}

FundAmounts get_funds(const Json& j, const std::string& prefix, const std::string& suffix) {
    FundAmounts a{};
    for (Fund f : kFunds) {
        const std::string key = prefix + std::string(fund_name(f)) + suffix;
        a[index(f)] = get<Decimal>(j, key.c_str());
    }
    return a;
}

void to_json(Json& j, const FundPrices& p) {
    j = Json::object();
    put_funds(j, p.price, "", "_price");
    j["as_of"] = p.as_of;
}
void from_json(const Json& j, FundPrices& p) {
    p.price = get_funds(j, "", "_price");
    p.as_of = get<Date>(j, "as_of");
}

void to_json(Json& j, const InvestorAccount& a) {
    j = {{"id", a.id},
         {"preference", a.preference},
         {"allocation", a.allocation},
         {"deposit_pending", a.deposit_pending},
         {"withdraw_pending", a.withdraw_pending},
         {"avail_for_withdraw", a.avail_for_withdraw},
         {"cash_alloc", a.cash_alloc},
         {"deposit_lots", a.deposit_lots},
         {"fee_due", a.fee_due},
         {"withdraw_open", a.withdraw_open},
         {"open_invest", fund_object(a.open_invest)},
         {"open_redeem", fund_object(a.open_redeem)},
         {"paid_out", a.paid_out},
         {"fees_paid", a.fees_paid}};
    put_funds(j, a.qty, "", "_qty");
}
void from_json(const Json& j, InvestorAccount& a) {
    a.id = get<std::string>(j, "id");
    a.preference = get<InvestorPreferenced>(j, "preference");
    a.allocation = get<AllocationRecordd>(j, "allocation");
    a.qty = get_funds(j, "", "_qty");
    a.deposit_pending = get<Decimal>(j, "deposit_pending");
    a.withdraw_pending = get<Decimal>(j, "withdraw_pending");
    a.avail_for_withdraw = get<Decimal>(j, "avail_for_withdraw");
    a.cash_alloc = get<Decimal>(j, "cash_alloc");
    a.deposit_lots = get<std::vector<DepositLot>>(j, "deposit_lots");
    a.fee_due = get<Decimal>(j, "fee_due");
    a.withdraw_open = get<bool>(j, "withdraw_open");
    a.open_invest = fund_amounts(require(j, "open_invest"));
    a.open_redeem = fund_amounts(require(j, "open_redeem"));
    a.paid_out = get<Decimal>(j, "paid_out");
    a.fees_paid = get<Decimal>(j, "fees_paid");
}

void to_json(Json& j, const InvestorFlowOrder& o) {
    j = {{"id", o.id},
         {"inflow", o.inflow},
         {"outflow", o.outflow},
         {"total_rebalance", o.total_rebalance},
         {"intrinsic_value", o.intrinsic_value}};
    put_funds(j, o.inv, "inv_", "");
    put_funds(j, o.wdrw_qty, "wdrw_", "_qty");
}

void to_json(Json& j, const RebalanceBatch& b) {
    j = {{"investor_set", b.investor_set},
         {"inflow_total", b.inflow_total},
         {"outflow_total", b.outflow_total},
         {"pending_deposits", fund_object(b.pending.deposits)},
         {"pending_withdraws", fund_object(b.pending.withdraws)},
         {"net_inv", fund_object(b.net_inv)},
         {"net_wdrw", fund_object(b.net_wdrw)},
         {"avl_deposit", b.avl_deposit}};
    put_funds(j, b.pa_inv, "pa_inv_", "");
    put_funds(j, b.pa_wdrw, "pa_wdrw_", "");
}

void to_json(Json& j, const ReceivedAssets& r) {
    j = Json::object();
    put_funds(j, r.tokens, "", "_rcvd");
    j["cash_rcvd"] = r.cash;
}
void from_json(const Json& j, ReceivedAssets& r) {
    r.tokens = get_funds(j, "", "_rcvd");
    r.cash = get<Decimal>(j, "cash_rcvd");
}

void to_json(Json& j, const LedgerState& s) {
    Json accounts = Json::array();
    for (const auto& [id, a] : s.accounts) accounts.push_back(a);
    j = {{"accounts", accounts},
         {"order_prices", s.order_prices},
         {"residual_tokens", fund_object(s.residual_tokens)},
         {"residual_cash", s.residual_cash},
         {"dust_tokens", fund_object(s.dust_tokens)},
         {"dust_cash", s.dust_cash},
         {"treasury", s.treasury},
         {"cycles", s.cycles},
         {"last_line_version", s.last_line_version}};
}
void from_json(const Json& j, LedgerState& s) {
    s.accounts.clear();
    for (const auto& a : require(j, "accounts")) {
        auto acc = a.get<InvestorAccount>();
        s.accounts.emplace(acc.id, std::move(acc));
    }
    s.order_prices = get<FundPrices>(j, "order_prices");
    s.residual_tokens = fund_amounts(require(j, "residual_tokens"));
    s.residual_cash = get<Decimal>(j, "residual_cash");
    s.dust_tokens = fund_amounts(require(j, "dust_tokens"));
    s.dust_cash = get<Decimal>(j, "dust_cash");
    s.treasury = get<Decimal>(j, "treasury");
    s.cycles = get<std::uint64_t>(j, "cycles");
    s.last_line_version = get<std::uint64_t>(j, "last_line_version");
}

void to_json(Json& j, const CycleReport& r) {
    Json tokens = Json::array();
    for (const auto& t : r.settlement.tokens)
        tokens.push_back({{"id", t.id}, {"fund", fund_name(t.fund)}, {"tokens", t.tokens}, {"cost", t.cost}});
    Json cash = Json::array();
    for (const auto& c : r.settlement.cash)
        cash.push_back({{"id", c.id}, {"cash", c.cash}, {"tokens_redeemed", fund_object(c.tokens_redeemed)}});
    Json payouts = Json::array();
    for (const auto& p : r.payouts)
        payouts.push_back({{"id", p.id}, {"gross", p.gross}, {"fee", p.fee}, {"penalty", p.penalty}, {"net", p.net}});
    Json crosses = Json::array();
    for (const auto& c : r.crosses)
        crosses.push_back({{"id", c.id}, {"fund", fund_name(c.fund)}, {"tokens", c.tokens}, {"cash", c.cash}});
    Json placements = Json::array();
    for (const auto& p : r.placements)
        placements.push_back({{"id", p.id}, {"invest", fund_object(p.invest)}, {"redeem", fund_object(p.redeem)}});
    j = {{"date", r.date},
         {"prices", r.prices},
         {"full_population", r.full_population},
         {"settlement",
          {{"tokens", tokens},
           {"cash", cash},
           {"residual_tokens", fund_object(r.settlement.residual_tokens)},
           {"residual_cash", r.settlement.residual_cash}}},
         {"payouts", payouts},
         {"orders", r.orders},
         {"identity_residuals", r.identity_residuals},
         {"batch", r.batch},
         {"aggregate_residual", r.aggregate_residual},
         {"crosses", crosses},
         {"placements", placements},
         {"external_invest", fund_object(r.external_invest)},
         {"external_redeem", fund_object(r.external_redeem)},
         {"dust_tokens", fund_object(r.dust_tokens)},
         {"dust_cash", r.dust_cash}};
}

void to_json(Json& j, const ParabolaSpecd& p) {
    j = {{"h", p.h},
         {"A", p.A},
         {"k", p.k},
         {"tangency", p.tangency},
         {"view_max", p.view_max},
         {"view_constant", p.view_constant},
         {"tangency_constant", p.tangency_constant},
         {"height_constant", p.height_constant}};
}

}  // namespace parity
