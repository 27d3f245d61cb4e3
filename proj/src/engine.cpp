#include "parity/engine.hpp"

#include <filesystem>
#include <istream>
#include <mutex>

#include "parity/error.hpp"
#include "parity/estimation.hpp"
#include "parity/frontier.hpp"
#include "parity/hash.hpp"

namespace parity {

Json event_to_json(const Event& e) {
    return {{"seq", e.seq},
            {"date", e.command.date},
            {"type", e.command.type},
            {"investor", e.command.investor},
            {"payload", e.command.payload},
            {"state_hash", e.state_hash}};
}

Event event_from_json(const Json& j) {
    Event e;
    e.seq = require(j, "seq").get<std::uint64_t>();
    e.command.date = require(j, "date").get<Date>();
    e.command.type = require(j, "type").get<std::string>();
    e.command.investor = j.value("investor", std::string{});
    e.command.payload = j.value("payload", Json::object());
    e.state_hash = j.value("state_hash", std::string{});
    return e;
}

std::vector<Event> read_event_log(std::istream& in) {
    std::vector<Event> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(event_from_json(Json::parse(line)));
        } catch (const Json::exception& e) {
            fail(ErrorCode::Parse, "event log line " + std::to_string(n) + ": " + e.what());
        } catch (const Error& e) {
            fail(ErrorCode::Parse, "event log line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

namespace {

template <typename T>
Json opt_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

Json history_json(const FundHistoryd& h) {
    Json out = Json::array();
    for (const auto& [d, t] : h) out.push_back({{"date", d}, {"funds", t}});
    return out;
}

}  // namespace

Json state_to_json(const EngineState& s) {
    return {{"seq", s.seq},
            {"clock", s.clock},
            {"ledger", s.ledger},
            {"prices", opt_json(s.prices)},
            {"funds", opt_json(s.funds)},
            {"fund_history", history_json(s.fund_history)},
            {"line_anchor", opt_json(s.line_anchor)},
            {"line", opt_json(s.line)},
            {"line_version", s.line_version},
            {"combined", opt_json(s.combined)},
            {"inbox", s.inbox},
            {"price_rows", s.price_store.rows()}};
}

EngineState state_from_json(const Json& j) {
    EngineState s;
    s.seq = require(j, "seq").get<std::uint64_t>();
    s.clock = require(j, "clock").get<Date>();
    s.ledger = require(j, "ledger").get<LedgerState>();
    s.prices = opt_from<FundPrices>(j, "prices");
    s.funds = opt_from<FundTripled>(j, "funds");
    for (const auto& h : require(j, "fund_history"))
        s.fund_history.emplace_back(require(h, "date").get<Date>(), require(h, "funds").get<FundTripled>());
    s.line_anchor = opt_from<FundTripled>(j, "line_anchor");
    s.line = opt_from<ParityLined>(j, "line");
    s.line_version = require(j, "line_version").get<std::uint64_t>();
    s.combined = opt_from<CombinedPortfoliod>(j, "combined");
    s.inbox = require(j, "inbox").get<ReceivedAssets>();
    s.price_store.ingest(require(j, "price_rows").get<std::vector<PricePoint>>());
    return s;
}

namespace {

std::string hash_of(const EngineState& s) { return sha256_hex(state_to_json(s).dump()); }

InvestorAccount& find_account(EngineState& s, const std::string& id) {
    auto it = s.ledger.accounts.find(id);
    if (it == s.ledger.accounts.end()) fail(ErrorCode::UnknownInvestor, "unknown investor '" + id + "'");
    return it->second;
}

Decimal lot_total(const InvestorAccount& a) {
    Decimal t;
    for (const auto& l : a.deposit_lots) t += l.amount;
    return t;
}

void require_line(const EngineState& s) {
    if (!s.line || !s.funds || !s.combined) fail(ErrorCode::NotReady, "no line has been established yet");
}

AllocationRecordd resolve(const EngineState& s, const InvestorPreferenced& pref) {
    require_line(s);
    return resolve_preference(pref, *s.line, *s.funds, *s.combined, s.line_version);
}

/// New line in place: bump the version, rebuild the combined portfolio and
/// realign every account. Accounts whose preference no longer resolves keep
/// their weights.
void install_line(EngineState& s, const EngineConfig& cfg, const ParityLined& line) {
    s.line = line;
    ++s.line_version;
    s.combined.reset();
    if (s.funds) {
        try {
            const double a = cfg.combined_alpha ? *cfg.combined_alpha : inverse_vol_combined_alpha(*s.funds);
            s.combined = combined_market_portfolio(*s.funds, a, line);
        } catch (const Error&) {
        }
    }
    for (auto& [id, acct] : s.ledger.accounts) {
        try {
            acct.allocation = resolve(s, acct.preference);
        } catch (const Error&) {
            acct.allocation.line_version = s.line_version;
        }
    }
}

/// Refits when there is no line yet or a fund has drifted out of its circle.
Json maybe_refit(EngineState& s, const EngineConfig& cfg) {
    if (!s.funds) return {{"refit", false}};
    const bool drift = !s.line || !s.line_anchor || needs_update(*s.line_anchor, *s.funds, cfg.radius_multiplier);
    if (!drift) return {{"refit", false}};
    try {
        install_line(s, cfg, fit_line(s.fund_history, *s.funds, cfg));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoValidLine && e.code() != ErrorCode::DegenerateLine) throw;
        return {{"refit", false}, {"line_error", e.what()}};
    }
    s.line_anchor = s.funds;
    return {{"refit", true}, {"line_version", s.line_version}, {"line", *s.line}};
}

void push_history(EngineState& s, const EngineConfig& cfg, Date d, const FundTripled& t) {
    s.fund_history.emplace_back(d, t);
    const auto cap = static_cast<std::size_t>(cfg.window);
    if (s.fund_history.size() > cap)
        s.fund_history.erase(s.fund_history.begin(), s.fund_history.end() - static_cast<std::ptrdiff_t>(cap));
}

Decimal payload_decimal(const Json& p, const char* key) { return require(p, key).get<Decimal>(); }

}  // namespace

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
    config_.validate();
    hash_ = hash_of(state_);
}

void Engine::attach_log(const std::string& path) {
    std::unique_lock lock(mutex_);
    auto out = std::make_unique<std::ofstream>(path, std::ios::app);
    if (!*out) fail(ErrorCode::Io, "cannot open event log '" + path + "'");
    log_ = std::move(out);
}

Applied Engine::apply(const Command& command) {
    std::unique_lock lock(mutex_);
    EngineState next = state_;
    if (command.date < next.clock)
        fail(ErrorCode::Conflict, "command dated " + command.date.to_string() + " is before the engine clock " +
                                      next.clock.to_string());
    next.clock = command.date;
    ++next.seq;
    Json result = apply_locked(next, command);

    Event ev{next.seq, command, hash_of(next)};
    if (log_) {
        *log_ << event_to_json(ev).dump() << '\n';
        log_->flush();
        if (!*log_) fail(ErrorCode::Io, "event log write failed");
    }
    state_ = std::move(next);
    hash_ = ev.state_hash;
    events_.push_back(ev);
    if (command.type == "rebalance") reports_.push_back(pending_report_);
    maybe_snapshot();
    return {ev, std::move(result)};
}

Json Engine::apply_locked(EngineState& s, const Command& c) {
    const Json& p = c.payload;
    const std::string& t = c.type;

    if (t == "ingest-prices") {
        const auto rows = require(p, "rows").get<std::vector<PricePoint>>();
        return {{"rows", s.price_store.ingest(rows)}};
    }
    if (t == "refresh-funds") {
        s.funds = estimate_funds(s.price_store, config_, c.date);
        s.fund_history = recent_history(s.price_store, config_, c.date);
        FundPrices fp;
        fp.as_of = c.date;
        for (Fund f : kFunds) {
            const auto pt = s.price_store.latest(config_.asset_ids[index(f)], c.date);
            at(fp.price, f) = pt->price;
            fp.as_of = std::min(fp.as_of, pt->timestamp);
        }
        fp.validate();
        s.prices = fp;
        Json r = maybe_refit(s, config_);
        r["funds"] = *s.funds;
        r["prices"] = fp;
        return r;
    }
    if (t == "set-funds") {
        auto triple = require(p, "funds").get<FundTripled>();
        triple.as_of = c.date;
        if (!triple.correlations) triple.correlations = config_.correlations;
        for (Fund f : kFunds)
            if (!(triple[f].sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "fund sigma must be nonnegative");
        s.funds = triple;
        push_history(s, config_, c.date, triple);
        return maybe_refit(s, config_);
    }
    if (t == "set-line") {
        ParityLined line{require(p, "slope").get<double>(), require(p, "intercept").get<double>(), c.date,
                         LineMethod::Manual};
        if (!(line.slope > 0.0)) fail(ErrorCode::DegenerateLine, "line slope must be positive");
        install_line(s, config_, line);
        s.line_anchor = s.funds;
        return {{"line_version", s.line_version}, {"line", line}};
    }
    if (t == "set-prices") {
        FundPrices fp;
        fp.price = get_funds(p, "", "_price");
        fp.as_of = p.contains("as_of") ? p.at("as_of").get<Date>() : c.date;
        fp.validate();
        s.prices = fp;
        return fp;
    }
    if (t == "create-investor") {
        if (c.investor.empty()) fail(ErrorCode::InvalidArgument, "investor id is required");
        if (s.ledger.accounts.contains(c.investor))
            fail(ErrorCode::Conflict, "investor '" + c.investor + "' already exists");
        InvestorAccount a;
        a.id = c.investor;
        a.preference = require(p, "preference").get<InvestorPreferenced>();
        a.allocation = resolve(s, a.preference);
        s.ledger.accounts.emplace(a.id, a);
        return a;
    }
    if (t == "deposit") {
        auto& a = find_account(s, c.investor);
        const Decimal amount = payload_decimal(p, "amount");
        if (!amount.is_positive()) fail(ErrorCode::InvalidArgument, "deposit amount must be positive");
        Decimal fee;
        if (p.contains("preference") && !p.at("preference").is_null()) {
            const auto pref = p.at("preference").get<InvestorPreferenced>();
            a.allocation = resolve(s, pref);
            a.preference = pref;
            fee = combined_action_fee(amount, lot_total(a), config_.fees);
        } else {
            fee = deposit_fee(amount, config_.fees);
        }
        s.ledger.treasury += fee;
        a.fees_paid += fee;
        a = accrue_deposit(a, amount - fee, c.date);
        return {{"account", a}, {"fee", fee}, {"net", amount - fee}};
    }
    if (t == "withdraw") {
        auto& a = find_account(s, c.investor);
        if (!s.prices) fail(ErrorCode::NotReady, "no prices have been set");
        a = accrue_withdraw(a, payload_decimal(p, "fraction"), *s.prices);
        return a;
    }
    if (t == "cancel-withdraw") {
        auto& a = find_account(s, c.investor);
        a = cancel_withdraw(a);
        return a;
    }
    if (t == "set-preference") {
        auto& a = find_account(s, c.investor);
        const auto pref = require(p, "preference").get<InvestorPreferenced>();
        a.allocation = resolve(s, pref);
        a.preference = pref;
        const Decimal fee = preference_change_fee(lot_total(a), config_.fees);
        a.fee_due += fee;
        return {{"account", a}, {"fee", fee}};
    }
    if (t == "deliver-received") {
        const auto r = p.get<ReceivedAssets>();
        r.validate();
        for (std::size_t f = 0; f < 3; ++f) s.inbox.tokens[f] += r.tokens[f];
        s.inbox.cash += r.cash;
        return s.inbox;
    }
    if (t == "deliver-requested") {
        ReceivedAssets r;
        FundAmounts invest{}, redeem{};
        for (const auto& [id, a] : s.ledger.accounts)
            for (std::size_t f = 0; f < 3; ++f) {
                invest[f] += a.open_invest[f];
                redeem[f] += a.open_redeem[f];
            }
        for (Fund f : kFunds) at(r.tokens, f) = at(invest, f) / s.ledger.order_prices[f];
        r.cash = token_value(redeem, s.ledger.order_prices);
        for (std::size_t f = 0; f < 3; ++f) s.inbox.tokens[f] += r.tokens[f];
        s.inbox.cash += r.cash;
        return s.inbox;
    }
    if (t == "rebalance") {
        if (!s.prices) fail(ErrorCode::NotReady, "no prices have been set");
        CycleConfig cc;
        cc.split = config_.split;
        cc.fees = config_.fees;
        cc.today = c.date;
        cc.price_max_age_days = config_.price_max_age_days;
        cc.line_version = s.line_version;
        cc.misalignment_threshold = config_.misalignment_threshold;
        if (config_.max_investors > 0) cc.max_investors = config_.max_investors;
        pending_report_ = run_cycle(s.ledger, *s.prices, s.inbox, cc);
        s.inbox = {};
        return pending_report_;
    }
    fail(ErrorCode::InvalidArgument, "unknown command type '" + t + "'");
}

void Engine::maybe_snapshot() const {
    if (config_.snapshot_dir.empty() || config_.snapshot_every == 0) return;
    if (state_.seq % config_.snapshot_every != 0) return;
    std::filesystem::create_directories(config_.snapshot_dir);
    const auto path = std::filesystem::path(config_.snapshot_dir) / ("snapshot-" + std::to_string(state_.seq) + ".json");
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write snapshot '" + path.string() + "'");
    out << Json{{"format", kSnapshotFormat}, {"seq", state_.seq}, {"state", state_to_json(state_)}, {"state_hash", hash_}}.dump()
        << '\n';
}

EngineState Engine::state() const {
    std::shared_lock lock(mutex_);
    return state_;
}

std::uint64_t Engine::seq() const {
    std::shared_lock lock(mutex_);
    return state_.seq;
}

std::string Engine::state_hash() const {
    std::shared_lock lock(mutex_);
    return hash_;
}

Json Engine::snapshot() const {
    std::shared_lock lock(mutex_);
    return {{"format", kSnapshotFormat}, {"seq", state_.seq}, {"state", state_to_json(state_)}, {"state_hash", hash_}};
}

std::vector<Event> Engine::events() const {
    std::shared_lock lock(mutex_);
    return events_;
}

std::vector<CycleReport> Engine::reports() const {
    std::shared_lock lock(mutex_);
    return reports_;
}

std::optional<InvestorAccount> Engine::account(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = state_.ledger.accounts.find(id);
    if (it == state_.ledger.accounts.end()) return std::nullopt;
    return it->second;
}

std::optional<ParityLined> Engine::line() const {
    std::shared_lock lock(mutex_);
    return state_.line;
}

AllocationRecordd Engine::quote(const InvestorPreferenced& pref) const {
    std::shared_lock lock(mutex_);
    return resolve(state_, pref);
}

Json Engine::line_info() const {
    std::shared_lock lock(mutex_);
    require_line(state_);
    return {{"line", *state_.line},
            {"line_version", state_.line_version},
            {"funds", *state_.funds},
            {"combined", *state_.combined}};
}

Json Engine::frontier(std::optional<int> points) const {
    std::shared_lock lock(mutex_);
    if (!state_.line) fail(ErrorCode::NotReady, "no line has been established yet");
    const auto spec = build_parabola(*state_.line, config_.view_constant, config_.tangency_constant, config_.height_constant);
    Json pts = Json::array();
    for (const auto& c : sample_curve(spec, points.value_or(config_.curve_points)))
        pts.push_back({{"x", c.x}, {"y_upper", c.y_upper}, {"y_lower", c.y_lower}});
    return {{"line", *state_.line},
            {"line_version", state_.line_version},
            {"parabola", spec},
            {"points", pts},
            {"disclaimer", config_.disclaimer}};
}

Json Engine::account_view(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = state_.ledger.accounts.find(id);
    if (it == state_.ledger.accounts.end()) fail(ErrorCode::UnknownInvestor, "unknown investor '" + id + "'");
    const auto& a = it->second;
    Json j = a;
    j["weights"] = fund_object(a.weights());
    if (state_.prices) {
        j["token_value"] = token_value(a.qty, *state_.prices);
        try {
            j["intrinsic_value"] = intrinsic_value(a, *state_.prices);
        } catch (const Error&) {
            j["intrinsic_value"] = nullptr;
        }
    }
    j["stale_allocation"] = a.allocation.line_version != state_.line_version;
    return j;
}

Json Engine::fee_preview(const std::string& action, const std::string& investor, std::optional<Decimal> amount,
                         bool with_preference_change) const {
    std::shared_lock lock(mutex_);
    const InvestorAccount* acct = nullptr;
    if (!investor.empty()) {
        auto it = state_.ledger.accounts.find(investor);
        if (it == state_.ledger.accounts.end()) fail(ErrorCode::UnknownInvestor, "unknown investor '" + investor + "'");
        acct = &it->second;
    }
    const auto& fees = config_.fees;
    if (action == "deposit") {
        if (!amount || !amount->is_positive()) fail(ErrorCode::InvalidArgument, "deposit preview needs a positive amount");
        const Decimal fee = with_preference_change ? combined_action_fee(*amount, acct ? lot_total(*acct) : Decimal{}, fees)
                                                   : deposit_fee(*amount, fees);
        return {{"action", action}, {"amount", *amount}, {"fee", fee}, {"net", *amount - fee}};
    }
    if (action == "preference") {
        if (!acct) fail(ErrorCode::InvalidArgument, "preference preview needs an investor");
        return {{"action", action}, {"fee", preference_change_fee(lot_total(*acct), fees)}};
    }
    if (action == "withdraw") {
        if (!acct) fail(ErrorCode::InvalidArgument, "withdraw preview needs an investor");
        if (!amount) fail(ErrorCode::InvalidArgument, "withdraw preview needs a fraction");
        if (!state_.prices) fail(ErrorCode::NotReady, "no prices have been set");
        const auto after = accrue_withdraw(*acct, *amount, *state_.prices);
        const Decimal gross = after.withdraw_pending - acct->withdraw_pending;
        const auto fifo = redeem_fifo(acct->deposit_lots, after.withdraw_pending, state_.clock, fees);
        return {{"action", action},
                {"fraction", *amount},
                {"gross", gross},
                {"total_pending", after.withdraw_pending},
                {"penalty", fifo.penalty},
                {"net", after.withdraw_pending - fifo.penalty}};
    }
    fail(ErrorCode::InvalidArgument, "unknown fee preview action '" + action + "'");
}

void Engine::write_snapshot(const std::string& path) const {
    const Json snap = snapshot();
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write snapshot '" + path + "'");
    out << snap.dump() << '\n';
}

std::unique_ptr<Engine> Engine::replay(const EngineConfig& config, const std::vector<Event>& events) {
    auto engine = std::make_unique<Engine>(config);
    for (const auto& e : events) {
        const auto applied = engine->apply(e.command);
        if (applied.event.seq != e.seq)
            fail(ErrorCode::Conflict, "event sequence gap at seq " + std::to_string(e.seq));
        if (!e.state_hash.empty() && applied.event.state_hash != e.state_hash)
            fail(ErrorCode::Conflict, "state hash mismatch at seq " + std::to_string(e.seq));
    }
    return engine;
}

std::unique_ptr<Engine> Engine::restore(const EngineConfig& config, const Json& snapshot, const std::vector<Event>& events) {
    if (snapshot.value("format", std::string{}) != kSnapshotFormat) fail(ErrorCode::Parse, "not a snapshot file");
    auto engine = std::make_unique<Engine>(config);
    engine->state_ = state_from_json(require(snapshot, "state"));
    engine->hash_ = hash_of(engine->state_);
    if (engine->hash_ != require(snapshot, "state_hash").get<std::string>())
        fail(ErrorCode::Conflict, "snapshot hash does not match its state");
    for (const auto& e : events) {
        if (e.seq <= engine->state_.seq) continue;
        const auto applied = engine->apply(e.command);
        if (applied.event.seq != e.seq)
            fail(ErrorCode::Conflict, "event sequence gap at seq " + std::to_string(e.seq));
        if (!e.state_hash.empty() && applied.event.state_hash != e.state_hash)
            fail(ErrorCode::Conflict, "state hash mismatch at seq " + std::to_string(e.seq));
    }
    return engine;
}

}  // namespace parity
