#include "parity/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "parity/error.hpp"
#include "parity/price_csv.hpp"

namespace parity {

namespace {

[[noreturn]] void script_fail(std::size_t line, const std::string& msg) {
    fail(ErrorCode::Script, "line " + std::to_string(line) + ": " + msg);
}

struct Cursor {
    std::vector<std::string> tok;
    std::size_t pos = 0;
    std::size_t line = 0;

    bool done() const { return pos >= tok.size(); }
    const std::string& next(const char* what) {
        if (done()) script_fail(line, std::string("missing ") + what);
        return tok[pos++];
    }
    double number(const char* what) {
        const std::string& s = next(what);
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        script_fail(line, std::string("bad number for ") + what + ": '" + s + "'");
    }
    Json decimal(const char* what) {
        const std::string& s = next(what);
        try {
            (void)Decimal::parse(s);
        } catch (const Error&) {
            script_fail(line, std::string("bad amount for ") + what + ": '" + s + "'");
        }
        return s;
    }
    void finish() const {
        if (!done()) script_fail(line, "unexpected '" + tok[pos] + "'");
    }
};

Json preference(Cursor& c) {
    const std::string& mode = c.next("preference mode");
    InvestorPreferenced p;
    if (mode == "risk")
        p = InvestorPreferenced::by_risk(c.number("risk"));
    else if (mode == "return")
        p = InvestorPreferenced::by_return(c.number("return"));
    else if (mode == "weights") {
        const double a = c.number("alpha weight");
        const double b = c.number("beta weight");
        const double g = c.number("gamma weight");
        p = InvestorPreferenced::by_weights({a, b, g});
    } else
        script_fail(c.line, "preference must be risk, return or weights, got '" + mode + "'");
    return p;
}

Command parse_command(Cursor& c, const std::filesystem::path& base_dir) {
    Command cmd;
    const std::string& date = c.next("date");
    try {
        cmd.date = Date::parse(date);
    } catch (const Error&) {
        script_fail(c.line, "bad date '" + date + "'");
    }
    const std::string verb = c.next("command");
    auto& p = cmd.payload;

    if (verb == "ingest") {
        cmd.type = "ingest-prices";
        std::filesystem::path file = c.next("price file");
        if (file.is_relative()) file = base_dir / file;
        std::ifstream in(file);
        if (!in) script_fail(c.line, "cannot open price file '" + file.string() + "'");
        try {
            p["rows"] = read_price_csv(in);
        } catch (const Error& e) {
            script_fail(c.line, e.what());
        }
    } else if (verb == "refresh-funds") {
        cmd.type = verb;
    } else if (verb == "set-prices") {
        cmd.type = verb;
        p["alpha_price"] = c.decimal("alpha price");
        p["beta_price"] = c.decimal("beta price");
        p["gamma_price"] = c.decimal("gamma price");
    } else if (verb == "set-funds") {
        cmd.type = verb;
        FundTripled t;
        for (Fund f : kFunds) {
            t[f].sigma = c.number("fund sigma");
            t[f].exp_return = c.number("fund return");
        }
        if (!c.done()) {
            FundCorrelationsd rho;
            rho.rho_ab = c.number("rho_ab");
            rho.rho_bg = c.number("rho_bg");
            rho.rho_ag = c.number("rho_ag");
            t.correlations = rho;
        }
        t.as_of = cmd.date;
        p["funds"] = t;
    } else if (verb == "set-line") {
        cmd.type = verb;
        p["slope"] = c.number("slope");
        p["intercept"] = c.number("intercept");
    } else if (verb == "create") {
        cmd.type = "create-investor";
        cmd.investor = c.next("investor id");
        p["preference"] = preference(c);
    } else if (verb == "deposit") {
        cmd.type = verb;
        cmd.investor = c.next("investor id");
        p["amount"] = c.decimal("amount");
        if (!c.done()) p["preference"] = preference(c);
    } else if (verb == "withdraw") {
        cmd.type = verb;
        cmd.investor = c.next("investor id");
        p["fraction"] = c.decimal("fraction");
    } else if (verb == "cancel-withdraw") {
        cmd.type = verb;
        cmd.investor = c.next("investor id");
    } else if (verb == "set-preference") {
        cmd.type = verb;
        cmd.investor = c.next("investor id");
        p["preference"] = preference(c);
    } else if (verb == "deliver-received") {
        cmd.type = verb;
        p["alpha_rcvd"] = c.decimal("alpha tokens");
        p["beta_rcvd"] = c.decimal("beta tokens");
        p["gamma_rcvd"] = c.decimal("gamma tokens");
        p["cash_rcvd"] = c.decimal("cash");
    } else if (verb == "deliver-requested" || verb == "rebalance") {
        cmd.type = verb;
    } else {
        script_fail(c.line, "unknown command '" + verb + "'");
    }
    c.finish();
    return cmd;
}

std::string fixed(Decimal d, int places = 6) {
    std::string s = d.to_string();
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        s += '.';
        dot = s.size() - 1;
    }
    const std::size_t want = dot + 1 + static_cast<std::size_t>(places);
    if (s.size() < want) s.append(want - s.size(), '0');
    s.resize(want);
    if (s[0] == '-' && s.find_first_not_of("0.", 1) == std::string::npos) s.erase(0, 1);
    return s;
}

std::string pad(const std::string& s, std::size_t w, bool left = false) {
    if (s.size() >= w) return s;
    return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

/// Relative residual against `scale` with a pass mark at 1e-9.
std::string identity_cell(Decimal residual, Decimal scale) {
    const double rel = std::abs(residual.to_double()) / std::max(1.0, std::abs(scale.to_double()));
    return std::string(rel <= 1e-9 ? "pass " : "FAIL ") + sci(rel);
}

void row(std::ostringstream& out, const std::string& id, std::initializer_list<Decimal> cols) {
    out << pad(id, 12, true);
    for (Decimal d : cols) out << ' ' << pad(fixed(d), 16);
    out << '\n';
}

void header(std::ostringstream& out, std::initializer_list<const char*> cols) {
    out << pad("investor", 12, true);
    for (const char* c : cols) out << ' ' << pad(c, 16);
    out << '\n';
}

void write_cycle(std::ostringstream& out, std::size_t n, const CycleReport& r) {
    out << "== cycle " << n << "  " << r.date.to_string() << "  prices";
    for (Fund f : kFunds) out << ' ' << fund_name(f) << '=' << fixed(r.prices[f]);
    out << (r.full_population ? "  (full population)" : "") << '\n';

    if (!r.settlement.tokens.empty() || !r.settlement.cash.empty()) {
        out << "-- settlement\n";
        for (const auto& t : r.settlement.tokens)
            out << pad(t.id, 12, true) << ' ' << pad(std::string(fund_name(t.fund)), 6, true) << " tokens "
                << fixed(t.tokens) << " cost " << fixed(t.cost) << '\n';
        for (const auto& c : r.settlement.cash) out << pad(c.id, 12, true) << " cash   " << fixed(c.cash) << '\n';
    }
    if (!r.payouts.empty()) {
        out << "-- payouts\n";
        header(out, {"gross", "fee", "penalty", "net"});
        for (const auto& p : r.payouts) row(out, p.id, {p.gross, p.fee, p.penalty, p.net});
    }
    if (!r.orders.empty()) {
        out << "-- targets\n";
        header(out, {"inflow", "outflow", "inv_alpha", "inv_beta", "inv_gamma", "wdrw_alpha", "wdrw_beta", "wdrw_gamma",
                     "identity"});
        for (std::size_t i = 0; i < r.orders.size(); ++i) {
            const auto& o = r.orders[i];
            const Decimal res = i < r.identity_residuals.size() ? r.identity_residuals[i] : Decimal{};
            const std::string line = identity_cell(res, o.inflow + o.outflow + o.total_rebalance);
            std::ostringstream cells;
            row(cells, o.id, {o.inflow, o.outflow, o.inv[0], o.inv[1], o.inv[2], o.wdrw_qty[0], o.wdrw_qty[1], o.wdrw_qty[2]});
            std::string text = cells.str();
            text.pop_back();
            out << text << ' ' << line << '\n';
        }
        out << pad("aggregate", 12, true) << ' '
            << identity_cell(r.aggregate_residual, r.batch.inflow_total + r.batch.outflow_total) << '\n';
    }
    if (!r.crosses.empty()) {
        out << "-- internal crosses\n";
        for (const auto& x : r.crosses)
            out << pad(x.id, 12, true) << ' ' << pad(std::string(fund_name(x.fund)), 6, true) << " tokens "
                << pad(fixed(x.tokens), 16) << " cash " << pad(fixed(x.cash), 16) << '\n';
    }
    out << "-- external orders\n";
    out << pad("invest", 12, true);
    for (Decimal d : r.external_invest) out << ' ' << pad(fixed(d), 16);
    out << '\n' << pad("redeem", 12, true);
    for (Decimal d : r.external_redeem) out << ' ' << pad(fixed(d), 16);
    out << '\n';

}

}  // namespace

std::vector<ScenarioStep> parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
    std::vector<ScenarioStep> steps;
    std::string text;
    std::size_t n = 0;
    while (std::getline(in, text)) {
        ++n;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
        Cursor c;
        c.line = n;
        std::istringstream ss(text);
        for (std::string t; ss >> t;) c.tok.push_back(t);
        if (c.tok.empty()) continue;
        steps.push_back({n, parse_command(c, base_dir)});
    }
    return steps;
}

std::vector<ScenarioStep> load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open scenario '" + path.string() + "'");
    return parse_scenario(in, path.parent_path());
}

ScenarioRun run_scenario(const std::vector<ScenarioStep>& steps, const EngineConfig& config) {
    ScenarioRun run{std::make_unique<Engine>(config), steps};
    for (const auto& s : steps) {
        try {
            run.engine->apply(s.command);
        } catch (const Error& e) {
            script_fail(s.line, std::string(s.command.type) + ": " + e.what() + " [" + std::string(to_string(e.code())) + "]");
        }
    }
    return run;
}

std::string text_report(const Engine& engine) {
    if (engine.seq() == 0) return {};
    std::ostringstream out;
    const auto reports = engine.reports();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        write_cycle(out, i + 1, reports[i]);
        out << '\n';
    }

    const auto st = engine.state();
    out << "== final  " << st.clock.to_string() << "  cycles " << st.ledger.cycles << "  line_version " << st.line_version
        << '\n';
    if (st.line) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "line slope %.9f intercept %.9f (%s)\n", st.line->slope, st.line->intercept,
                      std::string(to_string(st.line->method)).c_str());
        out << buf;
    }
    header(out, {"alpha_qty", "beta_qty", "gamma_qty", "deposit", "cash_alloc", "withdraw", "paid_out", "fees_paid"});
    for (const auto& [id, a] : st.ledger.accounts)
        row(out, id, {a.qty[0], a.qty[1], a.qty[2], a.deposit_pending, a.cash_alloc, a.withdraw_pending, a.paid_out, a.fees_paid});
    out << "treasury " << fixed(st.ledger.treasury) << "  residual_cash " << fixed(st.ledger.residual_cash) << "  dust_cash "
        << fixed(st.ledger.dust_cash) << '\n';
    out << "residual_tokens";
    for (Decimal d : st.ledger.residual_tokens) out << ' ' << fixed(d);
    out << "  dust_tokens";
    for (Decimal d : st.ledger.dust_tokens) out << ' ' << fixed(d);
    out << "\nstate_hash " << engine.state_hash() << '\n';
    return out.str();
}

Json json_report(const Engine& engine) {
    Json cycles = Json::array();
    for (const auto& r : engine.reports()) cycles.push_back(r);
    return {{"cycles", cycles}, {"state", state_to_json(engine.state())}, {"state_hash", engine.state_hash()}};
}

}  // namespace parity
