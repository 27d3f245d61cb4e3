#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "parity/api.hpp"
#include "parity/engine.hpp"
#include "parity/error.hpp"
#include "parity/estimation.hpp"
#include "parity/frontier.hpp"
#include "parity/price_csv.hpp"
#include "parity/scenario.hpp"

using namespace parity;

namespace {

struct Source {
    std::string config;
    std::string log;
    std::string scenario;
};

EngineConfig load_config(const Source& src) {
    return src.config.empty() ? EngineConfig{} : EngineConfig::load(src.config);
}

std::string log_path(const Source& src, const EngineConfig& cfg) { return src.log.empty() ? cfg.event_log : src.log; }

std::vector<Event> read_log(const std::string& path) {
    if (path.empty() || !std::filesystem::exists(path)) return {};
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot read event log '" + path + "'");
    return read_event_log(in);
}

/// Engine state from a scenario run, or else from replaying the event log.
std::unique_ptr<Engine> open_engine(const Source& src, const EngineConfig& cfg) {
    if (!src.scenario.empty()) return std::move(run_scenario(load_scenario(src.scenario), cfg).engine);
    return Engine::replay(cfg, read_log(log_path(src, cfg)));
}

/// Replays the log, then appends new events to it.
std::unique_ptr<Engine> open_writable(const Source& src, const EngineConfig& cfg) {
    const auto path = log_path(src, cfg);
    if (path.empty()) fail(ErrorCode::InvalidArgument, "this command needs --log or event_log in the config");
    auto engine = Engine::replay(cfg, read_log(path));
    engine->attach_log(path);
    return engine;
}

Date command_date(const std::string& text, const Engine& engine) {
    return text.empty() ? engine.state().clock : Date::parse(text);
}

void add_source(CLI::App* app, Source& src, bool scenario = true) {
    app->add_option("--config", src.config, "Engine config file");
    app->add_option("--log", src.log, "Event log (JSON lines)");
    if (scenario) app->add_option("--scenario", src.scenario, "Build state by running a scenario script");
}

std::vector<PricePoint> read_prices(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    return read_price_csv(in);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
    out << text;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Parse:
        case ErrorCode::Script: return 2;
        case ErrorCode::Io: return 3;
        case ErrorCode::NotReady: return 4;
        case ErrorCode::Conflict: return 5;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parity fund engine"};
    app.require_subcommand(1);

    // ingest
    Source ingest_src;
    std::string ingest_csv, ingest_date;
    auto* ingest = app.add_subcommand("ingest", "Load a date,asset_id,price CSV; appends to the log when one is given");
    ingest->add_option("csv", ingest_csv, "Price CSV")->required();
    ingest->add_option("--date", ingest_date, "Command date (default: engine clock)");
    add_source(ingest, ingest_src, false);

    // estimate-line
    Source est_src;
    std::string est_csv, est_as_of;
    bool est_json = false;
    auto* estimate = app.add_subcommand("estimate-line", "Estimate fund points and fit the line from a price CSV");
    estimate->add_option("csv", est_csv, "Price CSV")->required();
    estimate->add_option("--as-of", est_as_of, "Last date used (default: latest)");
    estimate->add_flag("--json", est_json, "JSON output");
    estimate->add_option("--config", est_src.config, "Engine config file");

    // quote
    Source quote_src;
    std::optional<double> q_risk, q_ret;
    std::vector<double> q_weights;
    auto* quote = app.add_subcommand("quote", "Allocation for a risk, return or weights preference");
    add_source(quote, quote_src);
    auto* q_opts = quote->add_option_group("preference");
    q_opts->add_option("--risk", q_risk, "Risk tolerance (sigma)");
    q_opts->add_option("--return", q_ret, "Target expected return");
    q_opts->add_option("--weights", q_weights, "alpha beta gamma weights")->expected(3)->delimiter(',');
    q_opts->require_option(1);

    // simulate
    Source sim_src;
    std::string sim_script, sim_out, sim_events;
    bool sim_json = false;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario script and print its report");
    simulate->add_option("script", sim_script, "Scenario script")->required();
    simulate->add_option("--config", sim_src.config, "Engine config file");
    simulate->add_option("--out", sim_out, "Report file (default: stdout)");
    simulate->add_option("--events", sim_events, "Write the resulting event log here");
    simulate->add_flag("--json", sim_json, "JSON report");

    // rebalance
    Source reb_src;
    std::string reb_date;
    auto* rebalance = app.add_subcommand("rebalance", "Run one rebalance cycle against the event log");
    add_source(rebalance, reb_src, false);
    rebalance->add_option("--date", reb_date, "Cycle date (default: engine clock)");

    // export-frontier
    Source fr_src;
    std::optional<double> fr_slope, fr_intercept;
    std::optional<int> fr_points;
    std::string fr_out;
    auto* frontier = app.add_subcommand("export-frontier", "Write the display curve as CSV");
    add_source(frontier, fr_src);
    frontier->add_option("--slope", fr_slope, "Line slope (skips engine state)");
    frontier->add_option("--intercept", fr_intercept, "Line intercept");
    frontier->add_option("--points", fr_points, "Sample count");
    frontier->add_option("--out", fr_out, "CSV file (default: stdout)");

    // report
    Source rep_src;
    bool rep_json = false;
    std::string rep_out;
    auto* report = app.add_subcommand("report", "Cycle report for the event log or a scenario");
    add_source(report, rep_src);
    report->add_flag("--json", rep_json, "JSON report");
    report->add_option("--out", rep_out, "Report file (default: stdout)");

    // apply
    Source apply_src;
    std::string ap_type, ap_investor, ap_payload = "{}", ap_date;
    auto* apply = app.add_subcommand("apply", "Append one engine command to the event log");
    apply->add_option("type", ap_type, "Command type, e.g. deposit")->required();
    apply->add_option("--investor", ap_investor, "Investor id");
    apply->add_option("--payload", ap_payload, "JSON payload");
    apply->add_option("--date", ap_date, "Command date (default: engine clock)");
    add_source(apply, apply_src, false);

    // verify
    Source ver_src;
    std::string ver_snapshot;
    auto* verify = app.add_subcommand("verify", "Replay the event log and check every state hash");
    add_source(verify, ver_src, false);
    verify->add_option("--snapshot", ver_snapshot, "Start from this snapshot");

    // serve
    Source srv_src;
    std::string srv_host = "127.0.0.1";
    int srv_port = 8080;
    auto* serve = app.add_subcommand("serve", "HTTP API over the event log");
    add_source(serve, srv_src, false);
    serve->add_option("--host", srv_host, "Bind address");
    serve->add_option("--port", srv_port, "Port (0 picks a free one)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            const auto rows = read_prices(ingest_csv);
            const auto cfg = load_config(ingest_src);
            if (log_path(ingest_src, cfg).empty()) {
                PriceStore store;
                std::cout << store.ingest(rows) << '\n';
                return 0;
            }
            auto engine = open_writable(ingest_src, cfg);
            const auto applied = engine->apply({"ingest-prices", command_date(ingest_date, *engine), "", {{"rows", rows}}});
            std::cout << applied.result.at("rows").get<std::size_t>() << '\n';
        } else if (*estimate) {
            const auto cfg = load_config(est_src);
            PriceStore store;
            store.ingest(read_prices(est_csv));
            Date as_of;
            if (!est_as_of.empty()) {
                as_of = Date::parse(est_as_of);
            } else {
                for (const auto& id : cfg.asset_ids)
                    for (Date d : store.dates(id)) as_of = std::max(as_of, d);
            }
            const auto funds = estimate_funds(store, cfg, as_of);
            const auto line = fit_line(recent_history(store, cfg, as_of), funds, cfg);
            if (est_json) {
                std::cout << Json{{"line", line}, {"funds", funds}}.dump(2) << '\n';
            } else {
                std::cout << "slope " << num(line.slope) << "\nintercept " << num(line.intercept) << "\nmethod "
                          << to_string(line.method) << "\nas_of " << funds.as_of.to_string() << '\n';
                for (Fund f : kFunds)
                    std::cout << fund_name(f) << " sigma " << num(funds[f].sigma) << " exp_return " << num(funds[f].exp_return)
                              << '\n';
            }
        } else if (*quote) {
            const auto cfg = load_config(quote_src);
            auto engine = open_engine(quote_src, cfg);
            InvestorPreferenced pref;
            if (q_risk)
                pref = InvestorPreferenced::by_risk(*q_risk);
            else if (q_ret)
                pref = InvestorPreferenced::by_return(*q_ret);
            else
                pref = InvestorPreferenced::by_weights({q_weights.at(0), q_weights.at(1), q_weights.at(2)});
            std::cout << Json(engine->quote(pref)).dump(2) << '\n';
        } else if (*simulate) {
            const auto cfg = load_config(sim_src);
            auto run = run_scenario(load_scenario(sim_script), cfg);
            write_text(sim_out, sim_json ? json_report(*run.engine).dump(2) + "\n" : text_report(*run.engine));
            if (!sim_events.empty()) {
                std::ostringstream out;
                for (const auto& e : run.engine->events()) out << event_to_json(e).dump() << '\n';
                write_text(sim_events, out.str());
            }
        } else if (*rebalance) {
            auto engine = open_writable(reb_src, load_config(reb_src));
            const auto applied = engine->apply({"rebalance", command_date(reb_date, *engine), "", Json::object()});
            std::cout << applied.result.dump(2) << '\n';
        } else if (*frontier) {
            const auto cfg = load_config(fr_src);
            ParityLined line;
            if (fr_slope || fr_intercept) {
                if (!fr_slope || !fr_intercept) fail(ErrorCode::InvalidArgument, "--slope and --intercept go together");
                line.slope = *fr_slope;
                line.intercept = *fr_intercept;
            } else {
                auto engine = open_engine(fr_src, cfg);
                const auto l = engine->line();
                if (!l) fail(ErrorCode::NotReady, "no line has been established yet");
                line = *l;
            }
            const auto spec = build_parabola(line, cfg.view_constant, cfg.tangency_constant, cfg.height_constant);
            std::ostringstream out;
            out << "x,y_upper,y_lower\n";
            for (const auto& s : sample_curve(spec, fr_points.value_or(cfg.curve_points)))
                out << num(s.x) << ',' << num(s.y_upper) << ',' << num(s.y_lower) << '\n';
            out << "line," << num(line.slope) << ',' << num(line.intercept) << '\n';
            write_text(fr_out, out.str());
        } else if (*report) {
            const auto cfg = load_config(rep_src);
            auto engine = open_engine(rep_src, cfg);
            write_text(rep_out, rep_json ? json_report(*engine).dump(2) + "\n" : text_report(*engine));
        } else if (*apply) {
            auto engine = open_writable(apply_src, load_config(apply_src));
            const auto applied = engine->apply({ap_type, command_date(ap_date, *engine), ap_investor, Json::parse(ap_payload)});
            std::cout << Json{{"seq", applied.event.seq}, {"state_hash", applied.event.state_hash}, {"result", applied.result}}.dump(2)
                      << '\n';
        } else if (*verify) {
            const auto cfg = load_config(ver_src);
            const auto events = read_log(log_path(ver_src, cfg));
            std::unique_ptr<Engine> engine;
            if (ver_snapshot.empty()) {
                engine = Engine::replay(cfg, events);
            } else {
                std::ifstream in(ver_snapshot);
                if (!in) fail(ErrorCode::Io, "cannot read snapshot '" + ver_snapshot + "'");
                engine = Engine::restore(cfg, Json::parse(in), events);
            }
            std::cout << "seq " << engine->seq() << "\nstate_hash " << engine->state_hash() << '\n';
        } else if (*serve) {
            const auto cfg = load_config(srv_src);
            const auto path = log_path(srv_src, cfg);
            auto engine = Engine::replay(cfg, read_log(path));
            if (!path.empty()) engine->attach_log(path);
            Api api(*engine);
            HttpServer server(api);
            const int port = server.bind(srv_host, srv_port);
            std::cout << "listening on " << srv_host << ':' << port << std::endl;
            server.listen();
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const Json::exception& e) {
        std::cerr << "error: parse: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
