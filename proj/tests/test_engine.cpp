#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "conservation.hpp"
#include "parity/engine.hpp"
#include "parity/error.hpp"

using namespace parity;

namespace {

Date day(const char* s) { return Date::parse(s); }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

Json funds_payload(const char* as_of = "2024-01-02") {
    return {{"funds",
             {{"alpha", {{"sigma", 0.20}, {"exp_return", 0.12}}},
              {"beta", {{"sigma", 0.10}, {"exp_return", 0.07}}},
              {"gamma", {{"sigma", 0.04}, {"exp_return", 0.035}}},
              {"correlations", {{"rho_ab", 0.3}, {"rho_bg", 0.1}, {"rho_ag", 0.2}}},
              {"as_of", as_of}}}};
}

Json prices_payload(const char* a, const char* b, const char* g) {
    return {{"alpha_price", a}, {"beta_price", b}, {"gamma_price", g}};
}

Json risk(double s) { return {{"preference", {{"mode", "risk"}, {"risk", s}}}}; }

/// Funds, prices and two funded investors.
std::vector<Command> setup() {
    const Date d = day("2024-01-02");
    return {
        {"set-funds", d, "", funds_payload()},
        {"set-prices", d, "", prices_payload("10", "5", "2")},
        {"create-investor", d, "ana", risk(0.12)},
        {"create-investor", d, "ben", {{"preference", {{"mode", "weights"}, {"weights", {{"w_alpha", 0.2}, {"w_beta", 0.3}, {"w_gamma", 0.5}}}}}}},
        {"deposit", d, "ana", {{"amount", "1000"}}},
        {"deposit", d, "ben", {{"amount", "500"}}},
    };
}

void apply_all(Engine& e, const std::vector<Command>& cmds) {
    for (const auto& c : cmds) e.apply(c);
}

}  // namespace

TEST_CASE("fresh engine has a stable hash and no line") {
    Engine a, b;
    CHECK(a.state_hash() == b.state_hash());
    CHECK(a.seq() == 0);
    CHECK(code_of([&] { a.quote(InvestorPreferenced::by_risk(0.1)); }) == ErrorCode::NotReady);
    CHECK(code_of([&] { a.frontier(); }) == ErrorCode::NotReady);
    CHECK(code_of([&] { a.line_info(); }) == ErrorCode::NotReady);
}

TEST_CASE("set-funds fits a line and realigns on refit") {
    Engine e;
    const auto r = e.apply({"set-funds", day("2024-01-02"), "", funds_payload()});
    CHECK(r.result.at("refit").get<bool>());
    REQUIRE(e.line());
    CHECK(e.line()->slope > 0.0);
    CHECK(e.state().line_version == 1);

    // A small move stays inside every fund's circle: no refit.
    auto p = funds_payload();
    p["funds"]["alpha"]["exp_return"] = 0.121;
    CHECK_FALSE(e.apply({"set-funds", day("2024-01-03"), "", p}).result.at("refit").get<bool>());
    CHECK(e.state().line_version == 1);

    e.apply({"create-investor", day("2024-01-03"), "x", risk(0.1)});
    const auto before = e.account("x")->allocation;

    // A jump far outside the circle forces a refit and realignment.
    p["funds"]["alpha"]["exp_return"] = 0.6;
    p["funds"]["alpha"]["sigma"] = 0.5;
    CHECK(e.apply({"set-funds", day("2024-01-04"), "", p}).result.at("refit").get<bool>());
    CHECK(e.state().line_version == 2);
    const auto after = e.account("x")->allocation;
    CHECK(after.line_version == 2);
    CHECK(after.weights != before.weights);
}

TEST_CASE("quote routes") {
    Engine e;
    e.apply({"set-funds", day("2024-01-02"), "", funds_payload()});
    const auto st = e.state();

    SUBCASE("weights (0,0,1) gives the gamma point") {
        const auto q = e.quote(InvestorPreferenced::by_weights({0, 0, 1}));
        CHECK(q.weights == WeightVectord{0, 0, 1});
        CHECK(q.exp_return_i == doctest::Approx(st.funds->gamma.exp_return));
        CHECK(q.sigma_i == doctest::Approx(st.funds->gamma.sigma));
    }
    SUBCASE("risk at the combined portfolio gives (w_ca, w_cb, 0)") {
        const auto q = e.quote(InvestorPreferenced::by_risk(st.combined->point.sigma));
        CHECK(q.weights.w_alpha == doctest::Approx(st.combined->w_c_alpha).epsilon(1e-12));
        CHECK(q.weights.w_beta == doctest::Approx(st.combined->w_c_beta).epsilon(1e-12));
        CHECK(std::abs(q.weights.w_gamma) < 1e-12);
    }
    SUBCASE("risk then return round-trips") {
        const auto a = e.quote(InvestorPreferenced::by_risk(0.08));
        const auto b = e.quote(InvestorPreferenced::by_return(a.exp_return_i));
        CHECK(b.sigma_i == doctest::Approx(0.08).epsilon(1e-12));
        CHECK(b.weights.w_alpha == doctest::Approx(a.weights.w_alpha).epsilon(1e-12));
        CHECK(b.weights.w_beta == doctest::Approx(a.weights.w_beta).epsilon(1e-12));
        CHECK(b.weights.w_gamma == doctest::Approx(a.weights.w_gamma).epsilon(1e-12));
    }
    SUBCASE("quotes are read-only") {
        const auto h = e.state_hash();
        e.quote(InvestorPreferenced::by_risk(0.1));
        e.frontier();
        e.line_info();
        CHECK(e.state_hash() == h);
        CHECK(e.events().size() == 1);
    }
}

TEST_CASE("failed commands change nothing") {
    Engine e;
    apply_all(e, setup());
    const auto hash = e.state_hash();
    const auto seq = e.seq();

    CHECK(code_of([&] { e.apply({"deposit", day("2024-01-02"), "nobody", {{"amount", "5"}}}); }) == ErrorCode::UnknownInvestor);
    CHECK(code_of([&] { e.apply({"deposit", day("2024-01-01"), "ana", {{"amount", "5"}}}); }) == ErrorCode::Conflict);
    CHECK(code_of([&] { e.apply({"create-investor", day("2024-01-02"), "ana", risk(0.1)}); }) == ErrorCode::Conflict);
    CHECK(code_of([&] { e.apply({"deposit", day("2024-01-02"), "ana", {{"amount", "-5"}}}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { e.apply({"set-prices", day("2024-01-02"), "", prices_payload("0", "1", "1")}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { e.apply({"rebalance", day("2024-01-09"), "", Json::object()}); }) == ErrorCode::StalePrices);
    CHECK(code_of([&] { e.apply({"bogus", day("2024-01-02"), "", Json::object()}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { e.apply({"deposit", day("2024-01-02"), "ana", Json::object()}); }) == ErrorCode::Parse);

    CHECK(e.state_hash() == hash);
    CHECK(e.seq() == seq);
    CHECK(e.events().size() == seq);
}

TEST_CASE("fees flow to the treasury") {
    Engine e;
    apply_all(e, setup());
    auto st = e.state();
    CHECK(st.ledger.treasury == Decimal::parse("7.5"));
    CHECK(e.account("ana")->deposit_pending == Decimal::parse("995"));

    // Preference change: 0.1% of 995 is under the cap.
    const auto r = e.apply({"set-preference", day("2024-01-02"), "ana", risk(0.05)});
    CHECK(r.result.at("fee").get<Decimal>() == Decimal::parse("0.995"));
    CHECK(e.account("ana")->fee_due == Decimal::parse("0.995"));

    // Deposit with a preference change pays the smaller of the two fees.
    const auto d = e.apply({"deposit", day("2024-01-02"), "ben", {{"amount", "100"}, {"preference", {{"mode", "risk"}, {"risk", 0.1}}}}});
    CHECK(d.result.at("fee").get<Decimal>() == Decimal::parse("0.4975"));
}

TEST_CASE("fee preview matches what the command charges") {
    Engine e;
    apply_all(e, setup());
    const auto preview = e.fee_preview("deposit", "ana", Decimal(200), false);
    const auto applied = e.apply({"deposit", day("2024-01-02"), "ana", {{"amount", "200"}}});
    CHECK(preview.at("fee") == applied.result.at("fee"));

    const auto pp = e.fee_preview("preference", "ana", std::nullopt, false);
    const auto pa = e.apply({"set-preference", day("2024-01-02"), "ana", risk(0.07)});
    CHECK(pp.at("fee") == pa.result.at("fee"));

    CHECK(code_of([&] { e.fee_preview("withdraw", "ghost", Decimal(1), false); }) == ErrorCode::UnknownInvestor);
    CHECK(code_of([&] { e.fee_preview("teleport", "", std::nullopt, false); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("deliver-requested fills every open order exactly") {
    Engine e;
    apply_all(e, setup());
    e.apply({"rebalance", day("2024-01-02"), "", Json::object()});
    auto st = e.state();
    FundAmounts open{};
    for (const auto& [id, a] : st.ledger.accounts)
        for (std::size_t f = 0; f < 3; ++f) open[f] += a.open_invest[f];
    CHECK_FALSE(all_zero(open));

    e.apply({"deliver-requested", day("2024-01-03"), "", Json::object()});
    e.apply({"set-prices", day("2024-01-03"), "", prices_payload("10", "5", "2")});
    e.apply({"rebalance", day("2024-01-03"), "", Json::object()});
    st = e.state();
    for (const auto& [id, a] : st.ledger.accounts) {
        CHECK(all_zero(a.open_invest));
        const Decimal value = token_value(a.qty, *st.prices);
        for (Fund f : kFunds) {
            const double frac = (at(a.qty, f) * (*st.prices)[f]).to_double() / value.to_double();
            CHECK(frac == doctest::Approx(at(a.weights(), f).to_double()).epsilon(1e-9));
        }
    }
}

TEST_CASE("replay reproduces every hash") {
    std::mt19937_64 rng(11);
    Engine e;
    for (const auto& c : oracle::random_script(rng, 4)) {
        try {
            e.apply(c);
        } catch (const Error&) {
        }
    }
    const auto events = e.events();
    auto again = Engine::replay(e.config(), events);
    CHECK(again->state_hash() == e.state_hash());
    CHECK(state_to_json(again->state()) == state_to_json(e.state()));

    // Tampering with a recorded hash is detected.
    auto bad = events;
    bad[3].state_hash[0] = bad[3].state_hash[0] == 'a' ? 'b' : 'a';
    CHECK(code_of([&] { Engine::replay(e.config(), bad); }) == ErrorCode::Conflict);
    // So is an altered payload.
    auto edited = events;
    for (auto& ev : edited)
        if (ev.command.type == "deposit") {
            ev.command.payload["amount"] = "1.23";
            break;
        }
    CHECK(code_of([&] { Engine::replay(e.config(), edited); }) == ErrorCode::Conflict);
}

TEST_CASE("event log and snapshots round-trip through files") {
    const auto dir = std::filesystem::temp_directory_path() / "parity_engine_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    EngineConfig cfg;
    cfg.snapshot_dir = (dir / "snaps").string();
    cfg.snapshot_every = 3;
    const auto log = (dir / "events.jsonl").string();

    std::string hash;
    {
        Engine e(cfg);
        e.attach_log(log);
        apply_all(e, setup());
        e.apply({"rebalance", day("2024-01-02"), "", Json::object()});
        hash = e.state_hash();
    }
    std::ifstream in(log);
    const auto events = read_event_log(in);
    REQUIRE(events.size() == 7);
    CHECK(Engine::replay(cfg, events)->state_hash() == hash);

    std::ifstream snap_in(dir / "snaps" / "snapshot-6.json");
    REQUIRE(snap_in);
    const auto snap = Json::parse(snap_in);
    CHECK(snap.at("seq") == 6);
    const auto restored = Engine::restore(cfg, snap, events);
    CHECK(restored->state_hash() == hash);
    CHECK(restored->seq() == 7);

    auto broken = snap;
    broken["state"]["ledger"]["treasury"] = "999";
    CHECK(code_of([&] { Engine::restore(cfg, broken); }) == ErrorCode::Conflict);
    std::filesystem::remove_all(dir);
}

TEST_CASE("conservation oracle agrees on random scripts") {
    std::mt19937_64 rng(5);
    for (int run = 0; run < 10; ++run) {
        Engine e;
        oracle::Conservation books(e.config().fees);
        for (const auto& c : oracle::random_script(rng, 5)) {
            try {
                books.observe(c, e.apply(c), e);
            } catch (const Error& err) {
                CHECK_MESSAGE(c.type != "rebalance", err.what());
            }
        }
        const auto problems = books.check(e);
        for (const auto& p : problems) FAIL_CHECK(p);
        CHECK(e.state().ledger.cycles == 6);
    }
}

TEST_CASE("concurrent readers see committed states only") {
    Engine e;
    apply_all(e, setup());
    std::atomic<bool> stop{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        while (!stop) {
            const auto st = e.state();
            Decimal total;
            for (const auto& [id, a] : st.ledger.accounts) total += a.deposit_pending;
            if (total + st.ledger.treasury != Decimal(1500) + Decimal(100) * static_cast<int>(st.seq - 6)) ++bad;
        }
    });
    for (int i = 0; i < 200; ++i) e.apply({"deposit", day("2024-01-02"), i % 2 ? "ana" : "ben", {{"amount", "100"}}});
    stop = true;
    reader.join();
    CHECK(bad == 0);
}
