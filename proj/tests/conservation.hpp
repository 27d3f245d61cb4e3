#pragma once

// Brute-force accounting oracle. It rebuilds every investor's books from the
// command stream and the cycle reports alone (additions and subtractions of
// reported transfers, plus its own FIFO penalty walk) and checks them, and
// two global conservation identities, against the engine's state.

#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "parity/engine.hpp"

namespace oracle {

using parity::Decimal;
using parity::FundAmounts;

struct Book {
    FundAmounts qty{};
    Decimal cash;  // deposit_pending + cash_alloc
    FundAmounts open_invest{};
    FundAmounts open_redeem{};
    Decimal withdraw;
    Decimal fee_due;
    Decimal paid_out;
    Decimal fees_paid;
    std::vector<parity::DepositLot> lots;
};

inline Decimal tier_rate(long days, const parity::FeeSchedule& fees) {
    for (const auto& t : fees.redemption_tiers)
        if (days < t.max_holding_days) return t.penalty_rate;
    return Decimal{};
}

class Conservation {
public:
    explicit Conservation(parity::FeeSchedule fees) : fees_(std::move(fees)) {}

    /// Feed every successfully applied command, in order.
    void observe(const parity::Command& c, const parity::Applied& applied, const parity::Engine& engine) {
        using parity::Json;
        const Json& r = applied.result;
        const std::string& t = c.type;
        if (t == "create-investor") {
            books_[c.investor];
        } else if (t == "deposit") {
            auto& b = books_.at(c.investor);
            const auto fee = r.at("fee").get<Decimal>();
            const auto net = r.at("net").get<Decimal>();
            b.cash += net;
            b.fees_paid += fee;
            b.lots.push_back({c.date, net});
            treasury_ += fee;
            gross_deposits_ += net + fee;
        } else if (t == "set-preference") {
            books_.at(c.investor).fee_due += r.at("fee").get<Decimal>();
        } else if (t == "withdraw") {
            books_.at(c.investor).withdraw = r.get<parity::InvestorAccount>().withdraw_pending;
        } else if (t == "cancel-withdraw") {
            books_.at(c.investor).withdraw = Decimal{};
        } else if (t == "deliver-received") {
            const auto rcv = c.payload.get<parity::ReceivedAssets>();
            for (std::size_t f = 0; f < 3; ++f) delivered_tokens_[f] += rcv.tokens[f];
            delivered_cash_ += rcv.cash;
        } else if (t == "deliver-requested") {
            FundAmounts inv{}, red{};
            for (const auto& [id, b] : books_)
                for (std::size_t f = 0; f < 3; ++f) {
                    inv[f] += b.open_invest[f];
                    red[f] += b.open_redeem[f];
                }
            for (std::size_t f = 0; f < 3; ++f) {
                delivered_tokens_[f] += inv[f] / order_prices_[f];
                delivered_cash_ += red[f] * order_prices_[f];
            }
        } else if (t == "rebalance") {
            cycle(engine.reports().back());
        }
    }

    /// Mismatch descriptions; empty when the engine agrees.
    std::vector<std::string> check(const parity::Engine& engine) const {
        std::vector<std::string> out;
        const auto st = engine.state();
        auto expect = [&](bool ok, const std::string& what) {
            if (!ok) out.push_back(what);
        };
        for (const auto& [id, b] : books_) {
            const auto it = st.ledger.accounts.find(id);
            if (it == st.ledger.accounts.end()) {
                out.push_back(id + ": missing");
                continue;
            }
            const auto& a = it->second;
            expect(a.qty == b.qty, id + ": qty");
            expect(a.deposit_pending + a.cash_alloc == b.cash, id + ": cash " + (a.deposit_pending + a.cash_alloc).to_string() +
                                                                     " vs " + b.cash.to_string());
            expect(a.open_invest == b.open_invest, id + ": open_invest");
            expect(a.open_redeem == b.open_redeem, id + ": open_redeem");
            expect(a.withdraw_pending == b.withdraw, id + ": withdraw_pending");
            expect(a.fee_due == b.fee_due, id + ": fee_due");
            expect(a.paid_out == b.paid_out, id + ": paid_out");
            expect(a.fees_paid == b.fees_paid, id + ": fees_paid");
            expect(a.deposit_lots == b.lots, id + ": deposit lots");
        }
        expect(st.ledger.accounts.size() == books_.size(), "account count");
        expect(st.ledger.treasury == treasury_, "treasury");
        if (!penalty_ok_) out.push_back("redemption penalty differs from the FIFO walk");

        // Tokens: held + unallocated + dust = delivered - redeemed.
        for (std::size_t f = 0; f < 3; ++f) {
            Decimal held, open_redeem;
            for (const auto& [id, a] : st.ledger.accounts) {
                held += a.qty[f];
                open_redeem += a.open_redeem[f];
            }
            const Decimal lhs = held + st.ledger.residual_tokens[f] + st.ledger.dust_tokens[f] + st.inbox.tokens[f];
            const Decimal rhs = delivered_tokens_[f] - external_redeem_[f] + open_redeem;
            expect(lhs == rhs, "token identity, fund " + std::to_string(f) + ": " + lhs.to_string() + " vs " + rhs.to_string());
        }
        // Cash: balances + treasury + unallocated + dust
        //     = deposits + delivered - paid out - spent on purchases.
        Decimal balances, open_invest;
        for (const auto& [id, a] : st.ledger.accounts) {
            balances += a.deposit_pending + a.cash_alloc;
            open_invest += parity::sum(a.open_invest);
        }
        const Decimal lhs = balances + st.ledger.treasury + st.ledger.residual_cash + st.ledger.dust_cash + st.inbox.cash;
        const Decimal rhs = gross_deposits_ + delivered_cash_ - net_paid_ - parity::sum(external_invest_) + open_invest;
        expect(lhs == rhs, "cash identity: " + lhs.to_string() + " vs " + rhs.to_string());
        return out;
    }

private:
    void cycle(const parity::CycleReport& r) {
        for (const auto& a : r.settlement.tokens) {
            auto& b = books_.at(a.id);
            const auto f = parity::index(a.fund);
            b.qty[f] += a.tokens;
            b.open_invest[f] -= a.cost;
            b.cash -= a.cost;
        }
        for (const auto& a : r.settlement.cash) {
            auto& b = books_.at(a.id);
            b.cash += a.cash;
            for (std::size_t f = 0; f < 3; ++f) {
                b.qty[f] -= a.tokens_redeemed[f];
                b.open_redeem[f] -= a.tokens_redeemed[f];
            }
        }
        for (const auto& p : r.payouts) {
            auto& b = books_.at(p.id);
            const Decimal to_investor = p.gross - p.fee;
            penalty_ok_ = penalty_ok_ && fifo(b, to_investor, r.date) == p.penalty && p.net == to_investor - p.penalty;
            b.cash -= p.gross;
            b.fee_due -= p.fee;
            b.withdraw -= to_investor;
            b.paid_out += p.net;
            b.fees_paid += p.fee + p.penalty;
            treasury_ += p.fee + p.penalty;
            net_paid_ += p.net;
        }
        for (const auto& x : r.crosses) {
            auto& b = books_.at(x.id);
            b.qty[parity::index(x.fund)] += x.tokens;
            b.cash += x.cash;
        }
        for (const auto& pl : r.placements) {
            auto& b = books_.at(pl.id);
            for (std::size_t f = 0; f < 3; ++f) {
                b.open_invest[f] += pl.invest[f];
                b.open_redeem[f] += pl.redeem[f];
                external_invest_[f] += pl.invest[f];
                external_redeem_[f] += pl.redeem[f];
            }
        }
        order_prices_ = r.prices.price;
    }

    /// Oldest lots first; each slice pays its own age's rate.
    Decimal fifo(Book& b, Decimal amount, parity::Date today) const {
        Decimal penalty;
        std::vector<parity::DepositLot> keep;
        for (const auto& lot : b.lots) {
            const Decimal take = amount < lot.amount ? amount : lot.amount;
            if (take.is_positive()) penalty += take * tier_rate(today.days_since(lot.when), fees_);
            amount -= take;
            if (lot.amount - take > Decimal{}) keep.push_back({lot.when, lot.amount - take});
        }
        b.lots = std::move(keep);
        return penalty;
    }

    parity::FeeSchedule fees_;
    std::map<std::string, Book> books_;
    Decimal treasury_, gross_deposits_, delivered_cash_, net_paid_;
    FundAmounts delivered_tokens_{}, external_invest_{}, external_redeem_{};
    FundAmounts order_prices_{Decimal(1), Decimal(1), Decimal(1)};
    bool penalty_ok_ = true;
};

/// Random multi-cycle script: three investors, `cycles` rebalances with
/// drifting prices, deposits, withdrawals, preference changes and full,
/// partial or missing deliveries. Commands are returned unapplied.
inline std::vector<parity::Command> random_script(std::mt19937_64& rng, int cycles, int investors = 3) {
    using parity::Command;
    using parity::Json;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto dec = [](double v, int places = 6) {
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(places);
        s << v;
        return s.str();
    };
    auto pref = [&]() -> Json {
        const double k = u(rng);
        if (k < 0.4) return {{"mode", "risk"}, {"risk", 0.03 + 0.2 * u(rng)}};
        if (k < 0.7) return {{"mode", "return"}, {"ret", 0.04 + 0.08 * u(rng)}};
        double a = u(rng), b = u(rng), g = u(rng);
        const double s = a + b + g;
        a /= s;
        b /= s;
        return {{"mode", "weights"}, {"weights", {{"w_alpha", a}, {"w_beta", b}, {"w_gamma", 1.0 - a - b}}}};
    };

    std::vector<Command> out;
    parity::Date day = parity::Date::parse("2024-01-01");
    double px[3] = {10.0 + 5 * u(rng), 5.0 + 3 * u(rng), 2.0 + u(rng)};
    auto set_prices = [&] {
        out.push_back({"set-prices", day, "", {{"alpha_price", dec(px[0])}, {"beta_price", dec(px[1])}, {"gamma_price", dec(px[2])}}});
    };
    out.push_back({"set-funds", day, "",
                   {{"funds",
                     {{"alpha", {{"sigma", 0.20}, {"exp_return", 0.12}}},
                      {"beta", {{"sigma", 0.10}, {"exp_return", 0.07}}},
                      {"gamma", {{"sigma", 0.04}, {"exp_return", 0.035}}},
                      {"correlations", {{"rho_ab", 0.3}, {"rho_bg", 0.1}, {"rho_ag", 0.2}}},
                      {"as_of", day}}}}});
    set_prices();
    for (int i = 0; i < investors; ++i) {
        const std::string id = "inv" + std::to_string(i);
        out.push_back({"create-investor", day, id, {{"preference", pref()}}});
        out.push_back({"deposit", day, id, {{"amount", dec(100 + 2000 * u(rng), 2)}}});
    }
    for (int c = 0; c < cycles; ++c) {
        out.push_back({"rebalance", day, "", Json::object()});
        day = day.plus_days(1 + static_cast<long>(40 * u(rng)));
        for (double& p : px) p *= std::exp(0.05 * (u(rng) - 0.5));
        const double d = u(rng);
        if (d < 0.6) {
            out.push_back({"deliver-requested", day, "", Json::object()});
        } else if (d < 0.85) {
            out.push_back({"deliver-received", day, "",
                           {{"alpha_rcvd", dec(20 * u(rng))}, {"beta_rcvd", dec(30 * u(rng))},
                            {"gamma_rcvd", dec(50 * u(rng))}, {"cash_rcvd", dec(200 * u(rng), 2)}}});
        }
        set_prices();
        for (int i = 0; i < investors; ++i) {
            const std::string id = "inv" + std::to_string(i);
            const double k = u(rng);
            if (k < 0.25)
                out.push_back({"deposit", day, id, {{"amount", dec(10 + 500 * u(rng), 2)}}});
            else if (k < 0.45)
                out.push_back({"withdraw", day, id, {{"fraction", dec(0.05 + 0.5 * u(rng), 4)}}});
            else if (k < 0.55)
                out.push_back({"set-preference", day, id, {{"preference", pref()}}});
            else if (k < 0.6)
                out.push_back({"cancel-withdraw", day, id, Json::object()});
        }
    }
    out.push_back({"rebalance", day, "", Json::object()});
    return out;
}

}  // namespace oracle
