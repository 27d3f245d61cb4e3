#include "parity/ledger.hpp"

#include <algorithm>

#include "parity/error.hpp"

namespace parity {

namespace {

void require_nonnegative(Decimal d, const char* what) {
    if (d.is_negative()) fail(ErrorCode::InvalidArgument, std::string(what) + " must be nonnegative");
}

/// Pays from pending deposits first, then allocated cash.
void spend(InvestorAccount& a, Decimal amount) {
    const Decimal from_deposit = min(amount, a.deposit_pending);
    a.deposit_pending -= from_deposit;
    const Decimal rest = amount - from_deposit;
    if (rest > a.cash_alloc) fail(ErrorCode::Insolvent, "account " + a.id + " cannot cover " + amount.to_string());
    a.cash_alloc -= rest;
}

FundAmounts operator+(const FundAmounts& a, const FundAmounts& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

}  // namespace

Decimal sum(const FundAmounts& a) { return a[0] + a[1] + a[2]; }
bool all_zero(const FundAmounts& a) { return a[0].is_zero() && a[1].is_zero() && a[2].is_zero(); }

void FundPrices::validate() const {
    for (Fund f : kFunds)
        if (!(*this)[f].is_positive())
            fail(ErrorCode::InvalidArgument, std::string(fund_name(f)) + " price must be positive");
}

Decimal token_value(const FundAmounts& qty, const FundPrices& prices) {
    Decimal v;
    for (Fund f : kFunds) v += at(qty, f) * prices[f];
    return v;
}

void ReceivedAssets::validate() const {
    for (const Decimal& t : tokens) require_nonnegative(t, "received tokens");
    require_nonnegative(cash, "received cash");
}

std::string_view to_string(SplitStrategy s) {
    switch (s) {
        case SplitStrategy::Sequential: return "sequential";
        case SplitStrategy::Proportional: return "proportional";
        case SplitStrategy::MinThreshold: return "min-threshold";
    }
    return "?";
}

SplitStrategy parse_split_strategy(std::string_view text) {
    if (text == "sequential") return SplitStrategy::Sequential;
    if (text == "proportional") return SplitStrategy::Proportional;
    if (text == "min-threshold") return SplitStrategy::MinThreshold;
    fail(ErrorCode::InvalidArgument, "unknown split strategy '" + std::string(text) + "'");
}

FundAmounts InvestorAccount::weights() const {
    const Decimal wa = Decimal::from_double(allocation.weights.w_alpha);
    Decimal wb = Decimal::from_double(allocation.weights.w_beta);
    Decimal wg = Decimal::one() - wa - wb;
    if (wg.is_negative()) {
        wb += wg;
        wg = Decimal{};
    }
    return {wa, wb, wg};
}

Decimal InvestorAccount::free_cash() const { return clamp_nonnegative(deposit_pending + cash_alloc - committed_cash()); }

// ---- per-investor ----------------------------------------------------------

InvestorAccount accrue_deposit(InvestorAccount account, Decimal amount, Date when) {
    if (!amount.is_positive()) fail(ErrorCode::InvalidArgument, "deposit amount must be positive");
    account.deposit_pending += amount;
    account.deposit_lots.push_back({when, amount});
    return account;
}

InvestorAccount accrue_withdraw(InvestorAccount account, Decimal fraction, const FundPrices& prices) {
    if (fraction.is_negative() || fraction > Decimal::one())
        fail(ErrorCode::InvalidArgument, "withdraw fraction must lie in [0, 1]");
    if (fraction.is_zero()) return account;
    if (!account.withdraw_open) {
        account.avail_for_withdraw = clamp_nonnegative(account.deposit_pending + account.cash_alloc +
                                                       token_value(account.qty, prices) - account.withdraw_pending -
                                                       account.fee_due);
        account.withdraw_open = true;
    }
    const Decimal amount = account.avail_for_withdraw * fraction;
    account.withdraw_pending += amount;
    account.avail_for_withdraw -= amount;
    return account;
}

InvestorAccount cancel_withdraw(InvestorAccount account) {
    account.withdraw_pending = Decimal{};
    account.avail_for_withdraw = Decimal{};
    account.withdraw_open = false;
    return account;
}

NetFlows net_investor_flows(const InvestorAccount& account) {
    const Decimal in = account.deposit_pending + account.cash_alloc;
    const Decimal out = account.withdraw_pending + account.fee_due;
    return {clamp_nonnegative(in - out), clamp_nonnegative(out - in)};
}

Decimal intrinsic_value(const InvestorAccount& account, const FundPrices& prices) {
    const NetFlows flows = net_investor_flows(account);
    const Decimal v = flows.inflow + token_value(account.qty, prices) - flows.outflow;
    if (v.is_negative()) fail(ErrorCode::Insolvent, "account " + account.id + " has negative intrinsic value");
    return v;
}

InvestorFlowOrder target_flows(const InvestorAccount& account, const FundPrices& prices) {
    InvestorFlowOrder o;
    o.id = account.id;
    o.priced_at = prices.as_of;
    const NetFlows flows = net_investor_flows(account);
    o.inflow = flows.inflow;
    o.outflow = flows.outflow;
    o.intrinsic_value = intrinsic_value(account, prices);
    const FundAmounts w = account.weights();
    for (Fund f : kFunds) {
        const Decimal p = prices[f];
        const Decimal target = o.intrinsic_value * at(w, f);
        const Decimal current = at(account.qty, f) * p;
        if (target > current)
            at(o.inv, f) = target - current;
        else
            at(o.wdrw_qty, f) = clamp_nonnegative(at(account.qty, f) - target / p);
        o.total_rebalance += at(o.inv, f) + at(o.wdrw_qty, f) * p;
    }
    o.total_rebalance += o.inflow + o.outflow;
    return o;
}

Decimal flow_identity_residual(const InvestorFlowOrder& order, const FundPrices& prices) {
    Decimal r = order.inflow - order.outflow;
    for (Fund f : kFunds) r += at(order.wdrw_qty, f) * prices[f] - at(order.inv, f);
    return r;
}

// ---- batch -----------------------------------------------------------------

RebalanceBatch aggregate(std::span<const InvestorFlowOrder> orders, const PendingOrders& pending, const FundPrices& prices) {
    prices.validate();
    RebalanceBatch b;
    b.prices = prices;
    b.pending = pending;
    Decimal net;
    for (const auto& o : orders) {
        if (o.priced_at != prices.as_of)
            fail(ErrorCode::StalePrices, "order for " + o.id + " priced at " + o.priced_at.to_string() +
                                             ", batch at " + prices.as_of.to_string());
        b.investor_set.push_back(o.id);
        b.sum_inv = b.sum_inv + o.inv;
        b.sum_wdrw = b.sum_wdrw + o.wdrw_qty;
        net += o.inflow - o.outflow;
    }
    b.inflow_total = clamp_nonnegative(net);
    b.outflow_total = clamp_nonnegative(-net);

    // Nets an invest amount against a withdraw quantity so at most one
    // side stays positive.
    auto cross = [](Decimal inv, Decimal wdrw, Decimal p, Decimal& inv_out, Decimal& wdrw_out) {
        if (inv > wdrw * p) {
            inv_out = inv - wdrw * p;
            wdrw_out = Decimal{};
        } else {
            inv_out = Decimal{};
            wdrw_out = clamp_nonnegative(wdrw - inv / p);
        }
    };
    for (Fund f : kFunds) {
        const std::size_t i = index(f);
        const Decimal p = prices[f];
        cross(b.sum_inv[i], b.sum_wdrw[i], p, b.pa_inv[i], b.pa_wdrw[i]);
        const Decimal a = clamp_nonnegative(b.sum_inv[i] - pending.deposits[i]);
        const Decimal w = clamp_nonnegative(b.sum_wdrw[i] - pending.withdraws[i]);
        cross(a, w, p, b.net_inv[i], b.net_wdrw[i]);
    }
    b.avl_deposit = clamp_nonnegative(b.inflow_total - sum(pending.deposits));
    return b;
}

Decimal aggregate_identity_residual(const RebalanceBatch& batch) {
    Decimal r = batch.inflow_total - batch.outflow_total;
    for (Fund f : kFunds) r += at(batch.pa_wdrw, f) * batch.prices[f] - at(batch.pa_inv, f);
    return r;
}

FundAmounts split_deposit(Decimal available, const FundAmounts& needs, const SplitRule& rule) {
    require_nonnegative(available, "available cash");
    for (const Decimal& n : needs) require_nonnegative(n, "fund need");
    const Decimal total = sum(needs);
    if (total <= available) return needs;

    FundAmounts out{};
    switch (rule.strategy) {
        case SplitStrategy::Sequential: {
            Decimal left = available;
            for (std::size_t i = 0; i < 3; ++i) {
                out[i] = min(needs[i], left);
                left -= out[i];
            }
            break;
        }
        case SplitStrategy::Proportional:
            for (std::size_t i = 0; i < 3; ++i) out[i] = Decimal::mul_div(available, needs[i], total);
            break;
        case SplitStrategy::MinThreshold: {
            std::array<bool, 3> live{};
            for (std::size_t i = 0; i < 3; ++i) live[i] = needs[i].is_positive();
            for (;;) {
                Decimal live_total;
                for (std::size_t i = 0; i < 3; ++i)
                    if (live[i]) live_total += needs[i];
                out = {};
                if (live_total.is_zero()) break;
                for (std::size_t i = 0; i < 3; ++i)
                    if (live[i])
                        out[i] = live_total <= available ? needs[i] : Decimal::mul_div(available, needs[i], live_total);
                bool dropped = false;
                for (std::size_t i = 0; i < 3; ++i)
                    if (live[i] && out[i] < rule.min_tx) {
                        live[i] = false;
                        dropped = true;
                    }
                if (!dropped) break;
            }
            break;
        }
    }
    return out;
}

Settlement allocate_received(std::map<std::string, InvestorAccount>& accounts, const ReceivedAssets& pool,
                             const FundPrices& order_prices) {
    pool.validate();
    Settlement s;
    for (Fund f : kFunds) {
        const std::size_t i = index(f);
        Decimal requested;
        for (const auto& [id, a] : accounts) requested += a.open_invest[i];
        Decimal remaining = pool.tokens[i];
        if (remaining.is_positive() && requested.is_positive()) {
            const Decimal snapshot = remaining;
            for (auto& [id, a] : accounts) {
                const Decimal open = a.open_invest[i];
                if (!open.is_positive()) continue;
                const Decimal alloc = min(Decimal::mul_div(snapshot, open, requested), remaining);
                if (alloc.is_zero()) continue;
                const Decimal cost = min(alloc * order_prices[f], open);
                a.qty[i] += alloc;
                a.open_invest[i] -= cost;
                spend(a, cost);
                remaining -= alloc;
                s.tokens.push_back({id, f, alloc, cost});
            }
        }
        s.residual_tokens[i] = remaining;
    }

    Decimal requested_value;
    for (const auto& [id, a] : accounts) requested_value += token_value(a.open_redeem, order_prices);
    Decimal remaining = pool.cash;
    if (remaining.is_positive() && requested_value.is_positive()) {
        const Decimal snapshot = remaining;
        for (auto& [id, a] : accounts) {
            const Decimal value = token_value(a.open_redeem, order_prices);
            if (!value.is_positive()) continue;
            const Decimal cash = min(Decimal::mul_div(snapshot, value, requested_value), remaining);
            if (cash.is_zero()) continue;
            const Decimal covered = min(cash, value);
            CashAllocation ca{id, cash, {}};
            for (std::size_t i = 0; i < 3; ++i) {
                const Decimal open = a.open_redeem[i];
                if (open.is_zero()) continue;
                const Decimal dq = min(Decimal::mul_div(covered, open, value), open);
                a.open_redeem[i] -= dq;
                a.qty[i] -= dq;
                ca.tokens_redeemed[i] = dq;
            }
            a.cash_alloc += cash;
            remaining -= cash;
            s.cash.push_back(std::move(ca));
        }
    }
    s.residual_cash = remaining;
    return s;
}

// ---- cycle -----------------------------------------------------------------

void check_fresh(const FundPrices& prices, Date today, long max_age_days) {
    const long age = today.days_since(prices.as_of);
    if (age < 0) fail(ErrorCode::StalePrices, "prices dated " + prices.as_of.to_string() + " are after " + today.to_string());
    if (age > max_age_days)
        fail(ErrorCode::StalePrices, "prices dated " + prices.as_of.to_string() + " are " + std::to_string(age) +
                                         " days old (max " + std::to_string(max_age_days) + ")");
}

namespace {

bool is_active(const InvestorAccount& a, const InvestorFlowOrder& o, const CycleConfig& cfg) {
    if (a.deposit_pending.is_positive() || a.cash_alloc.is_positive() || a.withdraw_pending.is_positive() ||
        a.fee_due.is_positive())
        return true;
    if (a.allocation.line_version != cfg.line_version) return true;
    const Decimal misalignment = o.total_rebalance - o.inflow - o.outflow;
    return misalignment > cfg.misalignment_threshold;
}

struct Leg {
    InvestorAccount* account;
    FundAmounts buy{};   // funded cash for new purchases
    FundAmounts sell{};  // new redemption quantities
};

/// Settles what is due (fees first, then the withdrawal) from uncommitted cash.
void pay_out(InvestorAccount& a, const CycleConfig& cfg, LedgerState& st, CycleReport& rep) {
    const Decimal due = a.fee_due + a.withdraw_pending;
    const Decimal gross = min(due, a.free_cash());
    if (!gross.is_positive()) return;
    Payout p{a.id, gross, min(a.fee_due, gross), {}, {}};
    const Decimal to_investor = gross - p.fee;
    const LotRedemption lots = redeem_fifo(a.deposit_lots, to_investor, cfg.today, cfg.fees);
    p.penalty = lots.penalty;
    p.net = to_investor - p.penalty;
    spend(a, gross);
    a.fee_due -= p.fee;
    a.withdraw_pending -= to_investor;
    a.deposit_lots = lots.remaining;
    a.paid_out += p.net;
    a.fees_paid += p.fee + p.penalty;
    st.treasury += p.fee + p.penalty;
    rep.payouts.push_back(std::move(p));
}

/// Matches new purchases against new redemptions of one fund at the current
/// price. Sellers deliver pro-rata to the crossed quantity, buyers receive
/// pro-rata from what was delivered, and the side that is fully crossed has
/// its truncation crumbs dropped. Unattributed residues go to dust.
void cross_fund(std::vector<Leg>& legs, Fund f, Decimal p, LedgerState& st, CycleReport& rep) {
    const std::size_t i = index(f);
    Decimal buy_total, sell_total;
    for (const auto& l : legs) {
        buy_total += l.buy[i];
        sell_total += l.sell[i];
    }
    if (!buy_total.is_positive() || !sell_total.is_positive()) return;

    const Decimal crossed = min(sell_total, buy_total / p);
    const bool sellers_closed = crossed == sell_total;

    std::vector<Decimal> delivered_by(legs.size());
    Decimal delivered;
    for (std::size_t k = 0; k < legs.size(); ++k) {
        if (!legs[k].sell[i].is_positive()) continue;
        delivered_by[k] = Decimal::mul_div(crossed, legs[k].sell[i], sell_total);
        delivered += delivered_by[k];
    }

    Decimal received, paid;
    for (std::size_t k = 0; k < legs.size(); ++k) {
        Leg& l = legs[k];
        if (!l.buy[i].is_positive()) continue;
        const Decimal tokens = Decimal::mul_div(delivered, l.buy[i], buy_total);
        const Decimal cash = tokens * p;
        if (!tokens.is_zero()) {
            l.account->qty[i] += tokens;
            spend(*l.account, cash);
            rep.crosses.push_back({l.account->id, f, tokens, -cash});
        }
        received += tokens;
        paid += cash;
        l.buy[i] = sellers_closed ? l.buy[i] - cash : Decimal{};
    }

    Decimal proceeds_total;
    for (std::size_t k = 0; k < legs.size(); ++k) {
        Leg& l = legs[k];
        if (!l.sell[i].is_positive()) continue;
        const Decimal tokens = delivered_by[k];
        const Decimal cash = delivered.is_zero() ? Decimal{} : Decimal::mul_div(paid, tokens, delivered);
        if (!tokens.is_zero()) {
            l.account->qty[i] -= tokens;
            l.account->cash_alloc += cash;
            rep.crosses.push_back({l.account->id, f, -tokens, cash});
        }
        proceeds_total += cash;
        l.sell[i] = sellers_closed ? Decimal{} : l.sell[i] - tokens;
    }

    st.dust_tokens[i] += delivered - received;
    st.dust_cash += paid - proceeds_total;
    rep.dust_tokens[i] += delivered - received;
    rep.dust_cash += paid - proceeds_total;
}

}  // namespace

CycleReport run_cycle(LedgerState& state, const FundPrices& prices, const ReceivedAssets& received, const CycleConfig& cfg) {
    prices.validate();
    received.validate();
    check_fresh(prices, cfg.today, cfg.price_max_age_days);

    CycleReport rep;
    rep.date = cfg.today;
    rep.prices = prices;
    if (state.accounts.empty() && received.empty()) return rep;

    LedgerState next = state;

    // Settle what the sub-funds delivered against the open orders.
    ReceivedAssets pool{next.residual_tokens + received.tokens, next.residual_cash + received.cash};
    rep.settlement = allocate_received(next.accounts, pool, next.order_prices);
    next.residual_tokens = rep.settlement.residual_tokens;
    next.residual_cash = rep.settlement.residual_cash;

    // Choose the investor set.
    rep.full_population = next.last_line_version != cfg.line_version;
    std::vector<std::pair<Decimal, std::string>> ranked;
    for (const auto& [id, a] : next.accounts) {
        const InvestorFlowOrder o = target_flows(a, prices);
        if (rep.full_population || is_active(a, o, cfg)) ranked.emplace_back(o.total_rebalance, id);
    }
    if (cfg.max_investors && ranked.size() > *cfg.max_investors) {
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        ranked.resize(*cfg.max_investors);
    }
    std::vector<std::string> set;
    for (auto& r : ranked) set.push_back(std::move(r.second));
    std::sort(set.begin(), set.end());

    // Per-investor payouts, targets and new orders.
    std::vector<Leg> legs;
    PendingOrders pending;
    for (const auto& id : set) {
        InvestorAccount& a = next.accounts.at(id);
        pay_out(a, cfg, next, rep);

        InvestorFlowOrder o = target_flows(a, prices);
        rep.identity_residuals.push_back(flow_identity_residual(o, prices));

        Leg leg{&a, {}, {}};
        FundAmounts new_inv{};
        for (std::size_t i = 0; i < 3; ++i) {
            new_inv[i] = clamp_nonnegative(o.inv[i] - a.open_invest[i]);
            leg.sell[i] = clamp_nonnegative(o.wdrw_qty[i] - a.open_redeem[i]);
            pending.deposits[i] += a.open_invest[i];
            pending.withdraws[i] += a.open_redeem[i];
        }
        const Decimal available = clamp_nonnegative(a.free_cash() - a.withdraw_pending - a.fee_due);
        leg.buy = split_deposit(available, new_inv, cfg.split);
        rep.orders.push_back(std::move(o));
        legs.push_back(leg);
    }
    rep.batch = aggregate(rep.orders, pending, prices);
    rep.aggregate_residual = aggregate_identity_residual(rep.batch);

    // Cross inside the pool, send the rest out.
    for (Fund f : kFunds) cross_fund(legs, f, prices[f], next, rep);
    for (auto& l : legs) {
        if (!all_zero(l.buy) || !all_zero(l.sell)) rep.placements.push_back({l.account->id, l.buy, l.sell});
        for (std::size_t i = 0; i < 3; ++i) {
            l.account->open_invest[i] += l.buy[i];
            l.account->open_redeem[i] += l.sell[i];
            rep.external_invest[i] += l.buy[i];
            rep.external_redeem[i] += l.sell[i];
        }
    }

    for (auto& [id, a] : next.accounts) {
        a.withdraw_open = false;
        a.avail_for_withdraw = Decimal{};
    }
    next.order_prices = prices;
    next.last_line_version = cfg.line_version;
    ++next.cycles;
    state = std::move(next);
    return rep;
}

}  // namespace parity
