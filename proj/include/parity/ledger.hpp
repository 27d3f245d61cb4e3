#pragma once

// Rebalance ledger: per-investor accrual and netting, per-fund target flows,
// batch aggregation, deposit splitting, settlement of received assets and
// the full rebalance cycle. Every amount is a Decimal; per-fund quantities
// are arrays indexed by index(Fund).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parity/allocator.hpp"
#include "parity/date.hpp"
#include "parity/decimal.hpp"
#include "parity/fees.hpp"
#include "parity/geometry.hpp"

namespace parity {

using FundAmounts = std::array<Decimal, 3>;

inline Decimal& at(FundAmounts& a, Fund f) { return a[index(f)]; }
inline Decimal at(const FundAmounts& a, Fund f) { return a[index(f)]; }
Decimal sum(const FundAmounts& a);
bool all_zero(const FundAmounts& a);

struct FundPrices {
    FundAmounts price{Decimal(1), Decimal(1), Decimal(1)};
    Date as_of;

    Decimal operator[](Fund f) const { return price[index(f)]; }
    /// Throws InvalidArgument unless every price is positive.
    void validate() const;
    friend bool operator==(const FundPrices&, const FundPrices&) = default;
};

/// Σ qty_f * price_f, each product truncated.
Decimal token_value(const FundAmounts& qty, const FundPrices& prices);

struct InvestorAccount {
    std::string id;
    InvestorPreferenced preference;
    AllocationRecordd allocation;
    FundAmounts qty{};
    Decimal deposit_pending;
    Decimal withdraw_pending;
    Decimal avail_for_withdraw;
    Decimal cash_alloc;
    std::vector<DepositLot> deposit_lots;

    /// Preference-change fees owed to the treasury; settled from cash like a
    /// withdrawal.
    Decimal fee_due;
    /// Set by the first withdraw request after a cycle, cleared by the cycle.
    bool withdraw_open = false;
    /// Cash committed to sub-fund purchases not yet delivered.
    FundAmounts open_invest{};
    /// Tokens submitted for sub-fund redemption not yet paid out.
    FundAmounts open_redeem{};

    Decimal paid_out;   // cumulative net cash returned to the investor
    Decimal fees_paid;  // cumulative fees and penalties

    /// Ledger-side weights: alpha and beta from the allocation, gamma takes
    /// the remainder so the three sum to one exactly.
    FundAmounts weights() const;
    Decimal committed_cash() const { return sum(open_invest); }
    /// D + C not committed to open purchases.
    Decimal free_cash() const;

    friend bool operator==(const InvestorAccount&, const InvestorAccount&) = default;
};

struct InvestorFlowOrder {
    std::string id;
    Decimal inflow;
    Decimal outflow;
    FundAmounts inv{};       // currency
    FundAmounts wdrw_qty{};  // tokens
    Decimal total_rebalance;
    Decimal intrinsic_value;
    Date priced_at;

    friend bool operator==(const InvestorFlowOrder&, const InvestorFlowOrder&) = default;
};

struct PendingOrders {
    FundAmounts deposits{};   // currency
    FundAmounts withdraws{};  // tokens
    friend bool operator==(const PendingOrders&, const PendingOrders&) = default;
};

struct RebalanceBatch {
    std::vector<std::string> investor_set;
    FundAmounts sum_inv{};
    FundAmounts sum_wdrw{};
    FundAmounts pa_inv{};
    FundAmounts pa_wdrw{};
    Decimal inflow_total;
    Decimal outflow_total;
    PendingOrders pending;
    FundAmounts net_inv{};
    FundAmounts net_wdrw{};
    Decimal avl_deposit;
    FundPrices prices;

    friend bool operator==(const RebalanceBatch&, const RebalanceBatch&) = default;
};

struct ReceivedAssets {
    FundAmounts tokens{};
    Decimal cash;
    void validate() const;
    bool empty() const { return all_zero(tokens) && cash.is_zero(); }
    friend bool operator==(const ReceivedAssets&, const ReceivedAssets&) = default;
};

enum class SplitStrategy { Sequential, Proportional, MinThreshold };
std::string_view to_string(SplitStrategy s);
SplitStrategy parse_split_strategy(std::string_view text);

struct SplitRule {
    SplitStrategy strategy = SplitStrategy::Proportional;
    Decimal min_tx;
    friend bool operator==(const SplitRule&, const SplitRule&) = default;
};

// ---- per-investor operations ----------------------------------------------

InvestorAccount accrue_deposit(InvestorAccount account, Decimal amount, Date when);
/// The first request after a cycle sets the withdrawable baseline to the
/// account's intrinsic value; each request then takes `fraction` of what is
/// still available.
InvestorAccount accrue_withdraw(InvestorAccount account, Decimal fraction, const FundPrices& prices);
/// Drops the whole pending withdrawal.
InvestorAccount cancel_withdraw(InvestorAccount account);

struct NetFlows {
    Decimal inflow;
    Decimal outflow;
};
/// Withdraw side includes any fee still due.
NetFlows net_investor_flows(const InvestorAccount& account);
Decimal intrinsic_value(const InvestorAccount& account, const FundPrices& prices);
InvestorFlowOrder target_flows(const InvestorAccount& account, const FundPrices& prices);

/// inflow + Σ wdrw_f price_f - outflow - Σ inv_f.
Decimal flow_identity_residual(const InvestorFlowOrder& order, const FundPrices& prices);

// ---- batch operations -------------------------------------------------------

RebalanceBatch aggregate(std::span<const InvestorFlowOrder> orders, const PendingOrders& pending, const FundPrices& prices);
/// inflow_total + Σ pa_wdrw_f price_f - outflow_total - Σ pa_inv_f.
Decimal aggregate_identity_residual(const RebalanceBatch& batch);

FundAmounts split_deposit(Decimal available, const FundAmounts& needs, const SplitRule& rule);

struct TokenAllocation {
    std::string id;
    Fund fund;
    Decimal tokens;
    Decimal cost;  // charged against committed cash
};
struct CashAllocation {
    std::string id;
    Decimal cash;
    FundAmounts tokens_redeemed{};
};
struct Settlement {
    std::vector<TokenAllocation> tokens;
    std::vector<CashAllocation> cash;
    FundAmounts residual_tokens{};
    Decimal residual_cash;
};

/// Distributes received tokens pro-rata to open purchases and received cash
/// pro-rata to the value of open redemptions, valued at `order_prices`.
/// Allocations are computed against the pool snapshot; the running remainder
/// only guards against overdraw. Whatever is left is returned as residual.
Settlement allocate_received(std::map<std::string, InvestorAccount>& accounts, const ReceivedAssets& pool,
                             const FundPrices& order_prices);

// ---- cycle -----------------------------------------------------------------

struct LedgerState {
    std::map<std::string, InvestorAccount> accounts;
    FundPrices order_prices;  // prices at which the open orders were placed
    FundAmounts residual_tokens{};
    Decimal residual_cash;
    FundAmounts dust_tokens{};
    Decimal dust_cash;
    Decimal treasury;
    std::uint64_t cycles = 0;
    std::uint64_t last_line_version = 0;

    friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

struct CycleConfig {
    SplitRule split;
    FeeSchedule fees = FeeSchedule::defaults();
    Date today;
    long price_max_age_days = 1;
    std::uint64_t line_version = 0;
    /// Idle accounts join the cycle when their rebalance need exceeds this.
    Decimal misalignment_threshold = Decimal::parse("0.01");
    /// Cap on the investor set, largest total_rebalance first.
    std::optional<std::size_t> max_investors;
};

struct Payout {
    std::string id;
    Decimal gross;    // taken from the account's cash
    Decimal fee;      // fee_due settled to the treasury
    Decimal penalty;  // redemption penalty to the treasury
    Decimal net;      // paid to the investor
};

/// One side of an internal cross: positive tokens for a buyer, negative for
/// a seller; cash has the opposite sign.
struct CrossFill {
    std::string id;
    Fund fund;
    Decimal tokens;
    Decimal cash;
};

/// New external orders placed for one investor.
struct OrderPlacement {
    std::string id;
    FundAmounts invest{};  // currency
    FundAmounts redeem{};  // tokens
};

struct CycleReport {
    Date date;
    FundPrices prices;
    bool full_population = false;
    Settlement settlement;
    std::vector<Payout> payouts;
    std::vector<InvestorFlowOrder> orders;  // raw targets, one per investor in the set
    std::vector<Decimal> identity_residuals;
    RebalanceBatch batch;
    Decimal aggregate_residual;
    std::vector<CrossFill> crosses;
    std::vector<OrderPlacement> placements;
    FundAmounts external_invest{};  // currency sent to the sub-funds
    FundAmounts external_redeem{};  // tokens sent for redemption
    FundAmounts dust_tokens{};
    Decimal dust_cash;
};

/// Throws StalePrices if the prices are in the future or older than the
/// configured maximum age.
void check_fresh(const FundPrices& prices, Date today, long max_age_days);

/// Runs one cycle; `state` is replaced only if the whole cycle succeeds.
CycleReport run_cycle(LedgerState& state, const FundPrices& prices, const ReceivedAssets& received, const CycleConfig& config);

}  // namespace parity
