#include "parity/fees.hpp"

#include "parity/error.hpp"

namespace parity {

FeeSchedule FeeSchedule::defaults() {
    FeeSchedule s;
    s.deposit_rate = Decimal::parse("0.005");
    s.pref_change_rate = Decimal::parse("0.001");
    s.pref_change_cap = Decimal(50);
    s.redemption_tiers = {{30, Decimal::parse("0.05")}, {60, Decimal::parse("0.04")}, {90, Decimal::parse("0.03")}};
    s.subfund_direct_rates.fill(Decimal::parse("0.005"));
    s.subfund_parity_rates.fill(Decimal::parse("0.003"));
    return s;
}

void FeeSchedule::validate() const {
    auto check_rate = [](Decimal r, const char* what) {
        if (r.is_negative() || r > Decimal::one()) fail(ErrorCode::InvalidArgument, std::string(what) + " must lie in [0, 1]");
    };
    check_rate(deposit_rate, "deposit_rate");
    check_rate(pref_change_rate, "pref_change_rate");
    if (pref_change_cap.is_negative()) fail(ErrorCode::InvalidArgument, "pref_change_cap must be nonnegative");
    for (std::size_t i = 0; i < 3; ++i) {
        check_rate(subfund_direct_rates[i], "subfund direct rate");
        check_rate(subfund_parity_rates[i], "subfund parity rate");
    }
    for (std::size_t i = 0; i < redemption_tiers.size(); ++i) {
        const auto& t = redemption_tiers[i];
        check_rate(t.penalty_rate, "redemption penalty");
        if (t.max_holding_days <= 0) fail(ErrorCode::InvalidArgument, "tier bounds must be positive");
        if (i > 0) {
            const auto& prev = redemption_tiers[i - 1];
            if (t.max_holding_days <= prev.max_holding_days)
                fail(ErrorCode::InvalidArgument, "tier bounds must be strictly ascending");
            if (t.penalty_rate > prev.penalty_rate) fail(ErrorCode::InvalidArgument, "tier penalties must be nonincreasing");
        }
    }
}

Decimal deposit_fee(Decimal amount, const FeeSchedule& schedule) {
    if (amount.is_negative()) fail(ErrorCode::InvalidArgument, "amount must be nonnegative");
    return amount * schedule.deposit_rate;
}

Decimal subfund_deposit_fee(Decimal amount, Fund fund, Channel channel, const FeeSchedule& schedule) {
    if (amount.is_negative()) fail(ErrorCode::InvalidArgument, "amount must be nonnegative");
    const auto& rates = channel == Channel::Direct ? schedule.subfund_direct_rates : schedule.subfund_parity_rates;
    return amount * rates[index(fund)];
}

Decimal preference_change_fee(Decimal total_deposited, const FeeSchedule& schedule) {
    if (total_deposited.is_negative()) fail(ErrorCode::InvalidArgument, "total deposited must be nonnegative");
    return min(total_deposited * schedule.pref_change_rate, schedule.pref_change_cap);
}

Decimal combined_action_fee(Decimal deposit_amount, Decimal total_deposited, const FeeSchedule& schedule) {
    return min(deposit_fee(deposit_amount, schedule), preference_change_fee(total_deposited, schedule));
}

Decimal redemption_rate(long holding_days, const FeeSchedule& schedule) {
    for (const auto& tier : schedule.redemption_tiers)
        if (holding_days < tier.max_holding_days) return tier.penalty_rate;
    return {};
}

Decimal redemption_penalty(long holding_days, Decimal amount, const FeeSchedule& schedule) {
    if (amount.is_negative()) fail(ErrorCode::InvalidArgument, "amount must be nonnegative");
    return amount * redemption_rate(holding_days, schedule);
}

LotRedemption redeem_fifo(const std::vector<DepositLot>& lots, Decimal amount, Date as_of, const FeeSchedule& schedule) {
    if (amount.is_negative()) fail(ErrorCode::InvalidArgument, "amount must be nonnegative");
    LotRedemption out;
    Decimal left = amount;
    for (const auto& lot : lots) {
        if (left.is_zero()) {
            out.remaining.push_back(lot);
            continue;
        }
        const Decimal take = min(left, lot.amount);
        out.penalty += redemption_penalty(as_of.days_since(lot.when), take, schedule);
        left -= take;
        if (take < lot.amount) out.remaining.push_back({lot.when, lot.amount - take});
    }
    return out;
}

}  // namespace parity
