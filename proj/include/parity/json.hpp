#pragma once

// JSON mapping for the domain types. Field names follow the domain types;
// Decimal values are written as canonical strings and read from either
// strings or JSON numbers.

#include <json.hpp>

#include "parity/allocator.hpp"
#include "parity/date.hpp"
#include "parity/decimal.hpp"
#include "parity/fees.hpp"
#include "parity/frontier.hpp"
#include "parity/geometry.hpp"
#include "parity/ledger.hpp"
#include "parity/parity_line.hpp"
#include "parity/riskstats.hpp"

namespace parity {

using Json = nlohmann::json;

void to_json(Json& j, const Decimal& d);
void from_json(const Json& j, Decimal& d);
void to_json(Json& j, const Date& d);
void from_json(const Json& j, Date& d);

void to_json(Json& j, const RiskReturnPointd& p);
void from_json(const Json& j, RiskReturnPointd& p);
void to_json(Json& j, const FundCorrelationsd& c);
void from_json(const Json& j, FundCorrelationsd& c);
void to_json(Json& j, const FundTripled& t);
void from_json(const Json& j, FundTripled& t);
void to_json(Json& j, const ParityLined& l);
void from_json(const Json& j, ParityLined& l);

void to_json(Json& j, const WeightVectord& w);
void from_json(const Json& j, WeightVectord& w);
void to_json(Json& j, const InvestorPreferenced& p);
void from_json(const Json& j, InvestorPreferenced& p);
void to_json(Json& j, const CombinedPortfoliod& c);
void from_json(const Json& j, CombinedPortfoliod& c);
void to_json(Json& j, const AllocationRecordd& a);
void from_json(const Json& j, AllocationRecordd& a);

void to_json(Json& j, const RedemptionTier& t);
void from_json(const Json& j, RedemptionTier& t);
void to_json(Json& j, const FeeSchedule& s);
void from_json(const Json& j, FeeSchedule& s);
void to_json(Json& j, const DepositLot& l);
void from_json(const Json& j, DepositLot& l);

void to_json(Json& j, const PricePoint& p);
void from_json(const Json& j, PricePoint& p);

void to_json(Json& j, const FundPrices& p);
void from_json(const Json& j, FundPrices& p);
void to_json(Json& j, const InvestorAccount& a);
void from_json(const Json& j, InvestorAccount& a);
void to_json(Json& j, const InvestorFlowOrder& o);
void to_json(Json& j, const RebalanceBatch& b);
void to_json(Json& j, const ReceivedAssets& r);
void from_json(const Json& j, ReceivedAssets& r);
void to_json(Json& j, const LedgerState& s);
void from_json(const Json& j, LedgerState& s);
void to_json(Json& j, const CycleReport& r);

void to_json(Json& j, const ParabolaSpecd& p);

/// Per-fund array as {"alpha":…, "beta":…, "gamma":…}.
Json fund_object(const FundAmounts& a);
FundAmounts fund_amounts(const Json& j);
/// Per-fund fields `<fund><suffix>`, e.g. alpha_qty.
void put_funds(Json& j, const FundAmounts& a, const std::string& prefix, const std::string& suffix);
FundAmounts get_funds(const Json& j, const std::string& prefix, const std::string& suffix);

/// Looks up a required field, raising Parse with the field name.
const Json& require(const Json& j, const char* key);

}  // namespace parity
