#pragma once

// Fund points and the line from stored prices: the three configured assets
// are aligned on their common dates, then each gets a trailing mean and
// volatility of log returns; correlations come from the same window.

#include "parity/config.hpp"
#include "parity/parity_line.hpp"
#include "parity/price_csv.hpp"

namespace parity {

/// Throws InsufficientData if fewer than two aligned returns exist by `as_of`.
FundTripled estimate_funds(const PriceStore& store, const EngineConfig& config, Date as_of);

/// One triple per aligned date in [from, to] that has enough history.
FundHistoryd estimate_history(const PriceStore& store, const EngineConfig& config, Date from, Date to);

/// The last `window` entries of estimate_history up to `as_of`.
FundHistoryd recent_history(const PriceStore& store, const EngineConfig& config, Date as_of);

/// Regression over `history`, falling back to the point rule on `latest`.
ParityLined fit_line(const FundHistoryd& history, const FundTripled& latest, const EngineConfig& config);

}  // namespace parity
