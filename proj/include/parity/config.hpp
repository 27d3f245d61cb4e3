#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "parity/fees.hpp"
#include "parity/geometry.hpp"
#include "parity/ledger.hpp"

namespace parity {

inline constexpr const char* kDefaultDisclaimer =
    "The curved band is a drawing aid around the straight allocation line. It does not describe "
    "attainable portfolios; every allocation is taken from the straight line alone.";

/// Engine settings. Loaded from a `key = value` text file; see
/// docs/config.md for every key.
struct EngineConfig {
    long window = 90;
    double half_life = 30.0;
    double radius_multiplier = 1.0;
    /// Alpha share of the combined portfolio; empty means inverse volatility.
    std::optional<double> combined_alpha;
    /// Fixed correlations used when the price history cannot supply them.
    std::optional<FundCorrelationsd> correlations;
    std::array<std::string, 3> asset_ids{"alpha", "beta", "gamma"};

    SplitRule split;
    FeeSchedule fees = FeeSchedule::defaults();
    long price_max_age_days = 1;
    std::size_t max_investors = 0;  // 0: no cap
    Decimal misalignment_threshold = Decimal::parse("0.01");

    double view_constant = 50.0;
    double tangency_constant = 0.5;
    double height_constant = 2.0;
    int curve_points = 200;
    std::string disclaimer = kDefaultDisclaimer;

    std::string event_log;     // empty: in-memory only
    std::string snapshot_dir;  // empty: no snapshot files
    std::uint64_t snapshot_every = 0;

    void validate() const;
    /// Canonical text form; parse(to_text()) reproduces the config.
    std::string to_text() const;

    static EngineConfig parse(std::istream& in);
    static EngineConfig load(const std::string& path);
};

}  // namespace parity
