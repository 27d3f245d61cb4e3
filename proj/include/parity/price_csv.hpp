#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parity/date.hpp"
#include "parity/decimal.hpp"
#include "parity/riskstats.hpp"

namespace parity {

/// Exact header line of the price CSV format.
inline constexpr const char* kPriceCsvHeader = "date,asset_id,price";

/// Log returns taken on the exact decimal price ratio, so scaling every
/// price by the same factor leaves them bit-for-bit unchanged.
Eigen::VectorXd log_returns(std::span<const Decimal> prices);

/// Reads `date,asset_id,price` rows. Errors carry the 1-based line number.
std::vector<PricePoint> read_price_csv(std::istream& in);
void write_price_csv(std::ostream& out, const std::vector<PricePoint>& rows);

/// Per-asset price history keyed by day. Duplicate (asset, day) rows are
/// rejected so a series is always strictly increasing in time.
class PriceStore {
public:
    /// Adds all rows or none. Returns the number of rows loaded.
    std::size_t ingest(const std::vector<PricePoint>& rows);

    bool has_asset(const std::string& asset_id) const { return series_.contains(asset_id); }
    std::vector<double> prices(const std::string& asset_id) const;
    std::vector<Date> dates(const std::string& asset_id) const;
    Eigen::VectorXd returns(const std::string& asset_id) const;
    std::vector<PricePoint> rows() const;
    std::size_t size() const;

    /// Latest observation on or before `as_of`.
    std::optional<PricePoint> latest(const std::string& asset_id, Date as_of) const;

private:
    std::map<std::string, std::map<Date, PricePoint>> series_;
};

}  // namespace parity
