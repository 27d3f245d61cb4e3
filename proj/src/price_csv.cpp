#include "parity/price_csv.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "parity/error.hpp"

namespace parity {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

Eigen::VectorXd log_returns(std::span<const Decimal> prices) {
    Eigen::VectorXd out(prices.size() < 2 ? 0 : static_cast<Eigen::Index>(prices.size() - 1));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const Decimal prev = prices[static_cast<std::size_t>(i)];
        const Decimal curr = prices[static_cast<std::size_t>(i + 1)];
        if (!prev.is_positive() || !curr.is_positive()) fail(ErrorCode::Domain, "log_return needs positive prices");
        out(i) = std::log((curr / prev).to_double());
    }
    return out;
}

std::vector<PricePoint> read_price_csv(std::istream& in) {
    std::vector<PricePoint> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    line = strip_cr(line);
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    if (line != kPriceCsvHeader)
        fail(ErrorCode::Parse, "line 1: expected header '" + std::string(kPriceCsvHeader) + "', got '" + line + "'");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 3 fields");
        try {
            PricePoint p;
            p.timestamp = Date::parse(std::string_view(line).substr(0, c1));
            p.asset_id = line.substr(c1 + 1, c2 - c1 - 1);
            if (p.asset_id.empty()) fail(ErrorCode::Parse, "empty asset_id");
            p.price = Decimal::parse(std::string_view(line).substr(c2 + 1));
            if (!p.price.is_positive()) fail(ErrorCode::Parse, "price must be positive");
            rows.push_back(std::move(p));
        } catch (const Error& e) {
            fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

void write_price_csv(std::ostream& out, const std::vector<PricePoint>& rows) {
    out << kPriceCsvHeader << '\n';
    for (const auto& r : rows) out << r.timestamp.to_string() << ',' << r.asset_id << ',' << r.price << '\n';
}

std::size_t PriceStore::ingest(const std::vector<PricePoint>& rows) {
    auto staged = series_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto [it, inserted] = staged[r.asset_id].emplace(r.timestamp, r);
        if (!inserted)
            fail(ErrorCode::Conflict, "row " + std::to_string(i + 1) + ": duplicate price for " + r.asset_id + " on " +
                                          r.timestamp.to_string());
    }
    series_ = std::move(staged);
    return rows.size();
}

std::vector<double> PriceStore::prices(const std::string& asset_id) const {
    std::vector<double> out;
    if (auto it = series_.find(asset_id); it != series_.end())
        for (const auto& [day, p] : it->second) out.push_back(p.price.to_double());
    return out;
}

std::vector<Date> PriceStore::dates(const std::string& asset_id) const {
    std::vector<Date> out;
    if (auto it = series_.find(asset_id); it != series_.end())
        for (const auto& [day, p] : it->second) out.push_back(day);
    return out;
}

Eigen::VectorXd PriceStore::returns(const std::string& asset_id) const {
    std::vector<Decimal> p;
    if (auto it = series_.find(asset_id); it != series_.end())
        for (const auto& [day, pt] : it->second) p.push_back(pt.price);
    return log_returns(p);
}

std::vector<PricePoint> PriceStore::rows() const {
    std::vector<PricePoint> out;
    for (const auto& [asset, s] : series_)
        for (const auto& [day, p] : s) out.push_back(p);
    return out;
}

std::size_t PriceStore::size() const {
    std::size_t n = 0;
    for (const auto& [asset, s] : series_) n += s.size();
    return n;
}

std::optional<PricePoint> PriceStore::latest(const std::string& asset_id, Date as_of) const {
    auto it = series_.find(asset_id);
    if (it == series_.end()) return std::nullopt;
    auto day = it->second.upper_bound(as_of);
    if (day == it->second.begin()) return std::nullopt;
    return std::prev(day)->second;
}

}  // namespace parity
