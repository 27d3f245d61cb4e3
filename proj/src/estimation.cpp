#include "parity/estimation.hpp"

#include <set>

#include "parity/error.hpp"
#include "parity/riskstats.hpp"

namespace parity {

namespace {

/// Dates up to `as_of` on which all three assets have a price.
std::vector<Date> common_dates(const PriceStore& store, const EngineConfig& config, Date as_of) {
    std::vector<Date> out;
    for (const auto& id : config.asset_ids)
        if (!store.has_asset(id)) fail(ErrorCode::InsufficientData, "no prices for asset '" + id + "'");
    const auto first = store.dates(config.asset_ids[0]);
    const auto beta_dates = store.dates(config.asset_ids[1]);
    const auto gamma_dates = store.dates(config.asset_ids[2]);
    const std::set<Date> b(beta_dates.begin(), beta_dates.end());
    const std::set<Date> g(gamma_dates.begin(), gamma_dates.end());
    for (Date d : first)
        if (d <= as_of && b.contains(d) && g.contains(d)) out.push_back(d);
    return out;
}

}  // namespace

FundTripled estimate_funds(const PriceStore& store, const EngineConfig& config, Date as_of) {
    const auto dates = common_dates(store, config, as_of);
    if (dates.size() < 3) fail(ErrorCode::InsufficientData, "need at least three aligned price dates by " + as_of.to_string());

    std::array<Eigen::VectorXd, 3> returns;
    for (std::size_t f = 0; f < 3; ++f) {
        std::vector<Decimal> px;
        px.reserve(dates.size());
        for (Date d : dates) px.push_back(store.latest(config.asset_ids[f], d)->price);
        returns[f] = log_returns(px);
    }

    FundTripled t;
    t.as_of = dates.back();
    const Eigen::Index n = std::min<Eigen::Index>(config.window, returns[0].size());
    for (Fund f : kFunds) {
        const auto [mean, vol] = trailing_estimate(returns[index(f)], config.window);
        t[f] = {vol, mean};
    }
    try {
        t.correlations = FundCorrelationsd{correlation(returns[0], returns[1], n), correlation(returns[1], returns[2], n),
                                           correlation(returns[0], returns[2], n)};
    } catch (const Error&) {
        t.correlations = config.correlations;
    }
    return t;
}

FundHistoryd estimate_history(const PriceStore& store, const EngineConfig& config, Date from, Date to) {
    FundHistoryd h;
    const auto dates = common_dates(store, config, to);
    for (std::size_t i = 2; i < dates.size(); ++i) {
        if (dates[i] < from) continue;
        h.emplace_back(dates[i], estimate_funds(store, config, dates[i]));
    }
    return h;
}

FundHistoryd recent_history(const PriceStore& store, const EngineConfig& config, Date as_of) {
    auto h = estimate_history(store, config, Date{}, as_of);
    const auto cap = static_cast<std::size_t>(config.window);
    if (h.size() > cap) h.erase(h.begin(), h.end() - static_cast<std::ptrdiff_t>(cap));
    return h;
}

ParityLined fit_line(const FundHistoryd& history, const FundTripled& latest, const EngineConfig& config) {
    if (!history.empty()) {
        try {
            return fit_regression(history, config.half_life);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateLine) throw;
        }
    }
    return line_through_points(latest);
}

}  // namespace parity
