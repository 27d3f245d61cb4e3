#pragma once

// Return and risk statistics over price series: continuously compounded
// returns, trailing-window mean and sample volatility, Pearson correlation,
// and the Sharpe ratio. Everything here is per-period; nothing annualizes.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "parity/date.hpp"
#include "parity/decimal.hpp"
#include "parity/error.hpp"

namespace parity {

inline constexpr Eigen::Index kDefaultWindow = 90;

struct PricePoint {
    std::string asset_id;
    Date timestamp;
    Decimal price;
};

struct ReturnSeries {
    std::string asset_id;
    Eigen::VectorXd returns;
    Eigen::Index window = kDefaultWindow;
};

template <typename Scalar>
Scalar log_return(Scalar p_prev, Scalar p_curr) {
    if (!(p_prev > Scalar(0)) || !(p_curr > Scalar(0))) fail(ErrorCode::Domain, "log_return needs positive prices");
    using std::log;
    return log(p_curr / p_prev);
}

/// Returns between consecutive observations of one asset. Gaps in the
/// calendar are not filled: a missing day simply lengthens that period.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> log_returns(std::span<const Scalar> prices) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(prices.size() < 2 ? 0 : static_cast<Eigen::Index>(prices.size() - 1));
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out(i) = log_return(prices[static_cast<std::size_t>(i)], prices[static_cast<std::size_t>(i + 1)]);
    return out;
}

namespace detail {

template <typename Derived>
auto tail_window(const Eigen::MatrixBase<Derived>& returns, Eigen::Index window) {
    if (window < 1) fail(ErrorCode::InvalidArgument, "window must be at least 1");
    if (window > returns.size())
        fail(ErrorCode::InsufficientData, "window " + std::to_string(window) + " exceeds series length " +
                                              std::to_string(returns.size()));
    return returns.tail(window);
}

}  // namespace detail

/// Arithmetic mean of the most recent `window` returns.
template <typename Derived>
typename Derived::Scalar rolling_mean(const Eigen::MatrixBase<Derived>& returns, Eigen::Index window = kDefaultWindow) {
    return detail::tail_window(returns, window).mean();
}

/// Sample standard deviation (divisor window - 1) of the most recent returns.
template <typename Derived>
typename Derived::Scalar rolling_vol(const Eigen::MatrixBase<Derived>& returns, Eigen::Index window = kDefaultWindow) {
    using Scalar = typename Derived::Scalar;
    if (window < 2) fail(ErrorCode::InvalidArgument, "volatility window must be at least 2");
    const auto tail = detail::tail_window(returns, window);
    if ((tail.array() == tail(0)).all()) return Scalar(0);
    const Scalar mean = tail.mean();
    const Scalar ss = (tail.array() - mean).square().sum();
    using std::sqrt;
    return sqrt(ss / Scalar(window - 1));
}

/// Pearson correlation over the aligned most recent `window` periods.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar correlation(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                      Eigen::Index window = kDefaultWindow) {
    using Scalar = typename DerivedA::Scalar;
    if (window < 2) fail(ErrorCode::InvalidArgument, "correlation window must be at least 2");
    const auto xa = detail::tail_window(a, window);
    const auto xb = detail::tail_window(b, window);
    const auto da = (xa.array() - xa.mean()).eval();
    const auto db = (xb.array() - xb.mean()).eval();
    const Scalar saa = da.square().sum();
    const Scalar sbb = db.square().sum();
    if (saa == Scalar(0) || sbb == Scalar(0)) fail(ErrorCode::UndefinedStatistic, "correlation undefined for a constant series");
    using std::sqrt;
    const Scalar r = (da * db).sum() / sqrt(saa * sbb);
    return std::clamp(r, Scalar(-1), Scalar(1));
}

template <typename Scalar>
Scalar sharpe(Scalar mean_return, Scalar risk_free, Scalar sigma) {
    if (!(sigma > Scalar(0))) fail(ErrorCode::UndefinedStatistic, "Sharpe ratio undefined for non-positive sigma");
    return (mean_return - risk_free) / sigma;
}

/// Mean and volatility over min(window, n) returns, so short-lived assets
/// still get an estimate from whatever history exists.
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> trailing_estimate(const Eigen::MatrixBase<Derived>& returns,
                                                                                 Eigen::Index window = kDefaultWindow) {
    const Eigen::Index n = std::min<Eigen::Index>(window, returns.size());
    if (n < 2) fail(ErrorCode::InsufficientData, "need at least two returns for a volatility estimate");
    return {rolling_mean(returns, n), rolling_vol(returns, n)};
}

}  // namespace parity
