#pragma once

// Independent reference implementations used only by tests. They avoid the
// library's code paths: plain loops over std::vector, closed-form formulas.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

/// Two-pass sample standard deviation of the last `window` values.
inline double sample_vol(const std::vector<double>& xs, std::size_t window) {
    const std::size_t start = xs.size() - window;
    double mean = 0.0;
    for (std::size_t i = start; i < xs.size(); ++i) mean += xs[i];
    mean /= static_cast<double>(window);
    double ss = 0.0;
    for (std::size_t i = start; i < xs.size(); ++i) ss += (xs[i] - mean) * (xs[i] - mean);
    return std::sqrt(ss / static_cast<double>(window - 1));
}

inline double mean(const std::vector<double>& xs, std::size_t window) {
    double m = 0.0;
    for (std::size_t i = xs.size() - window; i < xs.size(); ++i) m += xs[i];
    return m / static_cast<double>(window);
}

/// Weighted least squares y = a + b x via the closed-form normal equations.
/// Returns (slope, intercept).
inline std::pair<double, double> wls(const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& w) {
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    }
    const double b = sxy / sxx;
    return {b, my - b * mx};
}

inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
    return wls(x, y, std::vector<double>(x.size(), 1.0));
}

}  // namespace oracle
