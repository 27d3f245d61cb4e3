#pragma once

// Display parabola under the line: (y - h)^2 = A (x - k), axis parallel to
// the risk axis, tangent to the line at (X_T, Y_T). Purely presentational.

#include <cmath>
#include <vector>

#include "parity/error.hpp"
#include "parity/geometry.hpp"
#include "parity/parity_line.hpp"

namespace parity {

inline constexpr double kDefaultViewConstant = 50.0;
inline constexpr double kDefaultTangencyConstant = 0.5;
inline constexpr double kDefaultHeightConstant = 2.0;
inline constexpr int kDefaultCurvePoints = 200;

template <typename Scalar>
struct ParabolaSpec {
    Scalar h{0};
    Scalar A{0};
    Scalar k{0};
    RiskReturnPoint<Scalar> tangency;  // (X_T, Y_T)
    RiskReturnPoint<Scalar> view_max;  // (X_V, Y_V)
    Scalar view_constant{Scalar(kDefaultViewConstant)};
    Scalar tangency_constant{Scalar(kDefaultTangencyConstant)};
    Scalar height_constant{Scalar(kDefaultHeightConstant)};
    Scalar slope{1};
    Scalar intercept{0};

    Scalar upper(Scalar x) const {
        using std::sqrt;
        return h + sqrt(A * (x - k));
    }
    Scalar lower(Scalar x) const {
        using std::sqrt;
        return h - sqrt(A * (x - k));
    }
    Scalar line(Scalar x) const { return slope * x + intercept; }
};

template <typename Scalar>
struct CurveSample {
    Scalar x;
    Scalar y_upper;
    Scalar y_lower;
};

using ParabolaSpecd = ParabolaSpec<double>;
using CurveSampled = CurveSample<double>;

template <typename Scalar>
ParabolaSpec<Scalar> build_parabola(const ParityLine<Scalar>& line, Scalar view_constant = Scalar(kDefaultViewConstant),
                                    Scalar tangency_constant = Scalar(kDefaultTangencyConstant),
                                    Scalar height_constant = Scalar(kDefaultHeightConstant)) {
    const Scalar m = line.slope;
    const Scalar c = line.intercept;
    if (!(m > Scalar(0))) fail(ErrorCode::DegenerateLine, "parabola needs a positive line slope");
    if (!(view_constant > Scalar(0) && tangency_constant > Scalar(0) && height_constant > Scalar(0)))
        fail(ErrorCode::InvalidArgument, "view, tangency and height constants must be positive");

    ParabolaSpec<Scalar> s;
    s.view_constant = view_constant;
    s.tangency_constant = tangency_constant;
    s.height_constant = height_constant;
    s.slope = m;
    s.intercept = c;
    // The upper display bound is the line's own value at X_V.
    s.view_max = {view_constant / m, view_constant + c};
    s.tangency.sigma = s.view_max.sigma * tangency_constant;
    s.tangency.exp_return = m * s.tangency.sigma + c;

    const Scalar y_t = s.tangency.exp_return;
    const Scalar shrink = Scalar(1) - Scalar(1) / height_constant;
    s.h = y_t / height_constant;
    s.A = Scalar(2) * m * y_t * shrink;
    s.k = s.tangency.sigma - (y_t / (Scalar(2) * m)) * shrink;
    if (!(s.A > Scalar(0))) fail(ErrorCode::DegenerateParabola, "parabola opening coefficient is not positive");
    return s;
}

/// `n_points` evenly spaced x in (k, X_V], both branches at each.
template <typename Scalar>
std::vector<CurveSample<Scalar>> sample_curve(const ParabolaSpec<Scalar>& spec, int n_points = kDefaultCurvePoints) {
    if (n_points < 2) fail(ErrorCode::InvalidArgument, "need at least two sample points");
    std::vector<CurveSample<Scalar>> out;
    out.reserve(static_cast<std::size_t>(n_points));
    const Scalar span = spec.view_max.sigma - spec.k;
    for (int j = 1; j <= n_points; ++j) {
        const Scalar x = spec.k + span * Scalar(j) / Scalar(n_points);
        if (!(x > spec.k)) continue;
        out.push_back({x, spec.upper(x), spec.lower(x)});
    }
    return out;
}

}  // namespace parity
