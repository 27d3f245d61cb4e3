#pragma once

// The linear frontier E(R) = slope * sigma + intercept: evaluation, inversion,
// recency-weighted regression over fund history, the two-point rule with its
// positive-slope fallback, and the drift test that decides when to refit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string_view>
#include <utility>
#include <vector>

#include "parity/error.hpp"
#include "parity/geometry.hpp"

namespace parity {

enum class LineMethod { Regression, TwoPoint, Fallback, Manual };

constexpr std::string_view to_string(LineMethod m) {
    switch (m) {
        case LineMethod::Regression: return "regression";
        case LineMethod::TwoPoint: return "two-point";
        case LineMethod::Fallback: return "fallback";
        case LineMethod::Manual: return "manual";
    }
    return "?";
}

template <typename Scalar>
struct ParityLine {
    Scalar slope{1};      // Theta
    Scalar intercept{0};  // R_F, the risk-free rate
    Date fitted_at;
    LineMethod method = LineMethod::Manual;

    friend bool operator==(const ParityLine&, const ParityLine&) = default;
};

template <typename Scalar>
using FundHistory = std::vector<std::pair<Date, FundTriple<Scalar>>>;

using ParityLined = ParityLine<double>;
using FundHistoryd = FundHistory<double>;

inline constexpr double kDefaultHalfLife = 30.0;
inline constexpr double kDefaultRadiusMultiplier = 1.0;

template <typename Scalar>
Scalar line_expected_return(const ParityLine<Scalar>& line, Scalar sigma) {
    if (sigma < Scalar(0)) fail(ErrorCode::Domain, "sigma must be nonnegative");
    return line.slope * sigma + line.intercept;
}

/// Risk needed on the line to reach `exp_return`.
template <typename Scalar>
Scalar line_risk(const ParityLine<Scalar>& line, Scalar exp_return) {
    if (line.slope == Scalar(0)) fail(ErrorCode::DegenerateLine, "line slope is zero");
    const Scalar sigma = (exp_return - line.intercept) / line.slope;
    if (sigma < Scalar(0)) fail(ErrorCode::BelowRiskFree, "requested return lies below the risk-free intercept");
    return sigma;
}

/// Weighted least squares of E(R) on sigma over every fund point in the
/// history. Snapshot k (0 = oldest of n) gets weight 0.5^((n-1-k)/half_life).
/// Throws DegenerateLine if the sigmas carry no spread or the fitted slope is
/// not positive; callers fall back to line_through_points in that case.
template <typename Scalar>
ParityLine<Scalar> fit_regression(const FundHistory<Scalar>& history, Scalar half_life = Scalar(kDefaultHalfLife)) {
    if (!(half_life > Scalar(0))) fail(ErrorCode::InvalidArgument, "half_life must be positive");
    const auto n_snap = static_cast<Eigen::Index>(history.size());
    const Eigen::Index n = 3 * n_snap;
    if (n < 2) fail(ErrorCode::DegenerateLine, "regression needs at least two points");

    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> X(n, 2);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
    for (Eigen::Index k = 0; k < n_snap; ++k) {
        using std::pow;
        const Scalar age = Scalar(n_snap - 1 - k);
        const Scalar weight = pow(Scalar(0.5), age / half_life);
        const auto& triple = history[static_cast<std::size_t>(k)].second;
        for (Fund f : kFunds) {
            const Eigen::Index row = 3 * k + static_cast<Eigen::Index>(index(f));
            X(row, 0) = Scalar(1);
            X(row, 1) = triple[f].sigma;
            y(row) = triple[f].exp_return;
            w(row) = weight;
        }
    }

    const Scalar wsum = w.sum();
    const Scalar sigma_bar = w.dot(X.col(1)) / wsum;
    const Scalar spread = (w.array() * (X.col(1).array() - sigma_bar).square()).sum() / wsum;
    const Scalar scale = std::max(Scalar(1), X.col(1).cwiseAbs().maxCoeff());
    if (!(spread > Scalar(1e-24) * scale * scale)) fail(ErrorCode::DegenerateLine, "all sigma values coincide: singular fit");

    // Rows scaled by sqrt(w) turn WLS into ordinary least squares.
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sw = w.cwiseSqrt();
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 2> Xw = sw.asDiagonal() * X;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> yw = sw.asDiagonal() * y;
    const Eigen::Matrix<Scalar, 2, 1> beta = Xw.colPivHouseholderQr().solve(yw);

    ParityLine<Scalar> line{beta(1), beta(0), history.back().first, LineMethod::Regression};
    if (!(line.slope > Scalar(0))) fail(ErrorCode::DegenerateLine, "regression slope is not positive");
    return line;
}

/// Line through the two highest-return fund points; when that slope is not
/// positive, tries (highest, Gamma) and then (second highest, Gamma).
template <typename Scalar>
ParityLine<Scalar> line_through_points(const FundTriple<Scalar>& triple) {
    std::array<Fund, 3> ranked = kFunds;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](Fund a, Fund b) { return triple[a].exp_return > triple[b].exp_return; });

    if (triple.alpha == triple.beta && triple.beta == triple.gamma)
        fail(ErrorCode::NoValidLine, "all three fund points coincide");

    const std::array<std::pair<Fund, Fund>, 3> candidates{
        {{ranked[0], ranked[1]}, {ranked[0], Fund::Gamma}, {ranked[1], Fund::Gamma}}};
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto [fa, fb] = candidates[c];
        if (fa == fb) continue;
        const auto& a = triple[fa];
        const auto& b = triple[fb];
        const Scalar dx = a.sigma - b.sigma;
        if (dx == Scalar(0)) continue;
        const Scalar slope = (a.exp_return - b.exp_return) / dx;
        if (slope > Scalar(0)) {
            return {slope, a.exp_return - slope * a.sigma, triple.as_of,
                    c == 0 ? LineMethod::TwoPoint : LineMethod::Fallback};
        }
    }
    fail(ErrorCode::NoValidLine, "no pair of fund points gives a positive slope");
}

/// True when any fund has drifted outside a circle of radius
/// radius_multiplier * (stored sigma) around its stored point.
template <typename Scalar>
bool needs_update(const FundTriple<Scalar>& stored, const FundTriple<Scalar>& fresh,
                  Scalar radius_multiplier = Scalar(kDefaultRadiusMultiplier)) {
    for (Fund f : kFunds)
        if (distance(stored[f], fresh[f]) > radius_multiplier * stored[f].sigma) return true;
    return false;
}

}  // namespace parity
