#pragma once

// Dense value types for the risk/return plane. Points are stored as named
// fields so they serialize with their domain names, and convert to Eigen
// vectors (sigma, exp_return) for the linear algebra.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>

#include "parity/date.hpp"

namespace parity {

template <typename Scalar>
struct RiskReturnPoint {
    Scalar sigma{0};
    Scalar exp_return{0};

    Eigen::Matrix<Scalar, 2, 1> vec() const { return {sigma, exp_return}; }
    static RiskReturnPoint from_vec(const Eigen::Matrix<Scalar, 2, 1>& v) { return {v(0), v(1)}; }

    friend bool operator==(const RiskReturnPoint&, const RiskReturnPoint&) = default;
};

template <typename Scalar>
Scalar distance(const RiskReturnPoint<Scalar>& a, const RiskReturnPoint<Scalar>& b) {
    return (a.vec() - b.vec()).norm();
}

enum class Fund { Alpha = 0, Beta = 1, Gamma = 2 };
inline constexpr std::array<Fund, 3> kFunds{Fund::Alpha, Fund::Beta, Fund::Gamma};
constexpr std::size_t index(Fund f) { return static_cast<std::size_t>(f); }
constexpr std::string_view fund_name(Fund f) {
    switch (f) {
        case Fund::Alpha: return "alpha";
        case Fund::Beta: return "beta";
        case Fund::Gamma: return "gamma";
    }
    return "?";
}

/// Pairwise correlations between the three sub-funds.
template <typename Scalar>
struct FundCorrelations {
    Scalar rho_ab{0};
    Scalar rho_bg{0};
    Scalar rho_ag{0};

    /// Symmetric correlation matrix in (alpha, beta, gamma) order.
    Eigen::Matrix<Scalar, 3, 3> matrix() const {
        Eigen::Matrix<Scalar, 3, 3> m;
        m << Scalar(1), rho_ab, rho_ag,  //
            rho_ab, Scalar(1), rho_bg,   //
            rho_ag, rho_bg, Scalar(1);
        return m;
    }
    friend bool operator==(const FundCorrelations&, const FundCorrelations&) = default;
};

/// The three sub-fund points at one instant. Correlations are optional: the
/// direct-weights route falls back to the line when they are missing.
template <typename Scalar>
struct FundTriple {
    RiskReturnPoint<Scalar> alpha;
    RiskReturnPoint<Scalar> beta;
    RiskReturnPoint<Scalar> gamma;
    std::optional<FundCorrelations<Scalar>> correlations;
    Date as_of;

    const RiskReturnPoint<Scalar>& operator[](Fund f) const {
        switch (f) {
            case Fund::Alpha: return alpha;
            case Fund::Beta: return beta;
            default: return gamma;
        }
    }
    RiskReturnPoint<Scalar>& operator[](Fund f) {
        return const_cast<RiskReturnPoint<Scalar>&>(std::as_const(*this)[f]);
    }

    Eigen::Matrix<Scalar, 3, 1> sigmas() const { return {alpha.sigma, beta.sigma, gamma.sigma}; }
    Eigen::Matrix<Scalar, 3, 1> returns() const { return {alpha.exp_return, beta.exp_return, gamma.exp_return}; }

    friend bool operator==(const FundTriple&, const FundTriple&) = default;
};

using RiskReturnPointd = RiskReturnPoint<double>;
using FundTripled = FundTriple<double>;
using FundCorrelationsd = FundCorrelations<double>;

}  // namespace parity
