#pragma once

// Maps an investor preference (risk, return, or direct weights) onto a full
// allocation: a point on the line plus Alpha/Beta/Gamma weights.
//
// Weights for the risk and return routes come from blending Gamma with a
// combined Alpha+Beta portfolio that sits on the line. With
//   w_c     = (E_i - E_gamma) / (E_c - E_gamma),   w_gamma = 1 - w_c,
//   w_alpha = w_c * w_calpha,                       w_beta  = w_c * w_cbeta,
// the recombined return w . E equals E_i exactly whenever no trimming occurs.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "parity/error.hpp"
#include "parity/geometry.hpp"
#include "parity/parity_line.hpp"

namespace parity {

template <typename Scalar>
struct WeightVector {
    Scalar w_alpha{0};
    Scalar w_beta{0};
    Scalar w_gamma{0};

    Eigen::Matrix<Scalar, 3, 1> vec() const { return {w_alpha, w_beta, w_gamma}; }
    Scalar operator[](Fund f) const { return vec()(static_cast<Eigen::Index>(index(f))); }
    Scalar sum() const { return w_alpha + w_beta + w_gamma; }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

enum class PreferenceMode { RiskTolerance, ExpectedReturn, DirectWeights };

constexpr std::string_view to_string(PreferenceMode m) {
    switch (m) {
        case PreferenceMode::RiskTolerance: return "risk";
        case PreferenceMode::ExpectedReturn: return "return";
        case PreferenceMode::DirectWeights: return "weights";
    }
    return "?";
}

template <typename Scalar>
struct InvestorPreference {
    PreferenceMode mode = PreferenceMode::DirectWeights;
    std::optional<Scalar> risk;
    std::optional<Scalar> ret;
    std::optional<WeightVector<Scalar>> weights;

    static InvestorPreference by_risk(Scalar s) { return {PreferenceMode::RiskTolerance, s, std::nullopt, std::nullopt}; }
    static InvestorPreference by_return(Scalar r) { return {PreferenceMode::ExpectedReturn, std::nullopt, r, std::nullopt}; }
    static InvestorPreference by_weights(WeightVector<Scalar> w) {
        return {PreferenceMode::DirectWeights, std::nullopt, std::nullopt, w};
    }

    friend bool operator==(const InvestorPreference&, const InvestorPreference&) = default;
};

template <typename Scalar>
struct CombinedPortfolio {
    Scalar w_c_alpha{1};
    Scalar w_c_beta{0};
    RiskReturnPoint<Scalar> point;

    friend bool operator==(const CombinedPortfolio&, const CombinedPortfolio&) = default;
};

template <typename Scalar>
struct AllocationRecord {
    Scalar sigma_i{0};
    Scalar exp_return_i{0};
    WeightVector<Scalar> weights;
    std::uint64_t line_version = 0;
    bool trimmed = false;  // combined/Gamma weights were clamped into [0, 1]

    friend bool operator==(const AllocationRecord&, const AllocationRecord&) = default;
};

using WeightVectord = WeightVector<double>;
using InvestorPreferenced = InvestorPreference<double>;
using CombinedPortfoliod = CombinedPortfolio<double>;
using AllocationRecordd = AllocationRecord<double>;

/// Throws InvalidArgument unless every weight is in [0, 1] and they sum to 1.
template <typename Scalar>
void validate(const WeightVector<Scalar>& w, Scalar tol = Scalar(1e-9)) {
    for (Scalar x : {w.w_alpha, w.w_beta, w.w_gamma})
        if (!(x >= Scalar(0) && x <= Scalar(1))) fail(ErrorCode::InvalidArgument, "weights must lie in [0, 1]");
    using std::abs;
    if (abs(w.sum() - Scalar(1)) > tol) fail(ErrorCode::InvalidArgument, "weights must sum to 1");
}

template <typename Scalar>
void validate(const InvestorPreference<Scalar>& p) {
    switch (p.mode) {
        case PreferenceMode::RiskTolerance:
            if (!p.risk || p.ret || p.weights) fail(ErrorCode::InvalidArgument, "risk preference needs exactly a risk value");
            if (!(*p.risk >= Scalar(0))) fail(ErrorCode::InvalidArgument, "risk must be nonnegative");
            break;
        case PreferenceMode::ExpectedReturn:
            if (!p.ret || p.risk || p.weights) fail(ErrorCode::InvalidArgument, "return preference needs exactly a return value");
            break;
        case PreferenceMode::DirectWeights:
            if (!p.weights || p.risk || p.ret) fail(ErrorCode::InvalidArgument, "weights preference needs exactly a weight vector");
            validate(*p.weights);
            break;
    }
}

/// w_f proportional to 1 / distance(fund f, target). A fund sitting exactly on
/// the target takes the whole weight; several such funds share it equally.
template <typename Scalar>
WeightVector<Scalar> inverse_distance_weights(const FundTriple<Scalar>& triple, const RiskReturnPoint<Scalar>& target) {
    Eigen::Matrix<Scalar, 3, 1> d;
    for (Fund f : kFunds) d(static_cast<Eigen::Index>(index(f))) = distance(triple[f], target);

    Eigen::Matrix<Scalar, 3, 1> w;
    const auto hits = (d.array() == Scalar(0)).template cast<Scalar>().eval();
    if (hits.sum() > Scalar(0)) {
        w = hits.matrix() / hits.sum();
    } else {
        w = d.cwiseInverse();
        w /= w.sum();
    }
    return {w(0), w(1), w(2)};
}

/// Risk-parity weights: w_f proportional to 1 / sigma_f.
template <typename Scalar>
WeightVector<Scalar> inverse_vol_weights(Scalar sigma_a, Scalar sigma_b, Scalar sigma_g) {
    if (!(sigma_a > Scalar(0) && sigma_b > Scalar(0) && sigma_g > Scalar(0)))
        fail(ErrorCode::Domain, "inverse-volatility weights need positive sigmas");
    const Eigen::Matrix<Scalar, 3, 1> inv = Eigen::Matrix<Scalar, 3, 1>(sigma_a, sigma_b, sigma_g).cwiseInverse();
    const Eigen::Matrix<Scalar, 3, 1> w = inv / inv.sum();
    return {w(0), w(1), w(2)};
}

/// Alpha weight of the combined portfolio under two-fund inverse volatility.
template <typename Scalar>
Scalar inverse_vol_combined_alpha(const FundTriple<Scalar>& triple) {
    if (!(triple.alpha.sigma > Scalar(0) && triple.beta.sigma > Scalar(0)))
        fail(ErrorCode::Domain, "inverse-volatility weights need positive sigmas");
    const Scalar ia = Scalar(1) / triple.alpha.sigma;
    const Scalar ib = Scalar(1) / triple.beta.sigma;
    return ia / (ia + ib);
}

template <typename Scalar>
CombinedPortfolio<Scalar> combined_market_portfolio(const FundTriple<Scalar>& triple, Scalar w_c_alpha,
                                                    const ParityLine<Scalar>& line) {
    if (!(w_c_alpha >= Scalar(0) && w_c_alpha <= Scalar(1))) fail(ErrorCode::InvalidArgument, "w_c_alpha must lie in [0, 1]");
    if (line.slope == Scalar(0)) fail(ErrorCode::DegenerateLine, "line slope is zero");
    const Scalar w_c_beta = Scalar(1) - w_c_alpha;
    const Scalar er = w_c_alpha * triple.alpha.exp_return + w_c_beta * triple.beta.exp_return;
    return {w_c_alpha, w_c_beta, {(er - line.intercept) / line.slope, er}};
}

/// Gamma/combined split for a target return, trimmed into [0, 1].
template <typename Scalar>
WeightVector<Scalar> combined_weights(Scalar exp_return_i, Scalar gamma_return, const CombinedPortfolio<Scalar>& combined,
                                      bool* trimmed = nullptr) {
    const Scalar spread = combined.point.exp_return - gamma_return;
    if (spread == Scalar(0)) fail(ErrorCode::DegenerateSpread, "combined portfolio and Gamma have the same return");
    Scalar w_c = (exp_return_i - gamma_return) / spread;
    const bool clip = w_c < Scalar(0) || w_c > Scalar(1);
    if (trimmed) *trimmed = clip;
    // w_gamma = (E_i - E_c) / (E_gamma - E_c) = 1 - w_c, so clamping one side
    // clamps the other and the pair still sums to one.
    w_c = std::clamp(w_c, Scalar(0), Scalar(1));
    const Scalar w_alpha = w_c * combined.w_c_alpha;
    const Scalar w_beta = w_c - w_alpha;
    return {w_alpha, w_beta, Scalar(1) - w_c};
}

/// Return and risk of a weight vector. The quadratic form is the portfolio
/// variance; sigma is its square root.
template <typename Scalar>
RiskReturnPoint<Scalar> weights_to_point(const WeightVector<Scalar>& weights, const FundTriple<Scalar>& triple) {
    const Eigen::Matrix<Scalar, 3, 1> w = weights.vec();
    const Scalar er = w.dot(triple.returns());
    const FundCorrelations<Scalar> rho = triple.correlations.value_or(FundCorrelations<Scalar>{});
    const Eigen::Matrix<Scalar, 3, 1> ws = w.cwiseProduct(triple.sigmas());
    const Scalar variance = ws.dot(rho.matrix() * ws);
    using std::sqrt;
    return {sqrt(std::max(variance, Scalar(0))), er};
}

template <typename Scalar>
AllocationRecord<Scalar> resolve_preference(const InvestorPreference<Scalar>& pref, const ParityLine<Scalar>& line,
                                            const FundTriple<Scalar>& triple, const CombinedPortfolio<Scalar>& combined,
                                            std::uint64_t line_version = 0) {
    validate(pref);
    AllocationRecord<Scalar> rec;
    rec.line_version = line_version;
    switch (pref.mode) {
        case PreferenceMode::RiskTolerance:
            rec.sigma_i = *pref.risk;
            rec.exp_return_i = line_expected_return(line, rec.sigma_i);
            rec.weights = combined_weights(rec.exp_return_i, triple.gamma.exp_return, combined, &rec.trimmed);
            break;
        case PreferenceMode::ExpectedReturn:
            rec.exp_return_i = *pref.ret;
            rec.sigma_i = line_risk(line, rec.exp_return_i);
            rec.weights = combined_weights(rec.exp_return_i, triple.gamma.exp_return, combined, &rec.trimmed);
            break;
        case PreferenceMode::DirectWeights: {
            const Scalar total = pref.weights->sum();
            rec.weights = {pref.weights->w_alpha / total, pref.weights->w_beta / total, pref.weights->w_gamma / total};
            const auto point = weights_to_point(rec.weights, triple);
            rec.exp_return_i = point.exp_return;
            if (triple.correlations) {
                rec.sigma_i = point.sigma;
            } else {
                using std::max;
                if (line.slope == Scalar(0)) fail(ErrorCode::DegenerateLine, "line slope is zero");
                // Returns under R_F map to zero risk rather than an error here:
                // the weights themselves are valid.
                rec.sigma_i = max(Scalar(0), (rec.exp_return_i - line.intercept) / line.slope);
            }
            break;
        }
    }
    return rec;
}

}  // namespace parity
