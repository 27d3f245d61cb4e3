#include "parity/error.hpp"

namespace parity {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Domain: return "domain";
        case ErrorCode::InsufficientData: return "insufficient-data";
        case ErrorCode::UndefinedStatistic: return "undefined-statistic";
        case ErrorCode::DegenerateLine: return "degenerate-line";
        case ErrorCode::BelowRiskFree: return "below-risk-free";
        case ErrorCode::NoValidLine: return "no-valid-line";
        case ErrorCode::Tie: return "tie";
        case ErrorCode::DegenerateSpread: return "degenerate-spread";
        case ErrorCode::DegenerateParabola: return "degenerate-parabola";
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Insolvent: return "insolvent";
        case ErrorCode::StalePrices: return "stale-prices";
        case ErrorCode::Conflict: return "conflict";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::UnknownInvestor: return "unknown-investor";
        case ErrorCode::NotReady: return "not-ready";
        case ErrorCode::Overflow: return "overflow";
        case ErrorCode::Script: return "script";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace parity
