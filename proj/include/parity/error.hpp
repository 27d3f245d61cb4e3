#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parity {

/// Failure categories surfaced by every module. The service maps these onto
/// HTTP status codes and the CLI onto exit codes.
enum class ErrorCode {
    Domain,               // argument outside the mathematical domain
    InsufficientData,     // window longer than the series
    UndefinedStatistic,   // zero variance, zero sigma
    DegenerateLine,       // slope is zero or the fit is singular
    BelowRiskFree,        // requested return under the intercept
    NoValidLine,          // no pair of fund points gives a positive slope
    Tie,                  // coincident fund points
    DegenerateSpread,     // combined portfolio and Gamma share a return
    DegenerateParabola,
    InvalidArgument,
    Insolvent,
    StalePrices,
    Conflict,
    Parse,
    UnknownInvestor,
    NotReady,
    Overflow,
    Script,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace parity
