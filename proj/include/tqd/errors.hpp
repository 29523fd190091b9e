#pragma once

#include <stdexcept>
#include <string>

namespace tqd {

// Machine-readable failure categories. The CLI maps ConfigInvalid to exit
// code 2 and everything else to exit code 3.
enum class ErrorCode {
    ConfigInvalid,
    DimensionMismatch,
    UnsupportedDimension,
    InvalidOperator,
    InvalidState,
    NegativeRate,
    OutOfRange,
    StencilOutOfRange,
    FrameSingular,
    DefectiveBeyondTolerance,
    TrackingLost,
    DegeneracyCrossing,
    NearDegenerate,
    UnsupportedDefective,
    NonUniqueSteadyState,
    NotAGenerator,
    NotHermitianPreserving,
    NotTracePreserving,
    NonUnitaryFrame,
    NumericalFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace tqd
