#pragma once

#include <stdexcept>
#include <string>

namespace confmet {

enum class Errc {
    UnsupportedDimension,
    BadRadii,
    EvalOutsideDomain,
    DerivativeUnavailable,
    StencilOutOfDomain,
    EmptyRegion,
    WrongDimension,
    RadiusOutOfRange,
    HypothesisViolated,
    ChartTooSmall,
    Disconnected,
    OriginInput,
    BallEscapesDomain,
    OutOfBall,
    ParseError,
    ValidationError,
    UnsupportedBackground,
    InternalError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::UnsupportedDimension: return "UnsupportedDimension";
        case Errc::BadRadii: return "BadRadii";
        case Errc::EvalOutsideDomain: return "EvalOutsideDomain";
        case Errc::DerivativeUnavailable: return "DerivativeUnavailable";
        case Errc::StencilOutOfDomain: return "StencilOutOfDomain";
        case Errc::EmptyRegion: return "EmptyRegion";
        case Errc::WrongDimension: return "WrongDimension";
        case Errc::RadiusOutOfRange: return "RadiusOutOfRange";
        case Errc::HypothesisViolated: return "HypothesisViolated";
        case Errc::ChartTooSmall: return "ChartTooSmall";
        case Errc::Disconnected: return "Disconnected";
        case Errc::OriginInput: return "OriginInput";
        case Errc::BallEscapesDomain: return "BallEscapesDomain";
        case Errc::OutOfBall: return "OutOfBall";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::UnsupportedBackground: return "UnsupportedBackground";
        case Errc::InternalError: return "InternalError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace confmet
