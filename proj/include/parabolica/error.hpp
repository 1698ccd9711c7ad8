#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parabolica {

enum class Errc {
    // validation
    DuplicatePoint,
    ClassTooLarge,
    Intermingled,
    BadPartition,
    SizeMismatch,
    SynchronizedInput,
    PivotOutOfRange,
    ImproperSet,
    ParseError,
    // numerical
    NotNormalized,
    OutOfDomain,
    NonMonotone,
    DecayViolation,
    SlowOrbit,
    FlowMismatch,
    SignMismatch,
    SingularIntegrand,
    NonpositiveEpsilon,
    NoBracket,
    MultipleRoots,
    ZeroTau,
    NoCrossing,
    Stuck,
    GridTooCoarse,
    IntegrationFailure,
    // invariants
    InvariantViolation,
    // io
    IOError,
};

enum class ErrorKind { Validation, Numerical, Invariant, IO };

constexpr std::string_view to_string(Errc c) noexcept {
    switch (c) {
    case Errc::DuplicatePoint: return "DuplicatePoint";
    case Errc::ClassTooLarge: return "ClassTooLarge";
    case Errc::Intermingled: return "Intermingled";
    case Errc::BadPartition: return "BadPartition";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::SynchronizedInput: return "SynchronizedInput";
    case Errc::PivotOutOfRange: return "PivotOutOfRange";
    case Errc::ImproperSet: return "ImproperSet";
    case Errc::ParseError: return "ParseError";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::NonMonotone: return "NonMonotone";
    case Errc::DecayViolation: return "DecayViolation";
    case Errc::SlowOrbit: return "SlowOrbit";
    case Errc::FlowMismatch: return "FlowMismatch";
    case Errc::SignMismatch: return "SignMismatch";
    case Errc::SingularIntegrand: return "SingularIntegrand";
    case Errc::NonpositiveEpsilon: return "NonpositiveEpsilon";
    case Errc::NoBracket: return "NoBracket";
    case Errc::MultipleRoots: return "MultipleRoots";
    case Errc::ZeroTau: return "ZeroTau";
    case Errc::NoCrossing: return "NoCrossing";
    case Errc::Stuck: return "Stuck";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::IntegrationFailure: return "IntegrationFailure";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::IOError: return "IOError";
    }
    return "Unknown";
}

constexpr ErrorKind kind_of(Errc c) noexcept {
    switch (c) {
    case Errc::DuplicatePoint:
    case Errc::ClassTooLarge:
    case Errc::Intermingled:
    case Errc::BadPartition:
    case Errc::SizeMismatch:
    case Errc::SynchronizedInput:
    case Errc::PivotOutOfRange:
    case Errc::ImproperSet:
    case Errc::ParseError:
        return ErrorKind::Validation;
    case Errc::InvariantViolation:
        return ErrorKind::Invariant;
    case Errc::IOError:
        return ErrorKind::IO;
    default:
        return ErrorKind::Numerical;
    }
}

// Single exception type for the library; the code carries the failure class.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

    Errc code() const noexcept { return code_; }
    /// what() without the code prefix.
    const std::string& message() const noexcept { return message_; }
    ErrorKind kind() const noexcept { return kind_of(code_); }

private:
    Errc code_;
    std::string message_;
};

} // namespace parabolica
