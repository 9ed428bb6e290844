#ifndef TIPP_ERRORS_HPP
#define TIPP_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace tipp {

enum class ErrorKind {
    InvalidArgument,
    InvalidArity,
    OutOfRange,
    OverlappingSets,
    SingularSystem,
    BudgetExceeded,
    NoUnobserved,
    UnknownWindow,
    DegenerateNoise,
    ZeroMeanField,
    TooLarge,
    SearchFailed,
    ParseError,
    DimensionMismatch,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidArity: return "InvalidArity";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::OverlappingSets: return "OverlappingSets";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoUnobserved: return "NoUnobserved";
    case ErrorKind::UnknownWindow: return "UnknownWindow";
    case ErrorKind::DegenerateNoise: return "DegenerateNoise";
    case ErrorKind::ZeroMeanField: return "ZeroMeanField";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::SearchFailed: return "SearchFailed";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Process exit code for an error class (CLI contract).
///   0 success, 2 usage, 3 budget refusal, 4 numerical failure, 5 I/O.
constexpr int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::TooLarge:
        return 3;
    case ErrorKind::SingularSystem:
    case ErrorKind::DegenerateNoise:
    case ErrorKind::ZeroMeanField:
    case ErrorKind::SearchFailed:
        return 4;
    case ErrorKind::ParseError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::Io:
        return 5;
    default:
        return 2;
    }
}

} // namespace tipp

#endif
