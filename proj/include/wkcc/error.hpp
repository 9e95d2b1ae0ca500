#ifndef WKCC_ERROR_HPP
#define WKCC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace wkcc {

/// Failure categories raised by the library. The CLI maps each category to
/// an exit status (see `exit_status`).
enum class ErrorCode {
    InvalidArgument,
    NonMonotoneQuantiles,
    OutOfDomain,
    GridMismatch,
    EmptyInput,
    DegenerateData,
    DimensionTooLarge,
    SolverFailure,
    TooFewPoints,
    EmptyCluster,
    LengthMismatch,
    Undefined,
    SingleCluster,
    EmptySamples,
    ParseError,
    MissingHeader,
    ColumnCountMismatch,
    IoError,
    DomainError,
    UnknownDesign,
    SpecError,
    DimensionMismatch,
    SingularReference,
    NoConvergence,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonMonotoneQuantiles: return "NonMonotoneQuantiles";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::ColumnCountMismatch: return "ColumnCountMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnknownDesign: return "UnknownDesign";
    case ErrorCode::SpecError: return "SpecError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularReference: return "SingularReference";
    case ErrorCode::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse errors carry the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what)
        , line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

/// 2 = bad arguments, 3 = bad data, 4 = numerical failure.
inline int exit_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownDesign:
    case ErrorCode::SpecError:
    case ErrorCode::DimensionTooLarge:
        return 2;
    case ErrorCode::SolverFailure:
    case ErrorCode::NoConvergence:
        return 4;
    default:
        return 3;
    }
}

}  // namespace wkcc

#endif  // WKCC_ERROR_HPP
