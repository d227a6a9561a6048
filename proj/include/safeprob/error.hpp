#pragma once

#include <stdexcept>
#include <string>

namespace safeprob {

enum class ErrorCode {
    InvalidArgument,
    InfeasibleCredalSet,
    SizeLimit,
    ZeroProbabilityConditioning,
    NotEssentiallyUnique,
    NonNumericTarget,
    MissingDetermination,
    EquivalenceViolation,
    NotFullSupport,
    NotAPivot,
    UniquenessViolated,
    HypothesisViolated,
    InfiniteLoss,
    ZeroMassObservable,
    DomainError,
    BracketingFailure,
    ParseError,
    ValidationError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

// Parse failures additionally carry a 1-based source location.
class ParseError : public Error {
   public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

   private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace safeprob
