#ifndef DIVEST_ERROR_HPP
#define DIVEST_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace divest {

enum class ErrorKind {
    NonPositive,
    NetProfitViolation,
    NegativeVolatility,
    LengthMismatch,
    EmptyEnsemble,
    SchemeMismatch,
    DegenerateRoots,
    NoDiffusion,
    DomainError,
    BracketNotFound,
    ParseError,
    ValidationError,
    IOError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers can branch
/// on it without parsing the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace divest

#endif  // DIVEST_ERROR_HPP
