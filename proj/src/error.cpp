#include "divest/error.hpp"

namespace divest {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonPositive: return "NonPositive";
        case ErrorKind::NetProfitViolation: return "NetProfitViolation";
        case ErrorKind::NegativeVolatility: return "NegativeVolatility";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorKind::SchemeMismatch: return "SchemeMismatch";
        case ErrorKind::DegenerateRoots: return "DegenerateRoots";
        case ErrorKind::NoDiffusion: return "NoDiffusion";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::BracketNotFound: return "BracketNotFound";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::IOError: return "IOError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace divest
