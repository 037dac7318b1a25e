#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abhms {

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    NotSymmetric,
    NotPositiveDefinite,
    NotSymplectic,
    SingularDenominator,
    NotUnimodular,
    BoxTooLarge,
    LevelNotPositive,
    ModulusMismatch,
    LevelOrderViolation,
    EqualSlopes,
    VerticalSlope,
    InvalidSlopeTriple,
    RepeatedSlopes,
    SlopeOrderViolation,
};

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotSymplectic: return "NotSymplectic";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::BoxTooLarge: return "BoxTooLarge";
    case ErrorKind::LevelNotPositive: return "LevelNotPositive";
    case ErrorKind::ModulusMismatch: return "ModulusMismatch";
    case ErrorKind::LevelOrderViolation: return "LevelOrderViolation";
    case ErrorKind::EqualSlopes: return "EqualSlopes";
    case ErrorKind::VerticalSlope: return "VerticalSlope";
    case ErrorKind::InvalidSlopeTriple: return "InvalidSlopeTriple";
    case ErrorKind::RepeatedSlopes: return "RepeatedSlopes";
    case ErrorKind::SlopeOrderViolation: return "SlopeOrderViolation";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace abhms
