#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace substoch {

enum class Errc {
    IndexOutOfRange,
    MatrixTooSmall,
    NotSquare,
    DimensionMismatch,
    SingularMatrix,
    SingularSubmatrix,
    SelectorUndefined,
    NegativeEntry,
    RowSumExceedsOne,
    SpectralRadiusNotLessThanOne,
    PreconditionViolated,
    NotColumnSubstochastic,
    CertificationError,
    ContractViolation,
    GenerationExhausted,
    ParseError,
    IoError,
};

constexpr std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::MatrixTooSmall: return "MatrixTooSmall";
    case Errc::NotSquare: return "NotSquare";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::SingularSubmatrix: return "SingularSubmatrix";
    case Errc::SelectorUndefined: return "SelectorUndefined";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::RowSumExceedsOne: return "RowSumExceedsOne";
    case Errc::SpectralRadiusNotLessThanOne: return "SpectralRadiusNotLessThanOne";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::NotColumnSubstochastic: return "NotColumnSubstochastic";
    case Errc::CertificationError: return "CertificationError";
    case Errc::ContractViolation: return "ContractViolation";
    case Errc::GenerationExhausted: return "GenerationExhausted";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception. Carries a machine-readable code and, where the
/// failure is tied to a matrix position, the 1-based row/column involved.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what,
          std::optional<std::size_t> row = std::nullopt,
          std::optional<std::size_t> col = std::nullopt)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what)
        , code_(code)
        , row_(row)
        , col_(col)
    {
    }

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> row() const noexcept { return row_; }
    std::optional<std::size_t> col() const noexcept { return col_; }

private:
    Errc code_;
    std::optional<std::size_t> row_;
    std::optional<std::size_t> col_;
};

} // namespace substoch
