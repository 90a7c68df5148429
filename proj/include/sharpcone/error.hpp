#ifndef SHARPCONE_ERROR_HPP
#define SHARPCONE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sharpcone {

enum class ErrorKind {
    InvalidInput,
    NotHermitian,
    IllConditioned,
    Singular,
    ShapeMismatch,
    NotCommuting,
    DegenerateCenter,
    NotCyclicSeparating,
    NotInvariant,
    NotInCone,
    NotProjective,
    NotCentral,
    NotHermitianRep,
    NotRepresentable,
    Inconclusive,
    UnclassifiableBlock,
    HypothesisFailed,
    LemmaViolated,
    PreconditionFailed,
    ReconstructionFailed,
    InvalidProfile,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::DegenerateCenter: return "DegenerateCenter";
    case ErrorKind::NotCyclicSeparating: return "NotCyclicSeparating";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NotInCone: return "NotInCone";
    case ErrorKind::NotProjective: return "NotProjective";
    case ErrorKind::NotCentral: return "NotCentral";
    case ErrorKind::NotHermitianRep: return "NotHermitianRep";
    case ErrorKind::NotRepresentable: return "NotRepresentable";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::UnclassifiableBlock: return "UnclassifiableBlock";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::LemmaViolated: return "LemmaViolated";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::ReconstructionFailed: return "ReconstructionFailed";
    case ErrorKind::InvalidProfile: return "InvalidProfile";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace sharpcone

#endif
