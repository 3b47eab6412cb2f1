#pragma once

#include <stdexcept>
#include <string>

namespace mixforge {

// Base for all domain errors. The CLI maps these to exit code 1;
// anything else escaping main is a bug.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedRegistry : DomainError {
    using DomainError::DomainError;
};
struct InvalidDocument : DomainError {
    using DomainError::DomainError;
};
struct InvalidTokenizer : DomainError {
    using DomainError::DomainError;
};
struct Infeasible : DomainError {
    using DomainError::DomainError;
};
struct EmptyInput : DomainError {
    using DomainError::DomainError;
};
struct InconsistentIndex : DomainError {
    using DomainError::DomainError;
};
struct MissingBudget : DomainError {
    using DomainError::DomainError;
};
struct ScorerFailure : DomainError {
    using DomainError::DomainError;
};
struct UnknownKind : DomainError {
    using DomainError::DomainError;
};
struct IneligibleTarget : DomainError {
    using DomainError::DomainError;
};
struct PadCollision : DomainError {
    using DomainError::DomainError;
};
struct IoError : DomainError {
    using DomainError::DomainError;
};
struct ManifestMismatch : DomainError {
    using DomainError::DomainError;
};
struct MissingManifest : DomainError {
    using DomainError::DomainError;
};
struct InvalidStep : DomainError {
    using DomainError::DomainError;
};
struct LengthMismatch : DomainError {
    using DomainError::DomainError;
};
struct ZeroBase : DomainError {
    using DomainError::DomainError;
};
struct EmptyGroup : DomainError {
    using DomainError::DomainError;
};

} // namespace mixforge
