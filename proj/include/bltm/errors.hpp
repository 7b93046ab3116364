#pragma once

#include <stdexcept>
#include <string>

namespace bltm {

/// A solver or CLI option is out of its legal range.
struct InvalidConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The problem definition itself is unusable (non-finite data, empty domain).
struct InvalidProblemError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// The terminal velocity has the wrong sign for the requested branch, so the
/// group parameter is undefined at this iterate.
struct BranchError : std::domain_error {
    using std::domain_error::domain_error;
};

/// An integration that must reach the truncated boundary halted early.
struct BlowupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bltm
