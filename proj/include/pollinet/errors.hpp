#pragma once

#include <stdexcept>
#include <string>

namespace pollinet {

/// Raised when a run configuration fails validation. The message names the
/// offending field (e.g. "rates.alphaP").
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The plant growth rate has no window of positivity (its quadratic has no
/// positive real roots), so no viable plant community can exist.
struct NoViableWindow : std::runtime_error {
    explicit NoViableWindow(const std::string& msg) : std::runtime_error(msg) {}
};

/// Adaptive integrator step size fell below the hard floor (1e-14).
struct StiffnessError : std::runtime_error {
    explicit StiffnessError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A root search that assumed a unique sign change found several.
struct AmbiguousRoot : std::runtime_error {
    explicit AmbiguousRoot(const std::string& msg) : std::runtime_error(msg) {}
};

/// Time grids of two trajectories that must be compared do not match.
struct AlignmentError : std::runtime_error {
    explicit AlignmentError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pollinet
