#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Analytic operation evaluated outside its phase of validity.
struct PhaseMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quantity diverges at the critical point (omega_minus at or below the guard).
struct CriticalDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested point has s <= 0; the Hamiltonian is unbounded below there.
struct UnstableRegime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CutoffTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Basis dimension would exceed the configured maximum.
struct OverflowRisk : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vector length does not match the (fock_cutoff, N) basis.
struct BasisMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Eigensolver exhausted its iteration budget.
struct NoConvergence : std::runtime_error {
    NoConvergence(const std::string& what, double residual)
        : std::runtime_error(what), best_residual(residual) {}
    double best_residual;
};

struct InvalidAxis : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotAGrid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dicke
