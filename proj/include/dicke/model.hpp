#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

// N two-level systems collectively coupled to a bosonic field mode b, with an
// A^2 self-energy term (alpha*lambda^2/Omega)(b^dag+b)^2 and an ancillary mode
// whose Fock occupation n enters through -g0*n*(b^dag+b)^2 plus the constant
// n*omega_c.  All energies in units with hbar = 1.
struct ModelParams {
    double Omega   = 1.0;  // two-level transition frequency, > 0
    double omega   = 1.0;  // field mode frequency, > 0
    double omega_c = 1.0;  // ancilla mode frequency, >= 0 (constant shift only)
    double lambda  = 0.0;  // collective spin-field coupling, >= 0
    double alpha   = 0.0;  // A^2-term coefficient, >= 0 (0 = none, >= 1 = cavity QED)
    double g0      = 0.0;  // quadratic ancilla-field coupling, >= 0
    int n          = 0;    // ancilla Fock occupation, >= 0
    int N          = 0;    // spin count; thermo_limit (0) means N -> infinity

    static constexpr int thermo_limit = 0;

    bool finite_spins() const { return N > 0; }

    // Rescaled coupling chi = 2*lambda/sqrt(Omega*omega).
    double chi() const { return 2.0 * lambda / std::sqrt(Omega * omega); }
    void set_chi(double chi) { lambda = 0.5 * chi * std::sqrt(Omega * omega); }

    // Lab-frame quadratic form coefficient K = alpha*lambda^2/Omega - n*g0,
    // so that H carries omega*b^dag*b + K*(b^dag+b)^2.
    double quadratic_coefficient() const { return alpha * lambda * lambda / Omega - n * g0; }

    void validate() const {
        if (!(Omega > 0.0)) throw std::invalid_argument("ModelParams: Omega must be > 0");
        if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be > 0");
        if (!(omega_c >= 0.0)) throw std::invalid_argument("ModelParams: omega_c must be >= 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be >= 0");
        if (!(alpha >= 0.0)) throw std::invalid_argument("ModelParams: alpha must be >= 0");
        if (!(g0 >= 0.0)) throw std::invalid_argument("ModelParams: g0 must be >= 0");
        if (n < 0) throw std::invalid_argument("ModelParams: n must be >= 0");
        if (N < 0) throw std::invalid_argument("ModelParams: N must be positive or thermo_limit");
    }
};

// Squeeze-transformed quantities of the photon-dressed frame.  The squeeze
// argument s = 1 + alpha*chi^2 - 4*n*g0/omega decides stability; the fields
// that require the squeezing transformation exist only for s > 0 (omega_n is
// also defined at the s = 0 boundary, where it vanishes).
struct DressedFrame {
    double chi = 0.0;  // rescaled coupling 2*lambda/sqrt(Omega*omega)
    double s   = 1.0;  // squeeze argument; s <= 0 marks the unstable regime
    std::optional<double> r_n;       // squeeze parameter -(1/4) ln s
    std::optional<double> omega_n;   // dressed field frequency omega*sqrt(s)
    std::optional<double> lambda_n;  // dressed coupling e^{r_n} * lambda
    std::optional<double> chi_n;     // dressed rescaled coupling chi/sqrt(s)
    std::optional<double> C_n;       // frame constant n*omega_c + (sqrt(s)-1)*omega/2
};

enum class PhaseLabel { Normal, Superradiant, Critical, Unstable };

inline const char* to_string(PhaseLabel p) {
    switch (p) {
        case PhaseLabel::Normal: return "normal";
        case PhaseLabel::Superradiant: return "superradiant";
        case PhaseLabel::Critical: return "critical";
        case PhaseLabel::Unstable: return "unstable";
    }
    return "unknown";
}

struct CriticalityReport {
    bool exists = false;
    std::optional<double> chi_c;  // root of chi^2 (1 - alpha) = 1 - 4 n g0 / omega
    bool degenerate = false;      // alpha = 1 and g0 = omega/(4n): chi_n = 1 for every chi
    std::string branch_note;
};

// Description of the stable-chi region at fixed (alpha, g0, n).
struct StabilityBounds {
    bool all_stable = true;        // entire chi >= 0 axis stable
    bool none_stable = false;      // alpha = 0 with g0 > omega/(4n): no chi is stable
    std::optional<double> chi_min; // lower edge of the stable region when one exists
};

inline DressedFrame dressed_frame(const ModelParams& p) {
    p.validate();
    DressedFrame f;
    f.chi = p.chi();
    f.s = 1.0 + p.alpha * f.chi * f.chi - 4.0 * p.n * p.g0 / p.omega;
    if (f.s > 0.0) {
        const double sqrt_s = std::sqrt(f.s);
        f.r_n = -0.25 * std::log(f.s);
        f.omega_n = p.omega * sqrt_s;
        f.lambda_n = std::exp(*f.r_n) * p.lambda;
        f.chi_n = f.chi / sqrt_s;
        f.C_n = p.n * p.omega_c + (sqrt_s - 1.0) * p.omega / 2.0;
    } else if (f.s == 0.0) {
        f.omega_n = 0.0;
    }
    return f;
}

inline PhaseLabel classify_phase(const ModelParams& p, double tol = 1e-10) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify_phase: tol must be > 0");
    const DressedFrame f = dressed_frame(p);
    const double chi2 = f.chi * f.chi;
    if (f.s < 0.0 || std::abs(f.s) <= tol) return PhaseLabel::Unstable;
    if (std::abs(chi2 - f.s) <= tol * std::max(1.0, chi2)) return PhaseLabel::Critical;
    return chi2 > f.s ? PhaseLabel::Superradiant : PhaseLabel::Normal;
}

// Solves chi^2 (1 - alpha) = 1 - 4 n g0 / omega for the critical rescaled
// coupling, with lambda treated as free.  exists = false encodes the no-go
// theorem (n = 0, alpha >= 1) and every other branch without a real root.
inline CriticalityReport critical_couplings(const ModelParams& p) {
    p.validate();
    CriticalityReport rep;
    const double rhs = 1.0 - 4.0 * p.n * p.g0 / p.omega;
    const double coef = 1.0 - p.alpha;
    if (coef == 0.0) {
        if (rhs == 0.0) {
            rep.degenerate = true;
            rep.branch_note = "alpha = 1 with g0 = omega/(4n): chi_n = 1 for every chi, no isolated critical point";
        } else {
            rep.branch_note = "alpha = 1: criticality condition has no root";
        }
        return rep;
    }
    const double chi_c_sq = rhs / coef;
    if (chi_c_sq > 0.0) {
        rep.exists = true;
        rep.chi_c = std::sqrt(chi_c_sq);
        if (p.alpha < 1.0) {
            rep.branch_note = p.n == 0 ? "alpha < 1, n = 0: bare critical point"
                                       : "alpha < 1 with g0 < omega/(4n): photon-lowered critical point";
        } else {
            rep.branch_note = "alpha > 1 with g0 > omega/(4n): photon-induced critical point (reversed transition)";
        }
    } else {
        rep.branch_note = p.alpha > 1.0 ? "alpha > 1 without g0 > omega/(4n): transition forbidden (no-go)"
                                        : "alpha < 1 with g0 >= omega/(4n): no stable critical point";
    }
    return rep;
}

inline StabilityBounds stability_bounds(const ModelParams& p) {
    p.validate();
    StabilityBounds b;
    if (p.n == 0) return b;  // s = 1 + alpha*chi^2 >= 1
    const double drive = 4.0 * p.n * p.g0 / p.omega;
    if (p.alpha == 0.0) {
        if (drive > 1.0) {
            b.all_stable = false;
            b.none_stable = true;
        }
        return b;
    }
    if (drive > 1.0) {
        b.all_stable = false;
        b.chi_min = std::sqrt((drive - 1.0) / p.alpha);
    }
    return b;
}

} // namespace dicke
