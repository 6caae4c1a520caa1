#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "dicke/model.hpp"

namespace dicke {

// omega_minus below this guard means Bogoliubov coefficients and the position
// variance are evaluated at (numerical) criticality and diverge.
inline constexpr double kCriticalGuard = 1e-12;

// Excitation energies and mixing angle of one phase's bilinear Hamiltonian.
// In the superradiant phase the fields carry their tilde meaning and
// Omega_tilde = Omega (1 + chi_n^2)/2 is populated.
struct ExcitationSpectrum {
    PhaseLabel phase = PhaseLabel::Normal;
    double omega_minus = 0.0;
    double omega_plus = 0.0;
    double theta = 0.0;       // Bogoliubov mixing angle, in [0, pi/2]
    double eg_density = 0.0;  // ground-state energy per spin
    std::optional<double> Omega_tilde;
};

// The eight Bogoliubov coefficients connecting (b_n, d) to the normal modes.
// Symplectic normalization: (xi_+^2 - xi_-^2) + (zeta_+^2 - zeta_-^2) = 1 per row.
struct BogoliubovSet {
    double xi_b_minus = 0.0, xi_b_plus = 0.0;
    double zeta_b_minus = 0.0, zeta_b_plus = 0.0;
    double xi_d_minus = 0.0, xi_d_plus = 0.0;
    double zeta_d_minus = 0.0, zeta_d_plus = 0.0;
};

// Ground-state observables in intensive form: beta, nu and the field coherence
// are reported per sqrt(N) since N is infinite here.
struct GroundObservables {
    double psi_q = 0.0;                 // order parameter, (1/4)(chi_n^2 - chi_n^-2) in SP
    double delta_x = 0.0;               // ground-state position variance of x = (b^dag+b)/sqrt(2)
    double ratio_Omega_omega_n = 0.0;   // Omega / omega_n
    double coherence_plus = 0.0;        // +e^{r_n} beta / sqrt(N); the degenerate partner carries -
    double coherence_minus = 0.0;
    std::optional<double> beta;         // field displacement amplitude / sqrt(N)
    std::optional<double> nu;           // spin displacement amplitude / sqrt(N)
};

// One fully solved parameter point.  Unstable points carry phase, chi and s
// only; delta_x is additionally absent at (numerical) criticality.
struct PhasePoint {
    PhaseLabel phase = PhaseLabel::Normal;
    double chi = 0.0;
    double s = 1.0;
    std::optional<double> chi_n;
    std::optional<double> omega_minus, omega_plus;
    std::optional<double> eg_density;
    std::optional<double> psi_q;
    std::optional<double> coherence;
    std::optional<double> delta_x;
};

namespace detail {

// Larger root by the quadratic formula, smaller one from the root product;
// avoids the cancellation that makes the naive "-" branch lose digits at the
// critical point, where the product vanishes exactly.
inline void split_mode_energies(double trace, double radicand, double product,
                                double& omega_minus, double& omega_plus) {
    const double root = std::sqrt(std::max(radicand, 0.0));
    const double w2_plus = 0.5 * (trace + root);
    const double w2_minus = w2_plus > 0.0 ? std::max(product / w2_plus, 0.0) : 0.0;
    omega_plus = std::sqrt(w2_plus);
    omega_minus = std::sqrt(w2_minus);
}

} // namespace detail

inline ExcitationSpectrum normal_spectrum(const ModelParams& p) {
    const PhaseLabel phase = classify_phase(p);
    if (phase != PhaseLabel::Normal && phase != PhaseLabel::Critical)
        throw PhaseMismatch("normal_spectrum: point is not in the normal phase");
    const DressedFrame f = dressed_frame(p);
    const double wn = *f.omega_n;
    const double wn2 = wn * wn;
    const double Om2 = p.Omega * p.Omega;
    const double chi2 = f.chi * f.chi;
    ExcitationSpectrum sp;
    sp.phase = phase;
    // omega_+^2 omega_-^2 = Omega^2 omega^2 (s - chi^2)
    detail::split_mode_energies(wn2 + Om2,
                                (wn2 - Om2) * (wn2 - Om2) + 4.0 * chi2 * Om2 * p.omega * p.omega,
                                Om2 * p.omega * p.omega * (f.s - chi2),
                                sp.omega_minus, sp.omega_plus);
    sp.theta = 0.5 * std::atan2(4.0 * *f.lambda_n * std::sqrt(p.Omega * wn), Om2 - wn2);
    sp.eg_density = -0.5 * p.Omega;
    return sp;
}

inline ExcitationSpectrum superradiant_spectrum(const ModelParams& p) {
    const PhaseLabel phase = classify_phase(p);
    if (phase != PhaseLabel::Superradiant && phase != PhaseLabel::Critical)
        throw PhaseMismatch("superradiant_spectrum: point is not in the superradiant phase");
    const DressedFrame f = dressed_frame(p);
    const double wn = *f.omega_n;
    const double wn2 = wn * wn;
    const double Om2 = p.Omega * p.Omega;
    const double cn2 = *f.chi_n * *f.chi_n;
    const double cn4 = cn2 * cn2;
    ExcitationSpectrum sp;
    sp.phase = phase;
    // omega~_+^2 omega~_-^2 = Omega^2 omega_n^2 (chi_n^4 - 1)
    detail::split_mode_energies(wn2 + cn4 * Om2,
                                (cn4 * Om2 - wn2) * (cn4 * Om2 - wn2) + 4.0 * Om2 * wn2,
                                Om2 * wn2 * (cn4 - 1.0),
                                sp.omega_minus, sp.omega_plus);
    sp.theta = 0.5 * std::atan2(2.0 * wn * p.Omega, cn4 * Om2 - wn2);
    sp.Omega_tilde = 0.5 * p.Omega * (1.0 + cn2);
    sp.eg_density = -0.25 * p.Omega * (cn2 + 1.0 / cn2);
    return sp;
}

// Coefficients of the phase-appropriate Bogoliubov transformation.  The d-row
// couples to Omega in the normal phase and to Omega_tilde in the superradiant
// phase.
inline BogoliubovSet bogoliubov_coefficients(const ModelParams& p) {
    const PhaseLabel phase = classify_phase(p);
    if (phase == PhaseLabel::Unstable)
        throw PhaseMismatch("bogoliubov_coefficients: unstable point");
    const ExcitationSpectrum sp =
        phase == PhaseLabel::Superradiant ? superradiant_spectrum(p) : normal_spectrum(p);
    if (sp.omega_minus <= kCriticalGuard)
        throw CriticalDivergence("bogoliubov_coefficients: omega_minus below divergence guard");
    const DressedFrame f = dressed_frame(p);
    const double wn = *f.omega_n;
    const double Om_eff = sp.Omega_tilde.value_or(p.Omega);
    const double c = std::cos(sp.theta), s = std::sin(sp.theta);
    const double wm = sp.omega_minus, wp = sp.omega_plus;
    BogoliubovSet set;
    set.xi_b_plus = c * (wn + wm) / (2.0 * std::sqrt(wn * wm));
    set.xi_b_minus = c * (wn - wm) / (2.0 * std::sqrt(wn * wm));
    set.zeta_b_plus = s * (wn + wp) / (2.0 * std::sqrt(wn * wp));
    set.zeta_b_minus = s * (wn - wp) / (2.0 * std::sqrt(wn * wp));
    set.xi_d_plus = -s * (Om_eff + wm) / (2.0 * std::sqrt(Om_eff * wm));
    set.xi_d_minus = -s * (Om_eff - wm) / (2.0 * std::sqrt(Om_eff * wm));
    set.zeta_d_plus = c * (Om_eff + wp) / (2.0 * std::sqrt(Om_eff * wp));
    set.zeta_d_minus = c * (Om_eff - wp) / (2.0 * std::sqrt(Om_eff * wp));
    return set;
}

// Position variance closed form.  With x = e^{r_n}(b_n^dag + b_n)/sqrt(2) and
// the mode sums xi_+ + xi_- = cos(theta) sqrt(omega_n/omega_-) (likewise for
// zeta), the vacuum variance reduces to
//   dx^2 = e^{2 r_n} omega_n / 2 * (cos^2/omega_- + sin^2/omega_+)
// and e^{2 r_n} omega_n = omega.  Validated against the finite-N oracle and
// the lambda = 0 vacuum limit in the test suite.
inline double position_variance(const ModelParams& p, const ExcitationSpectrum& sp) {
    if (sp.omega_minus <= kCriticalGuard)
        throw CriticalDivergence("position_variance: omega_minus below divergence guard");
    const double c = std::cos(sp.theta), s = std::sin(sp.theta);
    return std::sqrt(0.5 * p.omega * (c * c / sp.omega_minus + s * s / sp.omega_plus));
}

inline GroundObservables ground_observables(const ModelParams& p) {
    const PhaseLabel phase = classify_phase(p);
    if (phase == PhaseLabel::Unstable)
        throw UnstableRegime("ground_observables: s <= 0");
    const DressedFrame f = dressed_frame(p);
    GroundObservables obs;
    obs.ratio_Omega_omega_n = p.Omega / *f.omega_n;
    if (phase == PhaseLabel::Superradiant) {
        const double cn2 = *f.chi_n * *f.chi_n;
        obs.psi_q = 0.25 * (cn2 - 1.0 / cn2);
        obs.beta = std::sqrt(p.Omega / (4.0 * *f.omega_n) * (cn2 - 1.0 / cn2));
        obs.nu = std::sqrt(0.5 * (1.0 - 1.0 / cn2));
        obs.coherence_plus = std::exp(*f.r_n) * *obs.beta;
        obs.coherence_minus = -obs.coherence_plus;
        obs.delta_x = position_variance(p, superradiant_spectrum(p));
    } else {
        obs.delta_x = position_variance(p, normal_spectrum(p));
    }
    return obs;
}

inline PhasePoint solve_point(const ModelParams& p) {
    PhasePoint pt;
    const DressedFrame f = dressed_frame(p);
    pt.chi = f.chi;
    pt.s = f.s;
    pt.phase = classify_phase(p);
    if (pt.phase == PhaseLabel::Unstable) return pt;
    pt.chi_n = f.chi_n;
    const ExcitationSpectrum sp =
        pt.phase == PhaseLabel::Superradiant ? superradiant_spectrum(p) : normal_spectrum(p);
    pt.omega_minus = sp.omega_minus;
    pt.omega_plus = sp.omega_plus;
    pt.eg_density = sp.eg_density;
    if (pt.phase == PhaseLabel::Superradiant) {
        const GroundObservables obs = ground_observables(p);
        pt.psi_q = obs.psi_q;
        pt.coherence = obs.coherence_plus;
        pt.delta_x = obs.delta_x;
    } else {
        pt.psi_q = 0.0;
        pt.coherence = 0.0;
        if (sp.omega_minus > kCriticalGuard) pt.delta_x = position_variance(p, sp);
    }
    return pt;
}

} // namespace dicke
