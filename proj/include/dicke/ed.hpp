#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dicke/banded.hpp"
#include "dicke/errors.hpp"
#include "dicke/thermo.hpp"

namespace dicke {

struct EDConfig {
    int fock_cutoff = 0;            // boson truncation M; 0 = Auto from the analytic occupation
    double cutoff_growth = 1.5;     // multiplicative cutoff growth per convergence step
    double cutoff_tol = 1e-6;       // relative convergence tolerance on <b^dag b>
    int max_cutoff = 4096;          // hard cutoff ceiling
    double eig_tol = 1e-10;         // eigenpair residual tolerance, relative to max(1, |E|)
    long max_dim = 1'000'000;       // basis-dimension guard
    int dense_threshold = 2000;     // parity sectors at or below this dimension solve densely
    double degeneracy_tol = 1e-10;  // doublet splitting below this reports the even state
    int lanczos_block = 40;         // Krylov steps per shift-invert cycle
    long max_matvecs = 20000;       // solver iteration budget before NoConvergence
    std::uint64_t seed = 20240801;  // start-vector seed (determinism)

    void validate() const {
        if (!(cutoff_growth > 1.0)) throw std::invalid_argument("EDConfig: cutoff_growth must be > 1");
        if (!(cutoff_tol > 0.0 && cutoff_tol < 1.0))
            throw std::invalid_argument("EDConfig: cutoff_tol must be in (0, 1)");
        if (!(eig_tol > 0.0)) throw std::invalid_argument("EDConfig: eig_tol must be > 0");
    }
};

// Truncated Fock x collective-spin product basis |k, mhat> with k = 0..M and
// mhat = m + N/2 = 0..N, flattened as k*(N+1) + mhat.
struct BasisMeta {
    int fock_cutoff = 0;  // M
    int n_spins = 0;      // N (collective j = N/2 sector)

    long dim() const { return static_cast<long>(fock_cutoff + 1) * (n_spins + 1); }
    long index(int k, int mhat) const { return static_cast<long>(k) * (n_spins + 1) + mhat; }
    int boson_of(long idx) const { return static_cast<int>(idx / (n_spins + 1)); }
    int mhat_of(long idx) const { return static_cast<int>(idx % (n_spins + 1)); }
    // Parity of e^{i pi (b^dag b + J_z + N/2)}: 0 = even (+1), 1 = odd (-1).
    int parity_of(long idx) const { return (boson_of(idx) + mhat_of(idx)) & 1; }
};

// Real-symmetric sparse matrix in upper-triangular triplet storage (row <= col).
struct OperatorMatrix {
    struct Triplet {
        long row, col;
        double value;
    };

    long dim = 0;
    std::vector<Triplet> entries;
    BasisMeta basis;

    void matvec(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.setZero(dim);
        for (const Triplet& t : entries) {
            y[t.row] += t.value * x[t.col];
            if (t.row != t.col) y[t.col] += t.value * x[t.row];
        }
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
        for (const Triplet& t : entries) {
            full(t.row, t.col) += t.value;
            if (t.row != t.col) full(t.col, t.row) += t.value;
        }
        return full;
    }
};

struct EDResult {
    double ground_energy = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd ground_vector;  // unit norm over the (M, N) basis
    double n_b = 0.0;               // <b^dag b>
    double jz = 0.0;                // <J_z>
    double x_mean = 0.0;            // <x>, x = (b^dag + b)/sqrt(2)
    double x2_mean = 0.0;           // <x^2>
    double parity = 0.0;            // <Pi>
    double psi_q = 0.0;             // s * omega * n_b / (N * Omega)
    double delta_x = 0.0;           // sqrt(x2_mean - x_mean^2)
    int cutoff_used = 0;
    bool converged = false;
    double parity_splitting = std::numeric_limits<double>::quiet_NaN();  // |E_even - E_odd|
    double residual = std::numeric_limits<double>::quiet_NaN();          // ||Hv - Ev||
};

// Lab-frame Hamiltonian with a^dag a replaced by the Fock occupation n:
//   H = n*omega_c + Omega*J_z + omega*b^dag b + (lambda/sqrt(N)) (b^dag+b) J_x
//       + K (b^dag+b)^2,   K = alpha*lambda^2/Omega - n*g0,
// on the collective j = N/2 sector.
inline OperatorMatrix build_hamiltonian(const ModelParams& p, int fock_cutoff,
                                        long max_dim = 1'000'000) {
    p.validate();
    if (!p.finite_spins())
        throw std::invalid_argument("build_hamiltonian: finite N required");
    if (fock_cutoff < 2) throw CutoffTooSmall("build_hamiltonian: fock cutoff must be >= 2");
    const int M = fock_cutoff, N = p.N;
    OperatorMatrix H;
    H.basis = BasisMeta{M, N};
    H.dim = H.basis.dim();
    if (H.dim > max_dim)
        throw OverflowRisk("build_hamiltonian: basis dimension " + std::to_string(H.dim) +
                           " exceeds configured maximum " + std::to_string(max_dim));
    const double K = p.quadratic_coefficient();
    const double coupling = p.lambda / std::sqrt(static_cast<double>(N));
    const double shift = p.n * p.omega_c;
    H.entries.reserve(static_cast<size_t>(H.dim) * 4);
    for (int k = 0; k <= M; ++k) {
        for (int mh = 0; mh <= N; ++mh) {
            const long i = H.basis.index(k, mh);
            const double m = mh - 0.5 * N;
            H.entries.push_back({i, i, shift + p.Omega * m + p.omega * k + K * (2.0 * k + 1.0)});
        }
    }
    if (coupling != 0.0) {
        for (int k = 0; k < M; ++k) {
            const double bfac = std::sqrt(k + 1.0);
            for (int mh = 0; mh <= N; ++mh) {
                const long i = H.basis.index(k, mh);
                if (mh < N) {  // (k, mh) <-> (k+1, mh+1), J_+ element sqrt((N-mh)(mh+1))
                    const double el = coupling * bfac *
                                      std::sqrt(static_cast<double>(N - mh) * (mh + 1));
                    H.entries.push_back({i, H.basis.index(k + 1, mh + 1), el});
                }
                if (mh > 0) {  // (k, mh) <-> (k+1, mh-1), J_- element sqrt(mh(N-mh+1))
                    const double el = coupling * bfac *
                                      std::sqrt(static_cast<double>(mh) * (N - mh + 1));
                    H.entries.push_back({i, H.basis.index(k + 1, mh - 1), el});
                }
            }
        }
    }
    if (K != 0.0) {
        for (int k = 0; k + 2 <= M; ++k) {
            const double el = K * std::sqrt((k + 1.0) * (k + 2.0));
            for (int mh = 0; mh <= N; ++mh)
                H.entries.push_back({H.basis.index(k, mh), H.basis.index(k + 2, mh), el});
        }
    }
    return H;
}

// Parity operator Pi = e^{i pi N_ex}, N_ex = b^dag b + J_z + N/2; diagonal +-1.
inline OperatorMatrix parity_matrix(int n_spins, int fock_cutoff) {
    if (n_spins < 1) throw std::invalid_argument("parity_matrix: N must be >= 1");
    if (fock_cutoff < 2) throw CutoffTooSmall("parity_matrix: fock cutoff must be >= 2");
    OperatorMatrix Pi;
    Pi.basis = BasisMeta{fock_cutoff, n_spins};
    Pi.dim = Pi.basis.dim();
    Pi.entries.reserve(static_cast<size_t>(Pi.dim));
    for (long i = 0; i < Pi.dim; ++i)
        Pi.entries.push_back({i, i, Pi.basis.parity_of(i) ? -1.0 : 1.0});
    return Pi;
}

namespace detail {

inline std::uint64_t xorshift64(std::uint64_t& s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
}

inline Eigen::VectorXd deterministic_start(int dim, std::uint64_t seed) {
    std::uint64_t state = seed ^ 0x9E3779B97F4A7C15ull;
    if (state == 0) state = 1;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = static_cast<double>(xorshift64(state) >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    const double nrm = v.norm();
    if (nrm < 1e-12) {
        v.setZero();
        v[0] = 1.0;
        return v;
    }
    return v / nrm;
}

struct CycleOut {
    double theta = 0.0;   // extreme Ritz value of the applied operator
    Eigen::VectorXd ritz;
    long applies = 0;
    bool exhausted = false;  // Krylov space closed before m steps
};

// One restarted Lanczos cycle with full reorthogonalization.
template <class Apply>
CycleOut lanczos_extreme(Apply&& apply, int dim, int m, const Eigen::VectorXd& start,
                         bool largest) {
    m = std::min(m, dim);
    CycleOut out;
    Eigen::MatrixXd Q(dim, m);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(std::max(m - 1, 1));
    Q.col(0) = start / start.norm();
    Eigen::VectorXd w(dim), proj;
    int steps = 0;
    double scale = 0.0;
    for (int j = 0; j < m; ++j) {
        apply(Q.col(j), w);
        ++out.applies;
        alpha[j] = Q.col(j).dot(w);
        scale = std::max(scale, std::abs(alpha[j]) + (j > 0 ? beta[j - 1] : 0.0));
        steps = j + 1;
        if (j + 1 == m) break;
        w -= alpha[j] * Q.col(j);
        if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
        auto Qj = Q.leftCols(j + 1);
        proj.noalias() = Qj.transpose() * w;
        w.noalias() -= Qj * proj;
        proj.noalias() = Qj.transpose() * w;
        w.noalias() -= Qj * proj;
        const double b = w.norm();
        if (!(b > std::max(scale, 1e-30) * 1e-13)) {
            out.exhausted = true;
            break;
        }
        beta[j] = b;
        Q.col(j + 1) = w / b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(alpha.head(steps), beta.head(std::max(steps - 1, 0)),
                              Eigen::ComputeEigenvectors);
    const int pick = largest ? steps - 1 : 0;
    out.theta = es.eigenvalues()(pick);
    out.ritz.noalias() = Q.leftCols(steps) * es.eigenvectors().col(pick);
    out.ritz.normalize();
    return out;
}

struct SectorEig {
    double energy = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd vector;
    double residual = std::numeric_limits<double>::infinity();
    long applies = 0;
};

// Smallest eigenpair of one banded sector matrix.  Dense below the configured
// threshold; shift-invert Lanczos with adaptive shifts above it.  The shift is
// kept strictly below the smallest eigenvalue: a Cholesky failure certifies
// the shift is too high, and theta - 2||r|| is a certified lower bound.
inline SectorEig solve_sector_lowest(const BandMatrix& A, const EDConfig& cfg,
                                     std::optional<double> energy_hint, std::uint64_t seed) {
    SectorEig out;
    if (A.dim == 1) {
        out.energy = A.band(0, 0);
        out.vector = Eigen::VectorXd::Ones(1);
        out.residual = 0.0;
        return out;
    }
    Eigen::VectorXd tmp(A.dim);
    auto residual_of = [&](const Eigen::VectorXd& v, double theta) {
        A.matvec(v, tmp);
        return (tmp - theta * v).norm();
    };
    if (A.dim <= cfg.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.dense());
        out.energy = es.eigenvalues()(0);
        out.vector = es.eigenvectors().col(0);
        out.residual = residual_of(out.vector, out.energy);
        // inverse-iteration polish when the dense solve misses the residual contract
        Eigen::MatrixXd fac;
        for (int attempt = 0; attempt < 3 &&
                              out.residual > cfg.eig_tol * std::max(1.0, std::abs(out.energy));
             ++attempt) {
            const double sigma =
                out.energy - std::max(4.0 * out.residual, 1e-12 * std::abs(out.energy));
            if (!banded_cholesky(A, sigma, fac)) break;
            Eigen::VectorXd v = out.vector;
            banded_solve(fac, A.dim, A.bw, v);
            v.normalize();
            A.matvec(v, tmp);
            const double theta = v.dot(tmp);
            const double r = (tmp - theta * v).norm();
            if (r >= out.residual) break;
            out.energy = theta;
            out.vector = v;
            out.residual = r;
        }
        return out;
    }

    const double tol_scale = [&] {
        double s = 0.0;
        for (int j = 0; j < A.dim; ++j) s = std::max(s, std::abs(A.band(0, j)));
        return std::max(1.0, s);
    }();
    auto budget_left = [&] {
        return static_cast<int>(std::max<long>(cfg.max_matvecs - out.applies, 0));
    };
    Eigen::VectorXd start = deterministic_start(A.dim, seed);
    double sigma;
    if (energy_hint) {
        sigma = *energy_hint - (2.0 + 0.02 * std::abs(*energy_hint));
    } else {
        // Plain Lanczos pre-pass to bracket the smallest eigenvalue.
        auto applyA = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { A.matvec(x, y); };
        const int m = std::min({100, A.dim, std::max(budget_left(), 2)});
        CycleOut pre = lanczos_extreme(applyA, A.dim, m, start, false);
        out.applies += pre.applies;
        const double r = residual_of(pre.ritz, pre.theta);
        out.energy = pre.theta;
        out.vector = pre.ritz;
        out.residual = r;
        if (r <= cfg.eig_tol * std::max(1.0, std::abs(pre.theta))) return out;
        if (budget_left() == 0)
            throw NoConvergence("solve_sector_lowest: iteration budget exhausted", r);
        sigma = pre.theta - 2.0 * r - 1e-8 * tol_scale;
        start = pre.ritz;
    }

    Eigen::MatrixXd fac;
    double backoff = 1.0 + 0.01 * std::abs(sigma);
    int factor_fails = 0;
    const int max_cycles = 200;
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        while (!banded_cholesky(A, sigma, fac)) {
            if (++factor_fails > 8) {
                sigma = std::min(sigma, A.gershgorin_lower() - 1.0);
                if (!banded_cholesky(A, sigma, fac))
                    throw NoConvergence("solve_sector_lowest: shifted matrix never positive definite",
                                        out.residual);
                break;
            }
            sigma -= backoff;
            backoff *= 2.0;
        }
        auto applyInv = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            y = x;
            banded_solve(fac, A.dim, A.bw, y);
        };
        const int m = std::min({cfg.lanczos_block, A.dim, std::max(budget_left(), 2)});
        CycleOut cyc = lanczos_extreme(applyInv, A.dim, m, start, true);
        out.applies += cyc.applies;
        A.matvec(cyc.ritz, tmp);
        const double theta = cyc.ritz.dot(tmp);
        const double r = (tmp - theta * cyc.ritz).norm();
        if (r < out.residual) {
            out.residual = r;
            out.energy = theta;
            out.vector = cyc.ritz;
        }
        if (r <= cfg.eig_tol * std::max(1.0, std::abs(theta))) return out;
        if (budget_left() == 0)
            throw NoConvergence("solve_sector_lowest: iteration budget exhausted", out.residual);
        if (cyc.exhausted && r > cfg.eig_tol * tol_scale) {
            // start vector lived in a deficient invariant subspace; retry fresh
            start = deterministic_start(A.dim, seed + 0x51ed2700 + cycle);
        } else {
            start = cyc.ritz;
        }
        sigma = std::max(sigma, theta - 2.0 * r - 1e-12 * std::max(1.0, std::abs(theta)));
    }
    throw NoConvergence("solve_sector_lowest: cycle budget exhausted", out.residual);
}

struct SectorBands {
    std::array<BandMatrix, 2> band;          // even, odd
    std::array<std::vector<long>, 2> to_full;
    bool parity_pure = true;
};

inline SectorBands split_parity_sectors(const OperatorMatrix& H) {
    SectorBands out;
    std::vector<int> sector_index(H.dim);
    std::array<long, 2> dims = {0, 0};
    for (long i = 0; i < H.dim; ++i) {
        const int p = H.basis.parity_of(i);
        sector_index[i] = static_cast<int>(dims[p]++);
        out.to_full[p].push_back(i);
    }
    std::array<int, 2> bw = {0, 0};
    for (const auto& t : H.entries) {
        const int pr = H.basis.parity_of(t.row), pc = H.basis.parity_of(t.col);
        if (pr != pc) {
            out.parity_pure = false;
            continue;
        }
        bw[pr] = std::max(bw[pr], std::abs(sector_index[t.row] - sector_index[t.col]));
    }
    if (!out.parity_pure) return out;
    for (int p = 0; p < 2; ++p) out.band[p].resize(static_cast<int>(dims[p]), bw[p]);
    for (const auto& t : H.entries) {
        const int p = H.basis.parity_of(t.row);
        int i = sector_index[t.row], j = sector_index[t.col];
        if (i < j) std::swap(i, j);
        out.band[p].at(i, j) += t.value;
    }
    return out;
}

inline BandMatrix full_band(const OperatorMatrix& H) {
    int bw = 0;
    for (const auto& t : H.entries)
        bw = std::max(bw, static_cast<int>(std::abs(t.row - t.col)));
    BandMatrix A;
    A.resize(static_cast<int>(H.dim), bw);
    for (const auto& t : H.entries) {
        long i = t.row, j = t.col;
        if (i < j) std::swap(i, j);
        A.at(static_cast<int>(i), static_cast<int>(j)) += t.value;
    }
    return A;
}

} // namespace detail

struct GroundSolve {
    double energy = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd vector;  // unit norm, full basis
    double residual = std::numeric_limits<double>::quiet_NaN();
    double parity_splitting = std::numeric_limits<double>::quiet_NaN();
    int parity = +1;  // parity sector of the reported state
};

// Ground eigenpair of a symmetric OperatorMatrix.  Works per parity sector
// when the operator preserves parity (this model always does): the lowest two
// states near criticality form a parity doublet, and the even member is
// reported when the splitting falls below cfg.degeneracy_tol.
inline GroundSolve ground_eigenpair(const OperatorMatrix& H, const EDConfig& cfg = {},
                                    std::optional<double> energy_hint = {}) {
    cfg.validate();
    if (H.dim < 2) throw std::invalid_argument("ground_eigenpair: dim must be >= 2");
    GroundSolve gs;
    detail::SectorBands sectors = detail::split_parity_sectors(H);
    if (!sectors.parity_pure) {
        detail::BandMatrix A = detail::full_band(H);
        detail::SectorEig se = detail::solve_sector_lowest(A, cfg, energy_hint, cfg.seed);
        gs.energy = se.energy;
        gs.vector = se.vector;
    } else {
        std::array<detail::SectorEig, 2> eig;
        for (int p = 0; p < 2; ++p) {
            if (sectors.band[p].dim == 0) continue;
            eig[p] = detail::solve_sector_lowest(sectors.band[p], cfg, energy_hint,
                                                 cfg.seed + p);
        }
        int pick = 0;
        if (sectors.band[0].dim == 0) {
            pick = 1;
        } else if (sectors.band[1].dim > 0) {
            gs.parity_splitting = std::abs(eig[0].energy - eig[1].energy);
            if (gs.parity_splitting >= cfg.degeneracy_tol && eig[1].energy < eig[0].energy)
                pick = 1;
        }
        gs.parity = pick == 0 ? +1 : -1;
        gs.energy = eig[pick].energy;
        gs.vector = Eigen::VectorXd::Zero(H.dim);
        const auto& map = sectors.to_full[pick];
        for (size_t i = 0; i < map.size(); ++i) gs.vector[map[i]] = eig[pick].vector[i];
    }
    Eigen::VectorXd hv(H.dim);
    H.matvec(gs.vector, hv);
    gs.residual = (hv - gs.energy * gs.vector).norm();
    return gs;
}

inline EDResult compute_observables(const ModelParams& p, const Eigen::VectorXd& v,
                                    int fock_cutoff) {
    p.validate();
    if (!p.finite_spins())
        throw std::invalid_argument("compute_observables: finite N required");
    const BasisMeta basis{fock_cutoff, p.N};
    if (v.size() != basis.dim())
        throw BasisMismatch("compute_observables: vector length " + std::to_string(v.size()) +
                            " does not match basis dimension " + std::to_string(basis.dim()));
    const int M = fock_cutoff, N = p.N;
    EDResult res;
    res.cutoff_used = M;
    double x2_diag = 0.0, b_mean = 0.0, x2_off = 0.0;
    for (int k = 0; k <= M; ++k) {
        for (int mh = 0; mh <= N; ++mh) {
            const double a = v[basis.index(k, mh)];
            const double vv = a * a;
            res.n_b += k * vv;
            res.jz += (mh - 0.5 * N) * vv;
            x2_diag += (2.0 * k + 1.0) * vv;
            res.parity += ((k + mh) & 1 ? -1.0 : 1.0) * vv;
        }
    }
    for (int k = 0; k < M; ++k) {
        const double bfac = std::sqrt(k + 1.0);
        for (int mh = 0; mh <= N; ++mh)
            b_mean += bfac * v[basis.index(k, mh)] * v[basis.index(k + 1, mh)];
    }
    for (int k = 0; k + 2 <= M; ++k) {
        const double bfac = std::sqrt((k + 1.0) * (k + 2.0));
        for (int mh = 0; mh <= N; ++mh)
            x2_off += bfac * v[basis.index(k, mh)] * v[basis.index(k + 2, mh)];
    }
    res.x_mean = std::sqrt(2.0) * b_mean;
    res.x2_mean = 0.5 * x2_diag + x2_off;
    res.delta_x = std::sqrt(std::max(res.x2_mean - res.x_mean * res.x_mean, 0.0));
    const DressedFrame f = dressed_frame(p);
    res.psi_q = f.s * p.omega * res.n_b / (static_cast<double>(N) * p.Omega);
    res.ground_vector = v;
    return res;
}

// Initial cutoff from the analytic occupation estimate:
// <b^dag b> ~ e^{2 r_n} beta^2 + sinh^2 r_n, with an 8x safety factor.
inline int auto_fock_cutoff(const ModelParams& p) {
    const DressedFrame f = dressed_frame(p);
    if (!(f.s > 0.0)) throw UnstableRegime("auto_fock_cutoff: s <= 0");
    const double r = *f.r_n;
    double occ = std::sinh(r) * std::sinh(r) + 1.0;
    if (classify_phase(p) == PhaseLabel::Superradiant) {
        const double cn2 = *f.chi_n * *f.chi_n;
        const double beta2_per_spin = p.Omega / (4.0 * *f.omega_n) * (cn2 - 1.0 / cn2);
        occ += std::exp(2.0 * r) * beta2_per_spin * p.N;
    }
    return std::max(16, static_cast<int>(std::ceil(8.0 * occ)));
}

// Analytic total-energy estimate used as the eigensolver shift hint:
// N * eg_density + C_n + zero-point shift of the two Bogoliubov modes.
inline double analytic_energy_estimate(const ModelParams& p) {
    const PhaseLabel phase = classify_phase(p);
    const DressedFrame f = dressed_frame(p);
    const ExcitationSpectrum sp =
        phase == PhaseLabel::Superradiant ? superradiant_spectrum(p) : normal_spectrum(p);
    const double Om_eff = sp.Omega_tilde.value_or(p.Omega);
    return p.N * sp.eg_density + *f.C_n +
           0.5 * (sp.omega_minus + sp.omega_plus - Om_eff - *f.omega_n);
}

// Repeats ground solves, growing the cutoff geometrically, until the relative
// change of <b^dag b> drops below cutoff_tol or the ceiling is reached (result
// still returned with converged = false).
inline EDResult converge_cutoff(const ModelParams& p, const EDConfig& cfg = {}) {
    p.validate();
    cfg.validate();
    if (!p.finite_spins())
        throw std::invalid_argument("converge_cutoff: finite N required");
    if (classify_phase(p) == PhaseLabel::Unstable)
        throw UnstableRegime("converge_cutoff: s <= 0, quadratic form unbounded below");
    const int dim_cap = static_cast<int>(cfg.max_dim / (p.N + 1)) - 1;
    const int ceiling = std::min(cfg.max_cutoff, dim_cap);
    if (ceiling < 2)
        throw OverflowRisk("converge_cutoff: max_dim leaves no admissible cutoff");
    int M = cfg.fock_cutoff > 0 ? cfg.fock_cutoff : auto_fock_cutoff(p);
    M = std::clamp(M, 2, ceiling);
    double hint = analytic_energy_estimate(p);
    EDResult current;
    bool have_prev = false;
    double prev_n_b = 0.0;
    for (;;) {
        const OperatorMatrix H = build_hamiltonian(p, M, cfg.max_dim);
        const GroundSolve gs = ground_eigenpair(H, cfg, hint);
        current = compute_observables(p, gs.vector, M);
        current.ground_energy = gs.energy;
        current.parity_splitting = gs.parity_splitting;
        current.residual = gs.residual;
        hint = gs.energy;
        if (have_prev) {
            const double rel = std::abs(current.n_b - prev_n_b) /
                               std::max(std::abs(prev_n_b), 1e-12);
            if (rel <= cfg.cutoff_tol) {
                current.converged = true;
                break;
            }
        }
        if (M >= ceiling) break;  // cutoff ceiling reached unconverged
        prev_n_b = current.n_b;
        have_prev = true;
        M = std::min(ceiling, std::max(M + 1, static_cast<int>(std::ceil(M * cfg.cutoff_growth))));
    }
    return current;
}

} // namespace dicke
