#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace dicke::detail {

// Symmetric banded matrix, lower storage: band(d, j) = A(j + d, j) for
// d = 0..bw.  Column-major so the inner d-loops run over contiguous memory.
struct BandMatrix {
    int dim = 0;
    int bw = 0;  // half-bandwidth, max |i - j| over stored entries
    Eigen::MatrixXd band;

    void resize(int n, int halfband) {
        dim = n;
        bw = halfband;
        band = Eigen::MatrixXd::Zero(bw + 1, std::max(n, 1));
    }

    double& at(int i, int j) { return band(i - j, j); }  // requires j <= i <= j + bw

    // y = A x
    void matvec(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.setZero(dim);
        for (int j = 0; j < dim; ++j) {
            const int m = std::min(bw, dim - 1 - j);
            double acc = band(0, j) * x[j];
            for (int d = 1; d <= m; ++d) {
                const double a = band(d, j);
                y[j + d] += a * x[j];
                acc += a * x[j + d];
            }
            y[j] += acc;
        }
    }

    double gershgorin_lower() const {
        double lo = std::numeric_limits<double>::infinity();
        Eigen::VectorXd radius = Eigen::VectorXd::Zero(dim);
        for (int j = 0; j < dim; ++j) {
            const int m = std::min(bw, dim - 1 - j);
            for (int d = 1; d <= m; ++d) {
                const double a = std::abs(band(d, j));
                radius[j] += a;
                radius[j + d] += a;
            }
        }
        for (int j = 0; j < dim; ++j) lo = std::min(lo, band(0, j) - radius[j]);
        return lo;
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
        for (int j = 0; j < dim; ++j) {
            const int m = std::min(bw, dim - 1 - j);
            full(j, j) = band(0, j);
            for (int d = 1; d <= m; ++d) {
                full(j + d, j) = band(d, j);
                full(j, j + d) = band(d, j);
            }
        }
        return full;
    }
};

// Cholesky factorization of (A - sigma I) in band storage.  Returns false when
// the shifted matrix is not (numerically) positive definite, i.e. sigma is at
// or above the smallest eigenvalue.
inline bool banded_cholesky(const BandMatrix& A, double sigma, Eigen::MatrixXd& fac) {
    const int n = A.dim, bw = A.bw;
    fac = A.band;
    double scale = 0.0;
    for (int j = 0; j < n; ++j) {
        fac(0, j) -= sigma;
        scale = std::max(scale, std::abs(fac(0, j)));
    }
    const double floor = std::max(scale, 1.0) * 1e-14;
    for (int j = 0; j < n; ++j) {
        double piv = fac(0, j);
        if (!(piv > floor)) return false;
        piv = std::sqrt(piv);
        fac(0, j) = piv;
        const int m = std::min(bw, n - 1 - j);
        if (m == 0) continue;
        fac.col(j).segment(1, m) /= piv;
        for (int k = 1; k <= m; ++k) {
            const double ljk = fac(k, j);
            if (ljk != 0.0)
                fac.col(j + k).segment(0, m - k + 1).noalias() -=
                    ljk * fac.col(j).segment(k, m - k + 1);
        }
    }
    return true;
}

// In-place solve of L L^T x = b given the factor from banded_cholesky.
inline void banded_solve(const Eigen::MatrixXd& fac, int dim, int bw, Eigen::VectorXd& x) {
    for (int j = 0; j < dim; ++j) {
        x[j] /= fac(0, j);
        const double xj = x[j];
        const int m = std::min(bw, dim - 1 - j);
        for (int d = 1; d <= m; ++d) x[j + d] -= fac(d, j) * xj;
    }
    for (int j = dim - 1; j >= 0; --j) {
        double acc = x[j];
        const int m = std::min(bw, dim - 1 - j);
        for (int d = 1; d <= m; ++d) acc -= fac(d, j) * x[j + d];
        x[j] = acc / fac(0, j);
    }
}

} // namespace dicke::detail
