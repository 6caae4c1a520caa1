#pragma once

#include <random>

#include "dicke/model.hpp"

namespace dicke::testutil {

// Random parameter draw that stays comfortably away from the critical band
// and from the unstable region (s bounded below, chi_n bounded), so every
// derived quantity is well conditioned.
inline ModelParams draw_stable(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        ModelParams p;
        p.Omega = 0.5 + 1.5 * u(rng);
        p.omega = 0.5 + 1.5 * u(rng);
        p.omega_c = u(rng);
        p.alpha = u(rng) < 0.3 ? 0.0 : 3.0 * u(rng);
        p.n = static_cast<int>(3 * u(rng));  // 0, 1, 2
        p.g0 = 0.3 * u(rng) * p.omega;
        p.set_chi(2.0 * u(rng));
        const DressedFrame f = dressed_frame(p);
        if (f.s < 0.05) continue;
        const double cn = f.chi / std::sqrt(f.s);
        if (std::abs(cn - 1.0) < 0.05 || cn > 2.0) continue;
        return p;
    }
}

} // namespace dicke::testutil
