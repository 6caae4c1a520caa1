#include <doctest.h>

#include <cmath>
#include <random>

#include "dicke/model.hpp"
#include "test_util.hpp"

using namespace dicke;

namespace {

ModelParams fig2a_config(double chi) {  // alpha = 0, g0/omega = 0.249, n = 1
    ModelParams p;
    p.alpha = 0.0;
    p.g0 = 0.249;
    p.n = 1;
    p.set_chi(chi);
    return p;
}

ModelParams fig2c_config(double chi) {  // alpha = 2, g0/omega = 0.251, n = 1
    ModelParams p;
    p.alpha = 2.0;
    p.g0 = 0.251;
    p.n = 1;
    p.set_chi(chi);
    return p;
}

} // namespace

TEST_CASE("dressed frame: single-photon squeeze at g0/omega = 0.249") {
    const DressedFrame f = dressed_frame(fig2a_config(0.03));
    CHECK(f.s == doctest::Approx(0.004).epsilon(1e-12));
    CHECK(std::sqrt(f.s) == doctest::Approx(0.06324555320336758).epsilon(1e-12));
    CHECK(*f.r_n == doctest::Approx(1.3803652294655615).epsilon(1e-12));  // -ln(0.004)/4
    CHECK(*f.omega_n == doctest::Approx(0.06324555320336758).epsilon(1e-12));
    // identities: e^{-2 r_n} = sqrt(s), chi_n = chi / sqrt(s)
    CHECK(std::exp(-2.0 * *f.r_n) == doctest::Approx(std::sqrt(f.s)).epsilon(1e-14));
    CHECK(*f.chi_n == doctest::Approx(f.chi / std::sqrt(f.s)).epsilon(1e-14));
}

TEST_CASE("dressed frame: n = 0, alpha = 0 recovers the bare model") {
    ModelParams p;
    p.set_chi(0.7);
    const DressedFrame f = dressed_frame(p);
    CHECK(f.s == 1.0);
    CHECK(*f.r_n == 0.0);
    CHECK(*f.omega_n == p.omega);
    CHECK(*f.chi_n == doctest::Approx(f.chi).epsilon(1e-15));
    CHECK(*f.lambda_n == p.lambda);
    CHECK(*f.C_n == 0.0);
}

TEST_CASE("dressed frame: alpha = 2, g0/omega = 0.251 at chi = 0.1") {
    const DressedFrame f = dressed_frame(fig2c_config(0.1));
    CHECK(f.s == doctest::Approx(0.016).epsilon(1e-12));
    CHECK(*f.omega_n == doctest::Approx(0.12649110640673517).epsilon(1e-12));
    CHECK(*f.chi_n == doctest::Approx(0.7905694150420949).epsilon(1e-12));
}

TEST_CASE("dressed frame: squeeze-dependent fields absent for s <= 0") {
    ModelParams p = fig2c_config(0.04);  // s = 0.0032 - 0.004 < 0
    DressedFrame f = dressed_frame(p);
    CHECK(f.s < 0.0);
    CHECK_FALSE(f.r_n.has_value());
    CHECK_FALSE(f.omega_n.has_value());
    CHECK_FALSE(f.lambda_n.has_value());
    CHECK_FALSE(f.chi_n.has_value());
    CHECK_FALSE(f.C_n.has_value());

    p = fig2a_config(0.1);
    p.g0 = 0.25;  // s = 0 exactly
    f = dressed_frame(p);
    CHECK(f.s == 0.0);
    CHECK(*f.omega_n == 0.0);
    CHECK_FALSE(f.r_n.has_value());
}

TEST_CASE("dressed frame: round-trip identities on random draws") {
    std::mt19937 rng(7001);
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p = testutil::draw_stable(rng);
        const DressedFrame f = dressed_frame(p);
        CHECK(*f.omega_n * std::exp(2.0 * *f.r_n) == doctest::Approx(p.omega).epsilon(1e-12));
        CHECK(*f.lambda_n * std::exp(-*f.r_n) == doctest::Approx(p.lambda).epsilon(1e-12));
        // chi_n agrees with its defining form 2 lambda_n / sqrt(Omega omega_n)
        CHECK(*f.chi_n ==
              doctest::Approx(2.0 * *f.lambda_n / std::sqrt(p.Omega * *f.omega_n)).epsilon(1e-12));
    }
}

TEST_CASE("classify_phase: reversed window at alpha = 2, g0/omega = 0.251") {
    CHECK(classify_phase(fig2c_config(0.05)) == PhaseLabel::Superradiant);
    CHECK(classify_phase(fig2c_config(0.1)) == PhaseLabel::Normal);
    CHECK(classify_phase(fig2c_config(0.04)) == PhaseLabel::Unstable);
}

TEST_CASE("classify_phase: bare critical point at chi = 1") {
    ModelParams p;
    p.set_chi(1.0);
    CHECK(classify_phase(p) == PhaseLabel::Critical);
}

TEST_CASE("classify_phase: superradiant iff chi_n > 1 on random draws") {
    std::mt19937 rng(7002);
    for (int i = 0; i < 10000; ++i) {
        const ModelParams p = testutil::draw_stable(rng);
        const DressedFrame f = dressed_frame(p);
        const double cn = f.chi / std::sqrt(f.s);
        const PhaseLabel phase = classify_phase(p);
        if (cn > 1.0)
            CHECK(phase == PhaseLabel::Superradiant);
        else
            CHECK(phase == PhaseLabel::Normal);
    }
}

TEST_CASE("critical_couplings: photon-shifted roots and the no-go branch") {
    ModelParams p;
    p.g0 = 0.249;
    p.n = 1;
    CriticalityReport rep = critical_couplings(p);
    REQUIRE(rep.exists);
    CHECK(*rep.chi_c == doctest::Approx(0.06324555320336758).epsilon(1e-12));

    p.alpha = 2.0;
    p.g0 = 0.251;
    rep = critical_couplings(p);
    REQUIRE(rep.exists);
    CHECK(*rep.chi_c == doctest::Approx(0.06324555320336758).epsilon(1e-9));

    p.n = 0;  // alpha = 2, no photon: forbidden
    rep = critical_couplings(p);
    CHECK_FALSE(rep.exists);

    p.alpha = 0.0;  // bare critical point
    rep = critical_couplings(p);
    REQUIRE(rep.exists);
    CHECK(*rep.chi_c == 1.0);
}

TEST_CASE("critical_couplings: root satisfies its defining equation and classifies critical") {
    std::mt19937 rng(7003);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int found = 0;
    for (int i = 0; i < 4000; ++i) {
        ModelParams p;
        p.omega = 0.5 + 1.5 * u(rng);
        p.Omega = 0.5 + 1.5 * u(rng);
        p.alpha = u(rng) < 0.5 ? 2.5 * u(rng) : 0.0;
        p.n = static_cast<int>(3 * u(rng));
        p.g0 = 0.4 * u(rng) * p.omega;
        const CriticalityReport rep = critical_couplings(p);
        if (!rep.exists) continue;
        ++found;
        const double lhs = *rep.chi_c * *rep.chi_c * (1.0 - p.alpha);
        const double rhs = 1.0 - 4.0 * p.n * p.g0 / p.omega;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1.0));
        p.set_chi(*rep.chi_c);
        CHECK(classify_phase(p, 1e-9) == PhaseLabel::Critical);
    }
    CHECK(found > 500);
}

TEST_CASE("critical_couplings: degenerate alpha = 1, g0 = omega/(4n)") {
    ModelParams p;
    p.alpha = 1.0;
    p.n = 1;
    p.g0 = 0.25;
    const CriticalityReport rep = critical_couplings(p);
    CHECK(rep.degenerate);
    CHECK_FALSE(rep.exists);
}

TEST_CASE("stability_bounds") {
    ModelParams p;
    p.alpha = 2.0;
    p.g0 = 0.251;
    p.n = 1;
    StabilityBounds b = stability_bounds(p);
    CHECK_FALSE(b.all_stable);
    CHECK_FALSE(b.none_stable);
    REQUIRE(b.chi_min.has_value());
    CHECK(*b.chi_min == doctest::Approx(0.044721359549995794).epsilon(1e-12));  // sqrt(0.002)

    p.alpha = 0.0;
    p.g0 = 0.249;
    b = stability_bounds(p);
    CHECK(b.all_stable);

    p.g0 = 0.3;  // g0 > omega/4 kills every chi at alpha = 0
    b = stability_bounds(p);
    CHECK(b.none_stable);

    p.n = 0;
    p.g0 = 5.0;
    b = stability_bounds(p);
    CHECK(b.all_stable);
}

TEST_CASE("chi_n decreases with chi in the reversed configuration") {
    // alpha > 1, n = 1, g0 > omega/4: the mechanism behind the reversed transition
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i) {
        const double chi = 0.045 + (0.4 - 0.045) * i / 200.0;
        const DressedFrame f = dressed_frame(fig2c_config(chi));
        REQUIRE(f.s > 0.0);
        CHECK(*f.chi_n < prev);
        prev = *f.chi_n;
    }
}

TEST_CASE("ModelParams validation") {
    ModelParams p;
    p.Omega = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.lambda = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.n = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.set_chi(0.4);
    CHECK_NOTHROW(p.validate());
    CHECK(p.chi() == doctest::Approx(0.4).epsilon(1e-15));
}
