#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dicke/figures.hpp"
#include "dicke/sweep.hpp"

using namespace dicke;

namespace {

ModelParams fig2a_base() {
    ModelParams p;
    p.alpha = 0.0;
    p.g0 = 0.249;
    p.n = 1;
    return p;
}

std::string table_string(const SweepResult& r) {
    std::ostringstream os;
    write_table(r, os);
    return os.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("axis validation") {
    AxisSpec a{"chi", 0.0, 1.0, 5, {}};
    CHECK_NOTHROW(a.validate());
    a.count = 1;
    CHECK_THROWS_AS(a.validate(), InvalidAxis);
    a.count = 5;
    a.stop = -1.0;
    CHECK_THROWS_AS(a.validate(), InvalidAxis);
    AxisSpec bad{"frequency", 0.0, 1.0, 5, {}};
    CHECK_THROWS_AS(bad.validate(), InvalidAxis);
    AxisSpec nax{"N", 0, 0, 0, {4, 10}};
    CHECK_NOTHROW(nax.validate());
    nax.levels = {4};
    CHECK_THROWS_AS(nax.validate(), InvalidAxis);
}

TEST_CASE("run_sweep: records compose solve_point on the grid") {
    SweepSpec spec;
    spec.base = fig2a_base();
    spec.axes = {AxisSpec{"chi", 0.03, 0.1, 2, {}}};
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.records.size() == 2);
    ModelParams p = fig2a_base();
    p.set_chi(0.03);
    const PhasePoint pt = solve_point(p);
    CHECK(res.records[0].c0 == 0.03);
    CHECK(res.records[0].point.phase == pt.phase);
    CHECK(*res.records[0].point.omega_minus == *pt.omega_minus);
    CHECK(*res.records[0].point.eg_density == *pt.eg_density);
    CHECK(res.records[0].status == "ok");
    CHECK(res.records[1].point.phase == PhaseLabel::Superradiant);
}

TEST_CASE("run_sweep: axis errors") {
    SweepSpec spec;
    spec.base = fig2a_base();
    CHECK_THROWS_AS(run_sweep(spec), InvalidAxis);  // no axes
    spec.axes = {AxisSpec{"chi", 0.0, 1.0, 4, {}}, AxisSpec{"g0", 0.2, 0.3, 4, {}},
                 AxisSpec{"lambda", 0.0, 1.0, 4, {}}};
    CHECK_THROWS_AS(run_sweep(spec), InvalidAxis);  // too many
    spec.axes = {AxisSpec{"chi", 0.0, 1.0, 4, {}}};
    spec.backend = SweepBackend::ED;
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);  // thermo-limit N
}

TEST_CASE("run_sweep: grid completeness and row-major order") {
    SweepSpec spec;
    spec.base = fig2a_base();
    spec.axes = {AxisSpec{"chi", 0.03, 0.09, 4, {}}, AxisSpec{"g0", 0.24, 0.25, 3, {}}};
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.records.size() == 12);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) {
            const SweepRecord& r = res.records[i * 3 + j];
            CHECK(r.c0 == doctest::Approx(0.03 + 0.02 * i).epsilon(1e-14));
            CHECK(r.c1 == doctest::Approx(0.24 + 0.005 * j).epsilon(1e-14));
        }
}

TEST_CASE("write_table: header, row count, unstable cells, determinism") {
    SweepSpec spec;
    spec.base = fig2a_base();
    spec.base.alpha = 2.0;
    spec.base.g0 = 0.251;
    spec.axes = {AxisSpec{"chi", 0.04, 0.07, 400, {}}};
    const SweepResult res = run_sweep(spec);
    const std::string text = table_string(res);
    // 400 data rows + header, trailing newline
    CHECK(std::count(text.begin(), text.end(), '\n') == 401);
    CHECK(text.back() == '\n');
    std::istringstream is(text);
    std::string header, first_row;
    std::getline(is, header);
    std::getline(is, first_row);
    CHECK(header ==
          "chi,phase,s,chi_n,omega_minus,omega_plus,eg_density,psi_q,coherence,delta_x,status");
    // chi = 0.04 is unstable: phase label, s, empty observable cells, status
    CHECK(first_row.substr(0, 13) == "0.04,unstable");
    CHECK(first_row.find(",,,,,,,unstable") != std::string::npos);

    // identical bytes across repeat runs and across thread counts
    CHECK(table_string(run_sweep(spec)) == text);
    spec.threads = 2;
    CHECK(table_string(run_sweep(spec)) == text);
}

TEST_CASE("manifest: round-trips and reproduces identical bytes") {
    namespace fs = std::filesystem;
    SweepSpec spec;
    spec.base = fig2a_base();
    spec.axes = {AxisSpec{"chi", 0.01, 0.11, 31, {}}};
    const SweepResult res = run_sweep(spec);
    const fs::path dir = fs::temp_directory_path() / "dicke_sweep_test";
    fs::create_directories(dir);
    write_table(res, dir / "sweep.csv");
    write_manifest(res, dir / "manifest.json");

    nlohmann::json parsed = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(parsed["record_count"] == 31);
    CHECK(parsed["backend"] == "analytic");
    long total = 0;
    for (const auto& kv : parsed["status_counts"].items()) total += kv.value().get<long>();
    CHECK(total == 31);

    const SweepSpec rebuilt = spec_from_manifest(parsed);
    const SweepResult rerun = run_sweep(rebuilt);
    CHECK(table_string(rerun) == table_string(res));
    CHECK(sweep_manifest(rerun).dump(2) == parsed.dump(2));
    fs::remove_all(dir);
}

TEST_CASE("ed backend sweep: summary columns against direct solves") {
    SweepSpec spec;
    spec.base = fig2a_base();
    spec.base.alpha = 2.0;
    spec.base.g0 = 0.251;
    spec.base.N = 2;
    spec.axes = {AxisSpec{"chi", 0.05, 0.065, 3, {}}};
    spec.backend = SweepBackend::ED;
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.records.size() == 3);
    for (const SweepRecord& r : res.records) {
        REQUIRE(r.ed.has_value());
        ModelParams p = spec.base;
        p.set_chi(r.c0);
        const EDResult direct = converge_cutoff(p, spec.ed);
        CHECK(r.ed->psi_q == direct.psi_q);
        CHECK(r.ed->ground_energy == direct.ground_energy);
        CHECK(r.ed->converged == direct.converged);
    }
    const std::string text = table_string(res);
    CHECK(text.find("psi_q_analytic") != std::string::npos);
    CHECK(text.find("ratio_Omega_omega_n") != std::string::npos);
}

TEST_CASE("ed backend sweep: unstable grid points carry status, not failure") {
    SweepSpec spec;
    spec.base = fig2a_base();
    spec.base.alpha = 2.0;
    spec.base.g0 = 0.251;
    spec.base.N = 4;
    spec.axes = {AxisSpec{"chi", 0.04, 0.06, 3, {}}};  // first point unstable
    spec.backend = SweepBackend::ED;
    const SweepResult res = run_sweep(spec);
    CHECK(res.records[0].status == "unstable");
    CHECK_FALSE(res.records[0].ed.has_value());
    CHECK(res.records[2].status == "ok");
}

TEST_CASE("marching squares: circle level set") {
    const int n = 41;
    std::vector<double> xs(n), ys(n);
    Eigen::MatrixXd f(n, n);
    for (int i = 0; i < n; ++i) xs[i] = -1.0 + 2.0 * i / (n - 1);
    for (int j = 0; j < n; ++j) ys[j] = -1.0 + 2.0 * j / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = xs[i] * xs[i] + ys[j] * ys[j];
    const auto lines = marching_squares(f, xs, ys, 0.25);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].front() == lines[0].back());  // closed loop
    for (const auto& pt : lines[0]) {
        const double rad = std::hypot(pt[0], pt[1]);
        CHECK(std::abs(rad - 0.5) < 0.01);
    }
}

TEST_CASE("marching squares: constant field yields no contour") {
    std::vector<double> xs = {0, 1, 2}, ys = {0, 1};
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 2);
    CHECK(marching_squares(f, xs, ys, 0.5).empty());
    CHECK(marching_squares(f, xs, ys, -0.5).empty());
}

TEST_CASE("extract_contour: phase boundaries against the closed forms") {
    // the actual fig4a preset grid
    SweepSpec spec = find_figure("fig4a")->jobs[0].sweep;
    REQUIRE(spec.axes.size() == 2);
    const SweepResult res = run_sweep(spec);
    const double chi_spacing = (spec.axes[0].stop - spec.axes[0].start) / (spec.axes[0].count - 1);
    const double g0_spacing = (spec.axes[1].stop - spec.axes[1].start) / (spec.axes[1].count - 1);
    // "within one grid cell" of the curve chi = chi_c(g0): the boundary is
    // steep in the (chi, g0) plane, so measure against whichever axis the
    // vertex's cell edge runs along
    auto near_curve = [&](const ContourPoint& pt, double coef) {
        const double chi = pt[0], g0 = pt[1];
        const double g0_star = (1.0 + chi * chi / coef) / 4.0;  // inverse of the curve
        double chi_dev = 1e300;
        if (4.0 * g0 > 1.0) chi_dev = std::abs(chi - std::sqrt(coef * (4.0 * g0 - 1.0)));
        return chi_dev <= chi_spacing || std::abs(g0 - g0_star) <= g0_spacing;
    };

    const auto np_sp = extract_contour(res, "psi_q", 1e-6);
    REQUIRE_FALSE(np_sp.empty());
    int vertices = 0;
    for (const auto& line : np_sp)
        for (const auto& pt : line) {
            CHECK(near_curve(pt, 1.0));  // chi_c(g0) = sqrt(4 g0 - 1)
            ++vertices;
        }
    CHECK(vertices > 10);

    const auto sp_up = extract_contour(res, "s", 0.0);
    REQUIRE_FALSE(sp_up.empty());
    for (const auto& line : sp_up)
        for (const auto& pt : line)
            CHECK(near_curve(pt, 0.5));  // stability bound sqrt((4 g0 - 1)/2)

    // no-go panel: alpha = 2 without the photon has no transition at all
    SweepSpec nogo = spec;
    nogo.base.n = 0;
    CHECK(extract_contour(run_sweep(nogo), "psi_q", 1e-6).empty());

    SweepSpec one_d = spec;
    one_d.axes = {AxisSpec{"chi", 0.03, 0.12, 31, {}}};
    CHECK_THROWS_AS(extract_contour(run_sweep(one_d), "psi_q", 1e-6), NotAGrid);
}

TEST_CASE("figure presets: registry and the fig2a dataset") {
    CHECK(figure_presets().size() == 13);
    CHECK(find_figure("fig4b") != nullptr);
    CHECK(find_figure("fig9z") == nullptr);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dicke_fig2a_test";
    fs::remove_all(dir);
    const fs::path manifest = run_figure(*find_figure("fig2a"), dir, 1);
    CHECK(fs::exists(dir / "fig2a.csv"));
    CHECK(fs::exists(manifest));

    // omega_minus column dips to zero at the critical coupling ~0.0632456
    std::ifstream in(dir / "fig2a.csv");
    std::string line;
    std::getline(in, line);  // header
    double best_chi = -1.0, best_gap = 1e300;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string chi_s, phase, s_s, chin_s, wm_s;
        std::getline(row, chi_s, ',');
        std::getline(row, phase, ',');
        std::getline(row, s_s, ',');
        std::getline(row, chin_s, ',');
        std::getline(row, wm_s, ',');
        if (wm_s.empty()) continue;
        const double wm = std::stod(wm_s);
        if (wm < best_gap) {
            best_gap = wm;
            best_chi = std::stod(chi_s);
        }
    }
    CHECK(std::abs(best_chi - 0.06324555320336758) <= 0.12 / 240.0);
    CHECK(best_gap < 0.02);
    fs::remove_all(dir);
}
