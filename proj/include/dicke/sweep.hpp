#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "dicke/contour.hpp"
#include "dicke/ed.hpp"
#include "dicke/errors.hpp"
#include "dicke/thermo.hpp"
#include "dicke/version.hpp"

namespace dicke {

struct AxisSpec {
    std::string name;  // one of chi, g0, lambda, N
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    std::vector<int> levels;  // N axis: explicit integer list instead of start/stop

    bool is_levels() const { return name == "N"; }
    int points() const { return is_levels() ? static_cast<int>(levels.size()) : count; }

    double value(int i) const {
        if (is_levels()) return levels[i];
        return start + (stop - start) * i / (count - 1);
    }

    void validate() const {
        if (name != "chi" && name != "g0" && name != "lambda" && name != "N")
            throw InvalidAxis("axis name must be one of chi, g0, lambda, N: got '" + name + "'");
        if (is_levels()) {
            if (levels.size() < 2) throw InvalidAxis("N axis needs at least 2 levels");
            for (int v : levels)
                if (v < 1) throw InvalidAxis("N axis levels must be positive");
        } else {
            if (count < 2) throw InvalidAxis("axis count must be >= 2");
            if (!(start < stop)) throw InvalidAxis("axis requires start < stop");
        }
    }
};

enum class SweepBackend { Analytic, ED };

inline const char* to_string(SweepBackend b) {
    return b == SweepBackend::Analytic ? "analytic" : "ed";
}

struct EDSummary {
    double ground_energy = 0.0;
    double n_b = 0.0, jz = 0.0, x_mean = 0.0, x2_mean = 0.0, parity = 0.0;
    double psi_q = 0.0, delta_x = 0.0;
    int cutoff_used = 0;
    bool converged = false;
};

struct SweepRecord {
    double c0 = std::numeric_limits<double>::quiet_NaN();  // first-axis coordinate
    double c1 = std::numeric_limits<double>::quiet_NaN();  // second-axis coordinate (2-D only)
    PhasePoint point;                                      // analytic solution at this point
    std::optional<EDSummary> ed;
    std::string status = "ok";  // ok | unstable | error:<kind>
};

struct SweepSpec {
    ModelParams base;
    std::vector<AxisSpec> axes;  // 1 or 2, first axis outermost
    SweepBackend backend = SweepBackend::Analytic;
    EDConfig ed;
    int threads = 1;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRecord> records;  // row-major grid order
};

namespace detail {

inline void apply_axis(ModelParams& p, const std::string& name, double v) {
    if (name == "chi")
        p.set_chi(v);
    else if (name == "g0")
        p.g0 = v;
    else if (name == "lambda")
        p.lambda = v;
    else if (name == "N")
        p.N = static_cast<int>(v);
}

inline SweepRecord evaluate_point(const SweepSpec& spec, const ModelParams& p) {
    SweepRecord rec;
    rec.point = solve_point(p);
    if (rec.point.phase == PhaseLabel::Unstable) {
        rec.status = "unstable";
        return rec;
    }
    if (spec.backend == SweepBackend::ED) {
        try {
            const EDResult r = converge_cutoff(p, spec.ed);
            EDSummary s;
            s.ground_energy = r.ground_energy;
            s.n_b = r.n_b;
            s.jz = r.jz;
            s.x_mean = r.x_mean;
            s.x2_mean = r.x2_mean;
            s.parity = r.parity;
            s.psi_q = r.psi_q;
            s.delta_x = r.delta_x;
            s.cutoff_used = r.cutoff_used;
            s.converged = r.converged;
            rec.ed = s;
        } catch (const UnstableRegime&) {
            rec.status = "unstable";
        } catch (const NoConvergence&) {
            rec.status = "error:no_convergence";
        } catch (const OverflowRisk&) {
            rec.status = "error:overflow_risk";
        } catch (const std::exception&) {
            rec.status = "error:runtime";
        }
    }
    return rec;
}

} // namespace detail

// Evaluates every grid point (first axis outermost).  Points may be evaluated
// concurrently; records are stored in grid order, so output bytes do not
// depend on the thread count.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.base.validate();
    if (spec.axes.empty() || spec.axes.size() > 2)
        throw InvalidAxis("run_sweep needs 1 or 2 axes");
    for (const AxisSpec& a : spec.axes) a.validate();
    if (spec.backend == SweepBackend::ED) {
        spec.ed.validate();
        const bool n_from_axis =
            std::any_of(spec.axes.begin(), spec.axes.end(),
                        [](const AxisSpec& a) { return a.name == "N"; });
        if (!spec.base.finite_spins() && !n_from_axis)
            throw std::invalid_argument("run_sweep: ed backend requires finite N");
    }

    const int n0 = spec.axes[0].points();
    const int n1 = spec.axes.size() == 2 ? spec.axes[1].points() : 1;
    const long total = static_cast<long>(n0) * n1;
    SweepResult result;
    result.spec = spec;
    result.records.resize(total);

    auto work = [&](long idx) {
        const int i = static_cast<int>(idx / n1);
        const int j = static_cast<int>(idx % n1);
        ModelParams p = spec.base;
        detail::apply_axis(p, spec.axes[0].name, spec.axes[0].value(i));
        if (spec.axes.size() == 2) detail::apply_axis(p, spec.axes[1].name, spec.axes[1].value(j));
        SweepRecord rec = detail::evaluate_point(spec, p);
        rec.c0 = spec.axes[0].value(i);
        if (spec.axes.size() == 2) rec.c1 = spec.axes[1].value(j);
        result.records[idx] = std::move(rec);
    };

    const int threads = std::max(1, spec.threads);
    if (threads == 1 || total < 2) {
        for (long idx = 0; idx < total; ++idx) work(idx);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        const int nworkers = std::min<long>(threads, total);
        pool.reserve(nworkers);
        for (int t = 0; t < nworkers; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const long idx = next.fetch_add(1);
                    if (idx >= total) break;
                    work(idx);
                }
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

namespace detail {

inline std::string format_g12(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string cell(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? format_g12(*v) : std::string();
}

inline std::string cell(double v) { return std::isfinite(v) ? format_g12(v) : std::string(); }

} // namespace detail

inline std::vector<std::string> table_columns(const SweepResult& sweep) {
    std::vector<std::string> cols;
    for (const AxisSpec& a : sweep.spec.axes) cols.push_back(a.name);
    cols.insert(cols.end(), {"phase", "s", "chi_n"});
    if (sweep.spec.backend == SweepBackend::Analytic) {
        cols.insert(cols.end(), {"omega_minus", "omega_plus", "eg_density", "psi_q",
                                 "coherence", "delta_x"});
    } else {
        cols.insert(cols.end(),
                    {"ratio_Omega_omega_n", "psi_q_analytic", "ground_energy", "energy_per_spin",
                     "n_b", "jz", "x_mean", "x2_mean", "parity", "psi_q", "delta_x",
                     "cutoff_used", "converged"});
    }
    cols.push_back("status");
    return cols;
}

inline void write_table(const SweepResult& sweep, std::ostream& os) {
    using detail::cell;
    const auto cols = table_columns(sweep);
    for (size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << '\n';
    const bool two_d = sweep.spec.axes.size() == 2;
    for (const SweepRecord& r : sweep.records) {
        std::vector<std::string> row;
        row.push_back(cell(r.c0));
        if (two_d) row.push_back(cell(r.c1));
        row.push_back(to_string(r.point.phase));
        row.push_back(cell(r.point.s));
        row.push_back(cell(r.point.chi_n));
        if (sweep.spec.backend == SweepBackend::Analytic) {
            row.push_back(cell(r.point.omega_minus));
            row.push_back(cell(r.point.omega_plus));
            row.push_back(cell(r.point.eg_density));
            row.push_back(cell(r.point.psi_q));
            row.push_back(cell(r.point.coherence));
            row.push_back(cell(r.point.delta_x));
        } else {
            // analytic comparison columns, then the ED block
            const ModelParams& base = sweep.spec.base;
            row.push_back(r.point.s > 0.0
                              ? cell(base.Omega / (base.omega * std::sqrt(r.point.s)))
                              : std::string());
            row.push_back(cell(r.point.psi_q));
            if (r.ed) {
                const EDSummary& e = *r.ed;
                int n_spins = base.N;
                for (size_t k = 0; k < sweep.spec.axes.size(); ++k)
                    if (sweep.spec.axes[k].name == "N")
                        n_spins = static_cast<int>(k == 0 ? r.c0 : r.c1);
                row.push_back(cell(e.ground_energy));
                row.push_back(cell(e.ground_energy / n_spins));
                row.push_back(cell(e.n_b));
                row.push_back(cell(e.jz));
                row.push_back(cell(e.x_mean));
                row.push_back(cell(e.x2_mean));
                row.push_back(cell(e.parity));
                row.push_back(cell(e.psi_q));
                row.push_back(cell(e.delta_x));
                row.push_back(std::to_string(e.cutoff_used));
                row.push_back(e.converged ? "1" : "0");
            } else {
                for (int k = 0; k < 11; ++k) row.emplace_back();
            }
        }
        row.push_back(r.status);
        for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << '\n';
    }
}

inline size_t write_table(const SweepResult& sweep, const std::filesystem::path& path) {
    if (sweep.records.empty()) throw IoFailure("write_table: no records");
    std::ostringstream buf;
    write_table(sweep, buf);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("write_table: cannot open " + path.string());
    const std::string text = buf.str();
    out << text;
    if (!out) throw IoFailure("write_table: write failed for " + path.string());
    return text.size();
}

inline nlohmann::json params_to_json(const ModelParams& p) {
    return {{"Omega", p.Omega}, {"omega", p.omega},   {"omega_c", p.omega_c},
            {"lambda", p.lambda}, {"alpha", p.alpha}, {"g0", p.g0},
            {"n", p.n},           {"N", p.N}};
}

inline ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.Omega = j.at("Omega");
    p.omega = j.at("omega");
    p.omega_c = j.at("omega_c");
    p.lambda = j.at("lambda");
    p.alpha = j.at("alpha");
    p.g0 = j.at("g0");
    p.n = j.at("n");
    p.N = j.at("N");
    return p;
}

inline nlohmann::json ed_config_to_json(const EDConfig& c) {
    return {{"fock_cutoff", c.fock_cutoff},
            {"cutoff_growth", c.cutoff_growth},
            {"cutoff_tol", c.cutoff_tol},
            {"max_cutoff", c.max_cutoff},
            {"eig_tol", c.eig_tol},
            {"max_dim", c.max_dim},
            {"dense_threshold", c.dense_threshold},
            {"degeneracy_tol", c.degeneracy_tol},
            {"seed", c.seed}};
}

inline EDConfig ed_config_from_json(const nlohmann::json& j) {
    EDConfig c;
    c.fock_cutoff = j.at("fock_cutoff");
    c.cutoff_growth = j.at("cutoff_growth");
    c.cutoff_tol = j.at("cutoff_tol");
    c.max_cutoff = j.at("max_cutoff");
    c.eig_tol = j.at("eig_tol");
    c.max_dim = j.at("max_dim");
    c.dense_threshold = j.at("dense_threshold");
    c.degeneracy_tol = j.at("degeneracy_tol");
    c.seed = j.at("seed");
    return c;
}

inline nlohmann::json sweep_manifest(const SweepResult& sweep) {
    nlohmann::json axes = nlohmann::json::array();
    for (const AxisSpec& a : sweep.spec.axes) {
        if (a.is_levels())
            axes.push_back({{"name", a.name}, {"levels", a.levels}});
        else
            axes.push_back(
                {{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"count", a.count}});
    }
    std::map<std::string, long> counts;
    for (const SweepRecord& r : sweep.records) ++counts[r.status];
    nlohmann::json j{{"axes", axes},
                     {"backend", to_string(sweep.spec.backend)},
                     {"base", params_to_json(sweep.spec.base)},
                     {"record_count", sweep.records.size()},
                     {"status_counts", counts},
                     {"tool_version", kToolVersion}};
    if (sweep.spec.backend == SweepBackend::ED) j["ed_config"] = ed_config_to_json(sweep.spec.ed);
    return j;
}

// Rebuilds a runnable sweep request from a manifest (the round-trip guarantee:
// re-running it reproduces the table byte for byte).
inline SweepSpec spec_from_manifest(const nlohmann::json& j) {
    SweepSpec spec;
    spec.base = params_from_json(j.at("base"));
    for (const auto& ja : j.at("axes")) {
        AxisSpec a;
        a.name = ja.at("name");
        if (ja.contains("levels"))
            a.levels = ja.at("levels").get<std::vector<int>>();
        else {
            a.start = ja.at("start");
            a.stop = ja.at("stop");
            a.count = ja.at("count");
        }
        spec.axes.push_back(std::move(a));
    }
    spec.backend =
        j.at("backend") == "ed" ? SweepBackend::ED : SweepBackend::Analytic;
    if (j.contains("ed_config")) spec.ed = ed_config_from_json(j.at("ed_config"));
    return spec;
}

inline size_t write_manifest(const SweepResult& sweep, const std::filesystem::path& path) {
    if (sweep.records.empty()) throw IoFailure("write_manifest: no records");
    const std::string text = sweep_manifest(sweep).dump(2) + "\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("write_manifest: cannot open " + path.string());
    out << text;
    if (!out) throw IoFailure("write_manifest: write failed for " + path.string());
    return text.size();
}

namespace detail {

inline double record_field(const SweepRecord& r, std::string_view field) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto opt = [&](const std::optional<double>& v) { return v ? *v : nan; };
    if (field == "s") return r.point.s;
    if (field == "chi_n") return opt(r.point.chi_n);
    if (field == "omega_minus") return opt(r.point.omega_minus);
    if (field == "omega_plus") return opt(r.point.omega_plus);
    if (field == "eg_density") return opt(r.point.eg_density);
    if (field == "coherence") return opt(r.point.coherence);
    if (field == "delta_x")
        return r.ed ? r.ed->delta_x : opt(r.point.delta_x);
    if (field == "psi_q") return r.ed ? r.ed->psi_q : opt(r.point.psi_q);
    throw std::invalid_argument("unknown contour field '" + std::string(field) + "'");
}

} // namespace detail

// Marching-squares level set of one record column over a full 2-D grid,
// returned as ordered polylines in axis coordinates.
inline std::vector<Polyline> extract_contour(const SweepResult& sweep, std::string_view field,
                                             double level) {
    if (sweep.spec.axes.size() != 2) throw NotAGrid("extract_contour: needs a 2-D sweep");
    const int n0 = sweep.spec.axes[0].points();
    const int n1 = sweep.spec.axes[1].points();
    if (static_cast<long>(sweep.records.size()) != static_cast<long>(n0) * n1)
        throw NotAGrid("extract_contour: record count does not match the grid");
    Eigen::MatrixXd f(n0, n1);
    std::vector<double> xs(n0), ys(n1);
    for (int i = 0; i < n0; ++i) xs[i] = sweep.spec.axes[0].value(i);
    for (int j = 0; j < n1; ++j) ys[j] = sweep.spec.axes[1].value(j);
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            f(i, j) = detail::record_field(sweep.records[static_cast<long>(i) * n1 + j], field);
    return marching_squares(f, xs, ys, level);
}

inline size_t write_contour_csv(const std::vector<Polyline>& lines, const std::string& axis0,
                                const std::string& axis1, const std::filesystem::path& path) {
    std::ostringstream buf;
    buf << "polyline," << axis0 << ',' << axis1 << '\n';
    for (size_t id = 0; id < lines.size(); ++id)
        for (const ContourPoint& pt : lines[id])
            buf << id << ',' << detail::format_g12(pt[0]) << ',' << detail::format_g12(pt[1])
                << '\n';
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("write_contour_csv: cannot open " + path.string());
    const std::string text = buf.str();
    out << text;
    if (!out) throw IoFailure("write_contour_csv: write failed for " + path.string());
    return text.size();
}

} // namespace dicke
