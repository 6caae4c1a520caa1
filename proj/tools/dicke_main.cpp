// Command-line front end: single-point solutions, parameter sweeps, finite-N
// diagonalization studies, and the preset figure datasets.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dicke/figures.hpp"
#include "dicke/sweep.hpp"
#include "dicke/version.hpp"

namespace {

struct ParamFlags {
    dicke::ModelParams params;
    std::optional<double> chi;
    std::optional<double> lambda;

    dicke::ModelParams resolve() const {
        dicke::ModelParams p = params;
        if (lambda) p.lambda = *lambda;
        if (chi) p.set_chi(*chi);
        return p;
    }
};

void add_param_flags(CLI::App* cmd, ParamFlags& f, bool with_N) {
    cmd->add_option("--Omega", f.params.Omega, "two-level transition frequency");
    cmd->add_option("--omega", f.params.omega, "field mode frequency");
    cmd->add_option("--omega-c", f.params.omega_c, "ancilla mode frequency");
    auto* lam = cmd->add_option("--lambda", f.lambda, "collective coupling strength");
    auto* chi = cmd->add_option("--chi", f.chi, "rescaled coupling 2*lambda/sqrt(Omega*omega)");
    lam->excludes(chi);
    chi->excludes(lam);
    cmd->add_option("--alpha", f.params.alpha, "A^2-term coefficient");
    cmd->add_option("--g0", f.params.g0, "quadratic ancilla-field coupling");
    cmd->add_option("--n", f.params.n, "ancilla Fock occupation");
    if (with_N) cmd->add_option("--N", f.params.N, "number of two-level systems (0 = thermodynamic limit)");
}

void add_ed_flags(CLI::App* cmd, dicke::EDConfig& cfg) {
    cmd->add_option("--fock-cutoff", cfg.fock_cutoff, "initial boson cutoff (0 = auto)");
    cmd->add_option("--cutoff-growth", cfg.cutoff_growth, "cutoff growth factor");
    cmd->add_option("--cutoff-tol", cfg.cutoff_tol, "relative <b^dag b> convergence tolerance");
    cmd->add_option("--max-cutoff", cfg.max_cutoff, "cutoff ceiling");
    cmd->add_option("--eig-tol", cfg.eig_tol, "eigenpair residual tolerance");
    cmd->add_option("--dense-threshold", cfg.dense_threshold, "dense/iterative sector-dimension switch");
    cmd->add_option("--max-dim", cfg.max_dim, "basis dimension guard");
    cmd->add_option("--seed", cfg.seed, "eigensolver start-vector seed");
}

dicke::AxisSpec parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw dicke::InvalidAxis("axis must look like chi=start:stop:count or N=4,10,40");
    dicke::AxisSpec axis;
    axis.name = text.substr(0, eq);
    const std::string body = text.substr(eq + 1);
    try {
        if (axis.name == "N") {
            size_t pos = 0;
            while (pos < body.size()) {
                const auto comma = body.find(',', pos);
                const std::string tok = body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                    : comma - pos);
                axis.levels.push_back(std::stoi(tok));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        } else {
            const auto c1 = body.find(':');
            const auto c2 = body.find(':', c1 == std::string::npos ? c1 : c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw dicke::InvalidAxis("axis must look like name=start:stop:count");
            axis.start = std::stod(body.substr(0, c1));
            axis.stop = std::stod(body.substr(c1 + 1, c2 - c1 - 1));
            axis.count = std::stoi(body.substr(c2 + 1));
        }
    } catch (const dicke::InvalidAxis&) {
        throw;
    } catch (const std::exception&) {
        throw dicke::InvalidAxis("cannot parse axis '" + text + "'");
    }
    axis.validate();
    return axis;
}

nlohmann::json point_json(const dicke::ModelParams& p, const dicke::PhasePoint& pt) {
    nlohmann::json j = dicke::params_to_json(p);
    j["chi"] = pt.chi;
    j["s"] = pt.s;
    j["phase"] = dicke::to_string(pt.phase);
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("chi_n", pt.chi_n);
    put("omega_minus", pt.omega_minus);
    put("omega_plus", pt.omega_plus);
    put("eg_density", pt.eg_density);
    put("psi_q", pt.psi_q);
    put("coherence", pt.coherence);
    put("delta_x", pt.delta_x);
    return j;
}

int run_point(const ParamFlags& flags) {
    const dicke::ModelParams p = flags.resolve();
    const dicke::PhasePoint pt = dicke::solve_point(p);
    std::cout << point_json(p, pt).dump() << "\n";
    return 0;
}

int run_sweep_cmd(const ParamFlags& flags, const std::vector<std::string>& axis_args,
                  const std::string& backend, const dicke::EDConfig& ed, int threads,
                  const std::string& out_dir) {
    dicke::SweepSpec spec;
    spec.base = flags.resolve();
    for (const auto& a : axis_args) spec.axes.push_back(parse_axis(a));
    if (backend == "ed")
        spec.backend = dicke::SweepBackend::ED;
    else if (backend != "analytic")
        throw dicke::InvalidAxis("backend must be 'analytic' or 'ed'");
    spec.ed = ed;
    spec.threads = threads;
    const dicke::SweepResult result = dicke::run_sweep(spec);
    std::filesystem::create_directories(out_dir);
    dicke::write_table(result, std::filesystem::path(out_dir) / "sweep.csv");
    const auto mpath = std::filesystem::path(out_dir) / "manifest.json";
    dicke::write_manifest(result, mpath);
    std::cout << mpath.string() << "\n";
    return 0;
}

int run_ed_cmd(const ParamFlags& flags, const std::vector<int>& n_values,
               const std::string& axis_arg, const dicke::EDConfig& ed, int threads,
               const std::string& out_dir) {
    const dicke::AxisSpec axis = parse_axis(axis_arg);
    std::filesystem::create_directories(out_dir);
    nlohmann::json runs = nlohmann::json::array();
    for (int N : n_values) {
        if (N < 1) throw dicke::InvalidAxis("--N must be positive");
        dicke::SweepSpec spec;
        spec.base = flags.resolve();
        spec.base.N = N;
        spec.axes = {axis};
        spec.backend = dicke::SweepBackend::ED;
        spec.ed = ed;
        spec.threads = threads;
        const dicke::SweepResult result = dicke::run_sweep(spec);
        const std::string file = "ed_N" + std::to_string(N) + ".csv";
        dicke::write_table(result, std::filesystem::path(out_dir) / file);
        long converged = 0;
        for (const auto& r : result.records)
            if (r.ed && r.ed->converged) ++converged;
        nlohmann::json entry{{"N", N}, {"file", file}, {"converged_count", converged}};
        entry["sweep"] = dicke::sweep_manifest(result);
        runs.push_back(std::move(entry));
    }
    nlohmann::json manifest{{"runs", runs}, {"tool_version", dicke::kToolVersion}};
    const auto mpath = std::filesystem::path(out_dir) / "manifest.json";
    std::ofstream out(mpath, std::ios::binary);
    if (!out) throw dicke::IoFailure("cannot open " + mpath.string());
    out << manifest.dump(2) << "\n";
    std::cout << mpath.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid Dicke-optomechanical phase-transition engine"};
    app.set_version_flag("--version", std::string("dicke ") + dicke::kToolVersion);
    app.require_subcommand(1);

    ParamFlags point_flags, sweep_flags, ed_flags_params;
    dicke::EDConfig sweep_ed, ed_ed;
    std::vector<std::string> sweep_axes;
    std::string sweep_backend = "analytic", sweep_out = "out", ed_out = "out", ed_axis;
    std::vector<int> ed_N;
    int sweep_threads = 1, ed_threads = 1, fig_threads = 1;
    std::string figure_name, figure_out = "out";

    CLI::App* point = app.add_subcommand("point", "solve one parameter point, JSON on stdout");
    add_param_flags(point, point_flags, true);
    point->get_option("--Omega")->required();
    point->get_option("--omega")->required();
    point->get_option("--alpha")->required();
    point->get_option("--g0")->required();
    point->get_option("--n")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "grid sweep to sweep.csv + manifest.json");
    add_param_flags(sweep, sweep_flags, true);
    sweep->add_option("--axis", sweep_axes, "axis spec name=start:stop:count (repeatable, max 2)")
        ->required();
    sweep->add_option("--backend", sweep_backend, "analytic or ed");
    sweep->add_option("--threads", sweep_threads, "worker threads");
    sweep->add_option("--out", sweep_out, "output directory")->required();
    add_ed_flags(sweep, sweep_ed);

    CLI::App* ed = app.add_subcommand("ed", "finite-N study, one CSV per N");
    add_param_flags(ed, ed_flags_params, false);
    ed->add_option("--N", ed_N, "spin count (repeatable)")->required();
    ed->add_option("--axis", ed_axis, "axis spec name=start:stop:count")->required();
    ed->add_option("--threads", ed_threads, "worker threads");
    ed->add_option("--out", ed_out, "output directory")->required();
    add_ed_flags(ed, ed_ed);

    CLI::App* figure = app.add_subcommand("figure", "emit a preset figure dataset");
    figure->add_option("name", figure_name, "figure name (fig2a..fig5c)")->required();
    figure->add_option("--out", figure_out, "output directory")->required();
    figure->add_option("--threads", fig_threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (point->parsed()) {
            if (!point_flags.chi && !point_flags.lambda) {
                std::cerr << "point: one of --chi or --lambda is required\n";
                return 2;
            }
            return run_point(point_flags);
        }
        if (sweep->parsed())
            return run_sweep_cmd(sweep_flags, sweep_axes, sweep_backend, sweep_ed, sweep_threads,
                                 sweep_out);
        if (ed->parsed())
            return run_ed_cmd(ed_flags_params, ed_N, ed_axis, ed_ed, ed_threads, ed_out);
        if (figure->parsed()) {
            const dicke::FigurePreset* preset = dicke::find_figure(figure_name);
            if (!preset) {
                std::cerr << "figure: unknown name '" << figure_name << "'\n";
                return 2;
            }
            std::cout << dicke::run_figure(*preset, figure_out, fig_threads).string() << "\n";
            return 0;
        }
    } catch (const dicke::InvalidAxis& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
