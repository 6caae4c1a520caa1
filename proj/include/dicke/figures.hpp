#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/sweep.hpp"

namespace dicke {

// Level used to locate the normal/superradiant boundary from psi_q (exactly 0
// in the normal phase, so any small positive level finds the boundary to grid
// resolution).  The superradiant/unstable boundary is the s = 0 level set.
inline constexpr double kPsiContourLevel = 1e-6;

struct FigureJob {
    std::string label;  // file-stem suffix; empty for single-dataset figures
    SweepSpec sweep;
};

struct FigurePreset {
    std::string name;
    std::string description;
    std::vector<FigureJob> jobs;
    bool contours = false;  // emit psi_q and s contour polylines (2-D panels)
};

namespace detail {

inline ModelParams preset_params(double alpha, double g0, int n, int N = ModelParams::thermo_limit) {
    ModelParams p;
    p.Omega = 1.0;
    p.omega = 1.0;
    p.omega_c = 1.0;  // enters only through the constant n*omega_c
    p.alpha = alpha;
    p.g0 = g0;
    p.n = n;
    p.N = N;
    return p;
}

inline AxisSpec chi_axis(double start, double stop, int count) {
    return AxisSpec{"chi", start, stop, count, {}};
}

inline SweepSpec analytic_sweep(ModelParams base, AxisSpec axis) {
    SweepSpec s;
    s.base = base;
    s.axes = {std::move(axis)};
    return s;
}

inline EDConfig figure_ed_config(int max_cutoff) {
    EDConfig cfg;
    cfg.max_cutoff = max_cutoff;
    cfg.dense_threshold = 512;  // sector dims beyond this go to the banded solver
    return cfg;
}

inline FigureJob ed_job(const ModelParams& base, const AxisSpec& axis, int N, int max_cutoff) {
    ModelParams p = base;
    p.N = N;
    SweepSpec s;
    s.base = p;
    s.axes = {axis};
    s.backend = SweepBackend::ED;
    s.ed = figure_ed_config(max_cutoff);
    return FigureJob{"N" + std::to_string(N), std::move(s)};
}

inline std::vector<FigurePreset> make_presets() {
    std::vector<FigurePreset> out;
    const std::vector<int> n_list = {4, 10, 40, 100};  // finite-size study sizes

    // fig2: excitation gap and ground-state energy density vs chi
    out.push_back({"fig2a", "gap and energy density vs chi; alpha=0, g0/omega=0.249, one ancilla photon",
                   {{"", analytic_sweep(preset_params(0.0, 0.249, 1), chi_axis(0.0, 0.12, 241))}}});
    out.push_back({"fig2b", "gap and energy density vs chi; alpha=0, g0/omega=0.249, ancilla vacuum",
                   {{"", analytic_sweep(preset_params(0.0, 0.249, 0), chi_axis(0.0, 1.3, 261))}}});
    out.push_back({"fig2c", "gap and energy density vs chi; alpha=2, g0/omega=0.251, one ancilla photon",
                   {{"", analytic_sweep(preset_params(2.0, 0.251, 1), chi_axis(0.03, 0.12, 181))}}});
    out.push_back({"fig2d", "gap and energy density vs chi; alpha=2, g0/omega=0.251, ancilla vacuum",
                   {{"", analytic_sweep(preset_params(2.0, 0.251, 0), chi_axis(0.0, 1.3, 261))}}});

    // fig3: ground-state position variance and dressed coupling vs chi
    out.push_back({"fig3a", "position variance vs chi; alpha=0, g0/omega=0.249 (main n=1, insert n=0)",
                   {{"n1", analytic_sweep(preset_params(0.0, 0.249, 1), chi_axis(0.0, 0.12, 481))},
                    {"n0", analytic_sweep(preset_params(0.0, 0.249, 0), chi_axis(0.8, 1.2, 401))}}});
    out.push_back({"fig3b", "position variance vs chi; alpha=2, g0/omega=0.251 (main n=1, insert n=0)",
                   {{"n1", analytic_sweep(preset_params(2.0, 0.251, 1), chi_axis(0.03, 0.12, 481))},
                    {"n0", analytic_sweep(preset_params(2.0, 0.251, 0), chi_axis(0.8, 1.2, 401))}}});
    out.push_back({"fig3c", "dressed coupling chi_n vs chi; alpha=2, g0/omega=0.251 (main n=1, insert n=0)",
                   {{"n1", analytic_sweep(preset_params(2.0, 0.251, 1), chi_axis(0.045, 0.12, 301))},
                    {"n0", analytic_sweep(preset_params(2.0, 0.251, 0), chi_axis(0.0, 1.2, 241))}}});

    // fig4: psi_q phase diagrams over (chi, g0) with both phase-boundary contours
    auto grid4 = [](double alpha, int n) {
        SweepSpec s;
        s.base = preset_params(alpha, 0.251, n);
        s.axes = {chi_axis(0.03, 0.12, 91), AxisSpec{"g0", 0.24, 0.27, 61, {}}};
        return s;
    };
    out.push_back({"fig4a", "psi_q over (chi, g0); alpha=2, one ancilla photon", {{"", grid4(2.0, 1)}}, true});
    out.push_back({"fig4b", "psi_q over (chi, g0); alpha=0, one ancilla photon", {{"", grid4(0.0, 1)}}, true});
    out.push_back({"fig4c", "psi_q over (chi, g0); alpha=2, ancilla vacuum", {{"", grid4(2.0, 0)}}, true});

    // fig5: finite-N order parameter vs chi for the default N list
    {
        FigurePreset f{"fig5a", "finite-N psi_q vs chi; alpha=2, g0/omega=0.251, one ancilla photon", {}, false};
        const ModelParams base = preset_params(2.0, 0.251, 1);
        const AxisSpec axis = chi_axis(0.046, 0.070, 9);
        for (int N : n_list) f.jobs.push_back(ed_job(base, axis, N, 2048));
        out.push_back(std::move(f));
    }
    {
        FigurePreset f{"fig5b", "finite-N psi_q vs chi; alpha=0, g0/omega=0.249, one ancilla photon", {}, false};
        const ModelParams base = preset_params(0.0, 0.249, 1);
        const AxisSpec axis = chi_axis(0.03, 0.075, 10);
        for (int N : n_list) f.jobs.push_back(ed_job(base, axis, N, 2048));
        out.push_back(std::move(f));
    }
    {
        FigurePreset f{"fig5c", "finite-N psi_q vs chi; alpha=0, g0/omega=0.249, ancilla vacuum", {}, false};
        const ModelParams base = preset_params(0.0, 0.249, 0);
        const AxisSpec axis = chi_axis(0.8, 1.4, 13);
        for (int N : n_list) f.jobs.push_back(ed_job(base, axis, N, 512));
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace detail

inline const std::vector<FigurePreset>& figure_presets() {
    static const std::vector<FigurePreset> presets = detail::make_presets();
    return presets;
}

inline const FigurePreset* find_figure(std::string_view name) {
    for (const FigurePreset& f : figure_presets())
        if (f.name == name) return &f;
    return nullptr;
}

// Runs every job of a preset into out_dir; returns the manifest path.
inline std::filesystem::path run_figure(const FigurePreset& preset,
                                        const std::filesystem::path& out_dir, int threads = 1) {
    std::filesystem::create_directories(out_dir);
    nlohmann::json datasets = nlohmann::json::array();
    for (const FigureJob& job : preset.jobs) {
        SweepSpec spec = job.sweep;
        spec.threads = threads;
        const SweepResult result = run_sweep(spec);
        const std::string stem =
            job.label.empty() ? preset.name : preset.name + "_" + job.label;
        const std::filesystem::path csv = out_dir / (stem + ".csv");
        write_table(result, csv);
        datasets.push_back(
            {{"file", csv.filename().string()}, {"label", job.label}, {"sweep", sweep_manifest(result)}});
        if (preset.contours) {
            const auto np_sp = extract_contour(result, "psi_q", kPsiContourLevel);
            const auto sp_up = extract_contour(result, "s", 0.0);
            const auto& a0 = spec.axes[0].name;
            const auto& a1 = spec.axes[1].name;
            write_contour_csv(np_sp, a0, a1, out_dir / (preset.name + "_contour_np_sp.csv"));
            write_contour_csv(sp_up, a0, a1, out_dir / (preset.name + "_contour_sp_up.csv"));
        }
    }
    nlohmann::json manifest{{"datasets", datasets},
                            {"description", preset.description},
                            {"figure", preset.name},
                            {"tool_version", kToolVersion}};
    if (preset.contours)
        manifest["contours"] = {{"np_sp", {{"field", "psi_q"}, {"level", kPsiContourLevel}}},
                                {"sp_up", {{"field", "s"}, {"level", 0.0}}}};
    const std::filesystem::path mpath = out_dir / (preset.name + "_manifest.json");
    std::ofstream out(mpath, std::ios::binary);
    if (!out) throw IoFailure("run_figure: cannot open " + mpath.string());
    out << manifest.dump(2) << "\n";
    if (!out) throw IoFailure("run_figure: write failed for " + mpath.string());
    return mpath;
}

} // namespace dicke
