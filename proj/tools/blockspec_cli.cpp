// blockspec: limiting spectra of Gaussian block random matrices.
//
// Subcommands:
//   solve     solve the matrix fixed-point equation on a grid and emit the
//             density curve (Stieltjes inversion)
//   moments   limiting (and optionally exact finite-n) spectral moments
//   simulate  finite-N Monte Carlo eigenvalue histograms
//   compare   L1/sup/moment comparison of a density curve and a histogram
//
// Exit codes: 0 ok, 1 bad arguments, 2 model validation failure,
// 3 solver non-convergence (partial CSV plus a .failures.json sidecar).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockspec/density.hpp"
#include "blockspec/eta.hpp"
#include "blockspec/mcsim.hpp"
#include "blockspec/oracle.hpp"
#include "blockspec/presets.hpp"
#include "blockspec/solver.hpp"
#include "blockspec/spec_io.hpp"
#include "blockspec/wishart.hpp"

namespace {

using namespace blockspec;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct ModelArgs {
    std::string spec_file;
    std::string preset_name;

    AnySpec load() const {
        if (spec_file.empty() == preset_name.empty())
            throw ValidationError("give exactly one of --spec or --preset");
        return spec_file.empty() ? preset(preset_name) : load_spec_file(spec_file);
    }
};

void add_model_args(CLI::App* cmd, ModelArgs& args) {
    cmd->add_option("--spec", args.spec_file, "JSON model description");
    cmd->add_option("--preset", args.preset_name, preset_help());
}

double eta_bound_of(const AnySpec& any) {
    if (any.is_wishart()) {
        const ModelSpec emb = build_wishart_embedding(*any.wishart);
        return eta_for(emb).norm_bound();
    }
    return eta_for(*any.model).norm_bound();
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> xs(points);
    for (int t = 0; t < points; ++t)
        xs[t] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(t) / (points - 1);
    return xs;
}

struct SolveOutcome {
    DensityCurve curve;
    std::vector<GridFailure> failures;
};

SolveOutcome solve_curve(const AnySpec& any, const std::vector<double>& xs, double eps,
                         int threads) {
    SolverOptions opts;
    opts.threads = threads;
    SolveOutcome out;
    std::vector<std::pair<double, Complex>> samples;
    if (any.is_wishart()) {
        auto grid = solve_wishart_grid(*any.wishart, xs, eps, opts);
        for (const auto& p : grid.points)
            samples.emplace_back(p.z.real(), recover_GHH(p));
        out.failures = std::move(grid.failures);
    } else {
        auto grid = solve_grid(*any.model, xs, eps, opts);
        for (const auto& p : grid.points)
            samples.emplace_back(p.z.real(), trace_G(p, any.model->dims));
        out.failures = std::move(grid.failures);
    }
    out.curve = stieltjes_invert(samples, eps);
    return out;
}

void write_gnuplot(const std::string& path, const std::string& csv) {
    std::ofstream gp(path);
    gp << "set datafile separator ','\n"
       << "set xlabel 'x'\n"
       << "set ylabel 'density'\n"
       << "set key off\n"
       << "plot '" << csv << "' every ::1 using 1:2 with lines lw 2\n";
}

int cmd_solve(const ModelArgs& margs, double xmin, double xmax, int points, double eps,
              bool richardson, const std::string& out_csv, const std::string& report_path,
              const std::string& gnuplot_path, int threads) {
    const AnySpec any = margs.load();
    const bool wishart = any.is_wishart();
    const auto bracket = support_bracket(eta_bound_of(any), wishart);
    double lo = std::isnan(xmin) ? bracket.first : xmin;
    double hi = std::isnan(xmax) ? bracket.second : xmax;
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    const auto xs = uniform_grid(lo, hi, points);

    SolveOutcome result;
    if (richardson) {
        const auto h1 = solve_curve(any, xs, eps, threads);
        const auto h2 = solve_curve(any, xs, 2.0 * eps, threads);
        const auto h4 = solve_curve(any, xs, 4.0 * eps, threads);
        if (!h1.failures.empty() || !h2.failures.empty() || !h4.failures.empty()) {
            result = h1;
            for (const auto& f : h2.failures) result.failures.push_back(f);
            for (const auto& f : h4.failures) result.failures.push_back(f);
        } else {
            result.curve = richardson_extrapolate(h1.curve, h2.curve, h4.curve);
        }
    } else {
        result = solve_curve(any, xs, eps, threads);
    }

    {
        std::ofstream os(out_csv);
        if (!os) throw ValidationError("cannot write " + out_csv);
        write_density_csv(os, result.curve);
    }
    if (!gnuplot_path.empty()) write_gnuplot(gnuplot_path, out_csv);

    const auto moments = curve_moments(result.curve, 6);
    json report;
    report["mass"] = result.curve.mass;
    report["atom0"] = result.curve.atom0;
    report["epsilon"] = result.curve.epsilon;
    report["bracket"] = {bracket.first, bracket.second};
    report["points"] = result.curve.xs.size();
    report["failures"] = result.failures.size();
    for (int k = 1; k <= 6; ++k)
        report["moments"][std::to_string(k)] = moments.order(k);
    std::string rpath = report_path;
    if (rpath.empty())
        rpath = std::filesystem::path(out_csv).replace_extension(".report.json").string();
    std::ofstream(rpath) << report.dump(2) << "\n";

    if (!result.failures.empty()) {
        json fails = json::array();
        for (const auto& f : result.failures)
            fails.push_back({{"x", f.z.real()}, {"im", f.z.imag()}, {"reason", f.reason}});
        std::ofstream(out_csv + ".failures.json") << fails.dump(2) << "\n";
        std::cerr << result.failures.size() << " grid points failed; partial CSV written\n";
        return kExitSolver;
    }
    std::cout << "wrote " << out_csv << " (mass " << result.curve.mass << ")\n";
    return 0;
}

int cmd_moments(const ModelArgs& margs, int max_order, std::int64_t finite_n,
                const std::string& out_path) {
    const AnySpec any = margs.load();
    const bool wishart = any.is_wishart();
    const ModelSpec spec = wishart ? build_wishart_embedding(*any.wishart) : *any.model;
    const EtaMap eta = eta_for(spec);

    double theta = 1.0;
    if (wishart) {
        double row_alpha = 0.0;
        for (int i = 0; i < any.wishart->rows(); ++i) row_alpha += spec.dims.alpha_value(i);
        theta = 1.0 / (2.0 * row_alpha);
    }

    // Gram-law moments come from the embedding: m_k(HH*) = theta m_2k(X).
    const int order_on_x = wishart ? 2 * max_order : max_order;
    const auto mats = limiting_moment_recursive(eta, std::min(order_on_x, 32));

    json rows = json::array();
    std::cout << (wishart ? "k\tmoment of HH*" : "k\tmoment of X") << (finite_n > 0 ? "\tfinite-n" : "")
              << "\n";
    for (int k = 1; k <= max_order; ++k) {
        const int mx = wishart ? 2 * k : k;
        if (mx >= static_cast<int>(mats.size())) break;
        const double limit = (wishart ? theta : 1.0) * eta.trace(mats[mx]).real();
        json row{{"order", k}, {"limit", limit}};
        std::cout << k << "\t" << limit;
        if (finite_n > 0 && mx <= 10) {
            const double fn = (wishart ? theta : 1.0) * finite_n_moment(spec, mx, finite_n);
            std::cout << "\t" << fn;
            row["finite_n"] = fn;
        }
        std::cout << "\n";
        rows.push_back(row);
    }
    if (!out_path.empty()) std::ofstream(out_path) << rows.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const ModelArgs& margs, const SimConfig& cfg, const std::string& out_csv) {
    const AnySpec any = margs.load();
    const SpectrumResult result = any.is_wishart() ? empirical_spectrum(*any.wishart, cfg)
                                                   : empirical_spectrum(*any.model, cfg);
    {
        std::ofstream os(out_csv);
        if (!os) throw ValidationError("cannot write " + out_csv);
        write_histogram_csv(os, result.hist);
    }
    json meta;
    meta["seed"] = cfg.seed;
    meta["reps"] = cfg.reps;
    meta["N"] = cfg.N;
    meta["bins"] = cfg.bins;
    meta["n_samples"] = result.hist.n_samples;
    meta["wall_time"] = result.wall_time_seconds;
    std::ofstream(out_csv + ".meta.json") << meta.dump(2) << "\n";
    std::cout << "wrote " << out_csv << " (" << result.hist.n_samples << " eigenvalues, "
              << result.wall_time_seconds << " s)\n";
    return 0;
}

int cmd_compare(const std::string& density_path, const std::string& hist_path,
                const std::string& out_path) {
    std::ifstream dfs(density_path);
    if (!dfs) throw ValidationError("cannot open " + density_path);
    const DensityCurve curve = read_density_csv(dfs);
    std::ifstream hfs(hist_path);
    if (!hfs) throw ValidationError("cannot open " + hist_path);
    const Histogram hist = read_histogram_csv(hfs);

    const CompareReport rep = compare(curve, hist);
    json out;
    out["l1"] = rep.l1;
    out["sup_bin"] = rep.sup_bin;
    out["moment_gaps"] = rep.moment_gaps;
    std::ofstream(out_path) << out.dump(2) << "\n";
    std::cout << "l1 = " << rep.l1 << ", sup_bin = " << rep.sup_bin << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"limiting eigenvalue densities of Gaussian block random matrices"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "solve the fixed-point equation, emit density");
    ModelArgs solve_margs;
    add_model_args(solve, solve_margs);
    double xmin = std::nan(""), xmax = std::nan("");
    int points = 1200;
    double eps = 1e-6;
    bool richardson = false;
    std::string out_csv = "density.csv", report_path, gnuplot_path;
    int solve_threads = 1;
    solve->add_option("--xmin", xmin, "left edge (default: support bracket)");
    solve->add_option("--xmax", xmax, "right edge (default: support bracket)");
    solve->add_option("--points", points, "grid points (default 1200)")->check(CLI::PositiveNumber);
    solve->add_option("--epsilon", eps, "Im z offset (default 1e-6)")->check(CLI::PositiveNumber);
    solve->add_flag("--richardson", richardson, "extrapolate over eps, 2eps, 4eps");
    solve->add_option("--out", out_csv, "density CSV path");
    solve->add_option("--report", report_path, "JSON report path (default <out>.report.json)");
    solve->add_option("--gnuplot", gnuplot_path, "also emit a gnuplot script");
    solve->add_option("--threads", solve_threads, "parallel grid chunks")->check(CLI::PositiveNumber);

    // moments
    auto* moments = app.add_subcommand("moments", "limiting spectral moments");
    ModelArgs mom_margs;
    add_model_args(moments, mom_margs);
    int max_order = 8;
    std::int64_t finite_n = 0;
    std::string mom_out;
    moments->add_option("--max-order", max_order, "highest moment order")->check(CLI::PositiveNumber);
    moments->add_option("--finite-n", finite_n, "also print exact finite-n values at this n");
    moments->add_option("--out", mom_out, "JSON output path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo eigenvalue histogram");
    ModelArgs sim_margs;
    add_model_args(simulate, sim_margs);
    SimConfig cfg;
    std::string hist_csv = "hist.csv";
    simulate->add_option("--N", cfg.N, "block size unit (default 100)")->check(CLI::PositiveNumber);
    simulate->add_option("--reps", cfg.reps, "realizations (default 100)")->check(CLI::PositiveNumber);
    simulate->add_option("--bins", cfg.bins, "histogram bins (default 60)")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", cfg.seed, "RNG master seed (default 1)");
    simulate->add_option("--threads", cfg.threads, "parallel realizations")->check(CLI::PositiveNumber);
    simulate->add_option("--out", hist_csv, "histogram CSV path");

    // compare
    auto* comp = app.add_subcommand("compare", "compare a density curve with a histogram");
    std::string density_path, hist_path, comp_out = "report.json";
    comp->add_option("--density", density_path, "density CSV")->required();
    comp->add_option("--hist", hist_path, "histogram CSV")->required();
    comp->add_option("--out", comp_out, "JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (solve->parsed())
            return cmd_solve(solve_margs, xmin, xmax, points, eps, richardson, out_csv,
                             report_path, gnuplot_path, solve_threads);
        if (moments->parsed()) return cmd_moments(mom_margs, max_order, finite_n, mom_out);
        if (simulate->parsed()) return cmd_simulate(sim_margs, cfg, hist_csv);
        if (comp->parsed()) return cmd_compare(density_path, hist_path, comp_out);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SolveError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
