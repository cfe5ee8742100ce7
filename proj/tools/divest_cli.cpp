#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "divest/csv.hpp"
#include "divest/error.hpp"
#include "divest/estimator.hpp"
#include "divest/experiment.hpp"
#include "divest/oracle.hpp"
#include "divest/rng.hpp"

namespace {

// Reference model, used when --config is not given.
constexpr const char* kBaseConfig = R"(u = 10
c = 15
sigma = 2
lambda = 5
mu = 0.5
r = 0.2
T = 100
h_list = 1, 0.1, 0.01
alpha_list = 10, 100, 1000
B = 100
)";

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool refine = false;
    std::optional<unsigned> threads;
};

divest::ExperimentConfig load(const Common& opts) {
    divest::ExperimentConfig cfg;
    if (opts.config.empty()) {
        std::istringstream in(kBaseConfig);
        cfg = divest::parse_config(in, "<builtin>");
    } else {
        cfg = divest::load_config(opts.config);
    }
    if (opts.seed) cfg.master_seed = *opts.seed;
    if (!opts.out.empty()) cfg.output_dir = opts.out;
    if (opts.refine) cfg.refine = true;
    if (opts.threads) cfg.threads = *opts.threads;
    return cfg;
}

void add_common(CLI::App* cmd, Common& opts) {
    cmd->add_option("--config", opts.config, "key = value config file (default: the reference model)");
    cmd->add_option("--seed", opts.seed, "overrides master_seed");
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_flag("--refine", opts.refine, "enable breakpoint refinement");
    cmd->add_option("--threads", opts.threads, "worker threads, 0 = all cores");
}

std::size_t h_index_of(const divest::ExperimentConfig& cfg, std::optional<double> h) {
    if (!h) return 0;
    for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
        if (cfg.h_list[i] == *h) return i;
    }
    throw divest::Error(divest::ErrorKind::ValidationError, fmt::format("h={} is not in h_list", *h));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dividend barrier estimation from one discretely observed surplus path"};
    app.require_subcommand(1);

    Common opts;
    std::optional<double> h;
    std::optional<std::size_t> alpha;
    std::string path_file;
    std::vector<std::string> figures;
    double u_for_table = -1.0;

    auto* simulate = app.add_subcommand("simulate", "write one observed path as CSV (k,t,value)");
    add_common(simulate, opts);
    simulate->add_option("--step", h, "grid step (default: first of h_list)");

    auto* estimate = app.add_subcommand("estimate", "one barrier estimate");
    add_common(estimate, opts);
    estimate->add_option("--path", path_file, "observed path CSV; simulated when absent");
    estimate->add_option("--step", h, "grid step for a fresh simulation (default: first of h_list)");
    estimate->add_option("--alpha", alpha, "permutation count (default: first of alpha_list)");

    auto* oracle = app.add_subcommand("oracle", "Lundberg roots, optimal barrier and V(u;b) table");
    add_common(oracle, opts);
    oracle->add_option("--u", u_for_table, "initial surplus for the table (default: config u)");

    auto* experiment = app.add_subcommand("experiment", "full replication run: table1.csv, estimates.csv");
    add_common(experiment, opts);

    auto* figs = app.add_subcommand("figures", "figure CSVs");
    add_common(figs, opts);
    figs->add_option("--which", figures, "paths, quasi, valuecurves, contrast, boxplot (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const divest::ExperimentConfig cfg = load(opts);
        if (*simulate) {
            const std::size_t hi = h_index_of(cfg, h);
            const divest::StepPath path = divest::figure_observed_path(cfg, hi);
            if (opts.out.empty()) {
                std::cout << "k,t,value\n";
                for (std::size_t k = 0; k < path.values.size(); ++k) {
                    std::cout << k << ',' << divest::format_real(path.scheme.time(k)) << ','
                              << divest::format_real(path.values[k]) << '\n';
                }
            } else {
                std::filesystem::create_directories(cfg.output_dir);
                divest::write_path_csv(cfg.output_dir / "path.csv", path);
            }
        } else if (*estimate) {
            const divest::StepPath path = path_file.empty()
                                              ? divest::figure_observed_path(cfg, h_index_of(cfg, h))
                                              : divest::read_path_csv(path_file);
            const std::size_t a = alpha ? *alpha : cfg.alpha_list.front();
            divest::EstimateOptions options;
            options.refine = cfg.refine;
            options.threads = cfg.threads;
            const auto grid = cfg.grid.points();
            const divest::Estimate est =
                divest::estimate_barrier(divest::increments_of(path), path.u0, a, grid, cfg.r,
                                         divest::derive_seed(cfg.master_seed, 1), options);
            for (const auto& w : est.diagnostics.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << "theta_hat," << divest::format_real(est.theta_hat) << '\n'
                      << "grid_theta_hat," << divest::format_real(est.diagnostics.grid_theta_hat) << '\n'
                      << "alpha," << a << '\n'
                      << "h," << divest::format_real(path.scheme.h) << '\n'
                      << "n," << path.scheme.n << '\n';
        } else if (*oracle) {
            const divest::OracleResult result(cfg.model, cfg.r);
            const double u = u_for_table >= 0.0 ? u_for_table : cfg.model.u;
            const auto& roots = result.roots().roots;
            std::cout << "# roots," << divest::format_real(roots[0]) << ',' << divest::format_real(roots[1])
                      << ',' << divest::format_real(roots[2]) << '\n'
                      << "# b_star," << divest::format_real(result.b_star()) << '\n'
                      << "# u," << divest::format_real(u) << '\n'
                      << "b,value\n";
            for (double b : cfg.grid.points()) {
                if (b < u) continue;
                std::cout << divest::format_real(b) << ',' << divest::format_real(result.value_at(u, b)) << '\n';
            }
        } else if (*experiment) {
            const divest::ExperimentResult res = divest::run_experiment(cfg);
            std::cout << "alpha,h,B,mean,std,bias,mse\n";
            for (const auto& c : res.cells) {
                std::cout << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", c.alpha, c.h, c.B, c.mean,
                                         c.std, c.bias, c.mse);
            }
        } else if (*figs) {
            std::vector<divest::Figure> which;
            if (figures.empty()) figures = {"paths", "quasi", "valuecurves", "contrast", "boxplot"};
            for (const auto& f : figures) which.push_back(divest::parse_figure(f));
            divest::emit_figures(cfg, which);
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg) {
            if (ch == '\n') ch = ' ';
        }
        std::cerr << "divest_cli: " << msg << '\n';
        return 1;
    }
    return 0;
}
