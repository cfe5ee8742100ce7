#ifndef DIVEST_EXPERIMENT_HPP
#define DIVEST_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divest/levy_model.hpp"

namespace divest {

/// Barrier grid lo, lo + step, ..., up to hi (inclusive within 1e-9 step).
struct GridSpec {
    double lo = 10.0;
    double hi = 20.0;
    double step = 0.05;

    std::vector<double> points() const;
};

/**
 * Experiment configuration. The file format is one `key = value` per line,
 * `#` starts a comment, lists are comma separated:
 *
 *   u, c, sigma, lambda, mu, r, T    required reals
 *   h_list                           required, grid steps; T/h must be integral
 *   alpha_list                       required, ensemble sizes
 *   B                                replications per cell (default 100)
 *   grid                             lo,hi[,step] (default u,20,0.05)
 *   master_seed                      unsigned 64-bit (default 1)
 *   output_dir                       default "out"
 *   valuecurve_count                 paths in the valuecurves figure (default 5)
 *   threads                          worker threads, 0 = all cores (default 0)
 *   refine                           0/1, breakpoint refinement (default 0)
 */
struct ExperimentConfig {
    ModelParams model;
    double r = 0.2;
    double T = 100.0;
    std::vector<double> h_list;
    std::vector<std::size_t> alpha_list;
    std::size_t B = 100;
    GridSpec grid;
    std::uint64_t master_seed = 1;
    std::filesystem::path output_dir = "out";
    std::size_t valuecurve_count = 5;
    unsigned threads = 0;
    bool refine = false;

    /// n = T / h for the given step (validated to be integral).
    std::size_t steps_for(double h) const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& file);

struct CellReport {
    std::size_t alpha = 0;
    double h = 0.0;
    std::size_t B = 0;
    double mean = 0.0;
    double std = 0.0;   ///< about the mean, divisor B
    double bias = 0.0;  ///< mean - theta0_ref
    double mse = 0.0;   ///< (1/B) sum (estimate - theta0_ref)^2
    double theta0_ref = 0.0;
};

CellReport summarize_cell(std::size_t alpha, double h, std::span<const double> estimates, double theta0);

struct EstimateRecord {
    std::size_t alpha = 0;
    double h = 0.0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    double theta_hat = 0.0;
};

struct ExperimentResult {
    std::vector<CellReport> cells;
    std::vector<EstimateRecord> estimates;
};

/// Seed of replication `rep` in cell (alpha_index, h_index): a SplitMix64
/// hash chain over (master, alpha_index, h_index, rep).
std::uint64_t replication_seed(std::uint64_t master, std::size_t alpha_index, std::size_t h_index,
                               std::size_t rep);

/// Runs every (alpha, h) cell, writes table1.csv and estimates.csv into
/// cfg.output_dir and returns the same content.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

enum class Figure { Paths, Quasi, ValueCurves, Contrast, Boxplot };

Figure parse_figure(std::string_view name);

/// Writes paths.csv, quasi.csv, valuecurves.csv, contrast.csv or (for the
/// box plot) estimates.csv into cfg.output_dir.
void emit_figures(const ExperimentConfig& cfg, std::span<const Figure> which);

/// Observed paths are exchanged as CSV with columns k,t,value.
void write_path_csv(const std::filesystem::path& file, const StepPath& path);
StepPath read_path_csv(const std::filesystem::path& file);

/// The observed path used by the figure emitters for h_list[h_index].
StepPath figure_observed_path(const ExperimentConfig& cfg, std::size_t h_index);

}  // namespace divest

#endif  // DIVEST_EXPERIMENT_HPP
