#include "divest/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "divest/csv.hpp"
#include "divest/dividend.hpp"
#include "divest/error.hpp"
#include "divest/estimator.hpp"
#include "divest/oracle.hpp"
#include "divest/parallel.hpp"
#include "divest/quasi_process.hpp"
#include "divest/rng.hpp"

namespace divest {

namespace {

// Stream tags that keep figure randomness disjoint from replication seeds.
constexpr std::uint64_t kFigureObserved = 0xf16'0001;
constexpr std::uint64_t kFigurePaths = 0xf16'0002;
constexpr std::uint64_t kFigurePerms = 0xf16'0003;
constexpr std::uint64_t kObservedStream = 0;
constexpr std::uint64_t kPermutationStream = 1;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    std::size_t line;
};

class ConfigReader {
public:
    ConfigReader(std::map<std::string, Entry> entries, std::string source)
        : entries_(std::move(entries)), source_(std::move(source)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const Entry& require(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) {
            throw Error(ErrorKind::ParseError, source_ + ": missing required key '" + key + "'");
        }
        return it->second;
    }

    double real(const std::string& key) const { return parse_real(key, require(key)); }
    double real(const std::string& key, double fallback) const {
        return has(key) ? real(key) : fallback;
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? parse_integer(key, entries_.at(key).value, entries_.at(key).line) : fallback;
    }

    std::vector<double> real_list(const std::string& key) const {
        const Entry& e = require(key);
        std::vector<double> out;
        for (const auto& item : split(e.value)) out.push_back(parse_real(key, Entry{item, e.line}));
        if (out.empty()) fail(key, e.line, "empty list");
        return out;
    }

    std::vector<std::uint64_t> integer_list(const std::string& key) const {
        const Entry& e = require(key);
        std::vector<std::uint64_t> out;
        for (const auto& item : split(e.value)) out.push_back(parse_integer(key, item, e.line));
        if (out.empty()) fail(key, e.line, "empty list");
        return out;
    }

    [[noreturn]] void fail(const std::string& key, std::size_t line, const std::string& what) const {
        throw Error(ErrorKind::ParseError,
                    source_ + ":" + std::to_string(line) + ": field '" + key + "': " + what);
    }

private:
    static std::vector<std::string> split(const std::string& text) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto comma = text.find(',', start);
            const auto piece = trim(std::string_view(text).substr(
                start, comma == std::string::npos ? std::string::npos : comma - start));
            if (!piece.empty()) out.emplace_back(piece);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    double parse_real(const std::string& key, const Entry& e) const {
        double v = 0.0;
        const std::string& s = e.value;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, e.line, "not a number: '" + s + "'");
        return v;
    }

    std::uint64_t parse_integer(const std::string& key, const std::string& s, std::size_t line) const {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            fail(key, line, "not a non-negative integer: '" + s + "'");
        }
        return v;
    }

    std::map<std::string, Entry> entries_;
    std::string source_;
};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ValidationError, what); }

std::vector<double> grid_for(const ExperimentConfig& cfg) { return cfg.grid.points(); }

}  // namespace

std::vector<double> GridSpec::points() const {
    std::vector<double> out;
    const double span = (hi - lo) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9));
    out.reserve(count + 1);
    for (std::size_t i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    if (!out.empty() && out.back() > hi) out.back() = hi;
    return out;
}

std::size_t ExperimentConfig::steps_for(double h) const {
    const double ratio = T / h;
    const double rounded = std::round(ratio);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        invalid(fmt::format("T/h must be a positive integer (T={}, h={})", T, h));
    }
    return static_cast<std::size_t>(rounded);
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    static const char* const kKnown[] = {"u",  "c",          "sigma",  "lambda",     "mu",
                                         "r",  "T",          "h_list", "alpha_list", "B",
                                         "grid", "master_seed", "output_dir", "valuecurve_count",
                                         "threads", "refine"};
    std::map<std::string, Entry> entries;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::ParseError,
                        source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
            throw Error(ErrorKind::ParseError,
                        source + ":" + std::to_string(line_no) + ": unknown field '" + key + "'");
        }
        if (!entries.emplace(key, Entry{value, line_no}).second) {
            throw Error(ErrorKind::ParseError,
                        source + ":" + std::to_string(line_no) + ": duplicate field '" + key + "'");
        }
    }

    const ConfigReader reader(std::move(entries), source);
    ExperimentConfig cfg;
    cfg.model.u = reader.real("u");
    cfg.model.c = reader.real("c");
    cfg.model.sigma = reader.real("sigma");
    cfg.model.lambda = reader.real("lambda");
    cfg.model.mu = reader.real("mu");
    cfg.r = reader.real("r");
    cfg.T = reader.real("T");
    cfg.h_list = reader.real_list("h_list");
    for (std::uint64_t a : reader.integer_list("alpha_list")) cfg.alpha_list.push_back(a);
    cfg.B = reader.integer("B", 100);
    cfg.master_seed = reader.integer("master_seed", 1);
    cfg.valuecurve_count = reader.integer("valuecurve_count", 5);
    cfg.threads = static_cast<unsigned>(reader.integer("threads", 0));
    cfg.refine = reader.integer("refine", 0) != 0;
    if (reader.has("output_dir")) cfg.output_dir = reader.require("output_dir").value;

    cfg.grid = GridSpec{cfg.model.u, 20.0, 0.05};
    if (reader.has("grid")) {
        const auto g = reader.real_list("grid");
        if (g.size() < 2 || g.size() > 3) {
            reader.fail("grid", reader.require("grid").line, "expected lo,hi[,step]");
        }
        cfg.grid.lo = g[0];
        cfg.grid.hi = g[1];
        if (g.size() == 3) cfg.grid.step = g[2];
    }

    try {
        cfg.model = validate_params(cfg.model);
    } catch (const Error& e) {
        invalid(std::string("model parameters: ") + e.what());
    }
    if (!(cfg.r > 0.0)) invalid("r must be positive");
    if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) invalid("T must be positive");
    for (double h : cfg.h_list) {
        if (!(h > 0.0)) invalid("every h in h_list must be positive");
        (void)cfg.steps_for(h);
    }
    for (std::size_t a : cfg.alpha_list) {
        if (a < 1) invalid("every alpha in alpha_list must be at least 1");
    }
    if (cfg.B < 1) invalid("B must be at least 1");
    if (!(cfg.grid.step > 0.0)) invalid("grid step must be positive");
    if (!(cfg.grid.lo <= cfg.grid.hi)) invalid("grid requires lo <= hi");
    if (cfg.grid.lo < cfg.model.u) invalid("grid must lie in [u, theta_bar] (lo < u)");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::IOError, "cannot open config " + file.string());
    return parse_config(in, file.string());
}

CellReport summarize_cell(std::size_t alpha, double h, std::span<const double> estimates, double theta0) {
    if (estimates.empty()) throw Error(ErrorKind::ValidationError, "cell has no estimates");
    CellReport rep;
    rep.alpha = alpha;
    rep.h = h;
    rep.B = estimates.size();
    rep.theta0_ref = theta0;
    const double count = static_cast<double>(estimates.size());
    double sum = 0.0;
    for (double v : estimates) sum += v;
    rep.mean = sum / count;
    double ss = 0.0;
    double se = 0.0;
    for (double v : estimates) {
        ss += (v - rep.mean) * (v - rep.mean);
        se += (v - theta0) * (v - theta0);
    }
    rep.std = std::sqrt(ss / count);
    rep.bias = rep.mean - theta0;
    rep.mse = se / count;
    return rep;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t alpha_index, std::size_t h_index,
                               std::size_t rep) {
    return derive_seed(master, alpha_index, h_index, rep);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    double theta0 = std::numeric_limits<double>::quiet_NaN();
    try {
        theta0 = OracleResult(cfg.model, cfg.r).b_star();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoDiffusion) throw;
    }
    const std::vector<double> grid = grid_for(cfg);

    struct Task {
        std::size_t ai, hi, rep;
    };
    std::vector<Task> tasks;
    for (std::size_t ai = 0; ai < cfg.alpha_list.size(); ++ai) {
        for (std::size_t hi = 0; hi < cfg.h_list.size(); ++hi) {
            for (std::size_t rep = 0; rep < cfg.B; ++rep) tasks.push_back({ai, hi, rep});
        }
    }

    ExperimentResult result;
    result.estimates.resize(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t t, unsigned) {
        const Task& task = tasks[t];
        const std::size_t alpha = cfg.alpha_list[task.ai];
        const double h = cfg.h_list[task.hi];
        const std::uint64_t seed = replication_seed(cfg.master_seed, task.ai, task.hi, task.rep);
        try {
            const SamplingScheme scheme = make_scheme(h, cfg.steps_for(h));
            const IncrementSeries observed =
                simulate_increments(cfg.model, scheme, derive_seed(seed, kObservedStream));
            EstimateOptions options;
            options.refine = cfg.refine;
            options.threads = 1;
            const Estimate est = estimate_barrier(observed, cfg.model.u, alpha, grid, cfg.r,
                                                  derive_seed(seed, kPermutationStream), options);
            result.estimates[t] = EstimateRecord{alpha, h, task.rep, seed, est.theta_hat};
        } catch (const Error& e) {
            throw Error(e.kind(), fmt::format("cell alpha={} h={} rep={}: {}", alpha, h, task.rep, e.what()));
        }
    });

    std::filesystem::create_directories(cfg.output_dir);
    CsvWriter table(cfg.output_dir / "table1.csv", {"alpha", "h", "B", "mean", "std", "bias", "mse"});
    std::vector<double> values;
    for (std::size_t start = 0; start < tasks.size(); start += cfg.B) {
        values.clear();
        for (std::size_t j = 0; j < cfg.B; ++j) values.push_back(result.estimates[start + j].theta_hat);
        const auto& first = result.estimates[start];
        const CellReport rep = summarize_cell(first.alpha, first.h, values, theta0);
        table.row({static_cast<std::uint64_t>(rep.alpha), rep.h, static_cast<std::uint64_t>(rep.B), rep.mean,
                   rep.std, rep.bias, rep.mse});
        result.cells.push_back(rep);
    }
    table.close();

    CsvWriter est_csv(cfg.output_dir / "estimates.csv", {"alpha", "h", "rep", "seed", "theta_hat"});
    for (const EstimateRecord& e : result.estimates) {
        est_csv.row({static_cast<std::uint64_t>(e.alpha), e.h, static_cast<std::uint64_t>(e.rep), e.seed,
                     e.theta_hat});
    }
    est_csv.close();
    return result;
}

Figure parse_figure(std::string_view name) {
    if (name == "paths") return Figure::Paths;
    if (name == "quasi") return Figure::Quasi;
    if (name == "valuecurves") return Figure::ValueCurves;
    if (name == "contrast") return Figure::Contrast;
    if (name == "boxplot") return Figure::Boxplot;
    throw Error(ErrorKind::ParseError, "unknown figure '" + std::string(name) + "'");
}

void write_path_csv(const std::filesystem::path& file, const StepPath& path) {
    CsvWriter out(file, {"k", "t", "value"});
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        out.row({static_cast<std::uint64_t>(k), path.scheme.time(k), path.values[k]});
    }
    out.close();
}

StepPath read_path_csv(const std::filesystem::path& file) {
    const CsvTable table = read_csv(file);
    const std::size_t t_col = table.column("t");
    const std::size_t v_col = table.column("value");
    if (table.rows.size() < 2) throw Error(ErrorKind::ParseError, file.string() + ": need at least two rows");
    auto number = [&](const std::string& s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw Error(ErrorKind::ParseError, file.string() + ": bad number '" + s + "'");
        }
        return v;
    };
    StepPath path;
    for (const auto& row : table.rows) path.values.push_back(number(row[v_col]));
    const double h = number(table.rows[1][t_col]) - number(table.rows[0][t_col]);
    path.scheme = make_scheme(h, path.values.size() - 1);
    path.u0 = path.values.front();
    return path;
}

StepPath figure_observed_path(const ExperimentConfig& cfg, std::size_t h_index) {
    const double h = cfg.h_list.at(h_index);
    const SamplingScheme scheme = make_scheme(h, cfg.steps_for(h));
    const auto seed = derive_seed(cfg.master_seed, kFigureObserved, h_index);
    return path_from_increments(cfg.model.u, simulate_increments(cfg.model, scheme, seed));
}

void emit_figures(const ExperimentConfig& cfg, std::span<const Figure> which) {
    std::filesystem::create_directories(cfg.output_dir);
    const std::vector<double> grid = grid_for(cfg);
    const double h0 = cfg.h_list.front();
    const SamplingScheme scheme0 = make_scheme(h0, cfg.steps_for(h0));

    for (Figure fig : which) {
        switch (fig) {
            case Figure::Paths: {
                CsvWriter out(cfg.output_dir / "paths.csv", {"path_id", "t", "value"});
                for (std::size_t b = 0; b < cfg.B; ++b) {
                    const StepPath path =
                        b == 0 ? figure_observed_path(cfg, 0)
                               : path_from_increments(
                                     cfg.model.u,
                                     simulate_increments(cfg.model, scheme0,
                                                         derive_seed(cfg.master_seed, kFigurePaths, b)));
                    for (std::size_t k = 0; k < path.values.size(); ++k) {
                        out.row({static_cast<std::uint64_t>(b), scheme0.time(k), path.values[k]});
                    }
                }
                out.close();
                break;
            }
            case Figure::Quasi: {
                const StepPath observed = figure_observed_path(cfg, 0);
                const IncrementSeries inc = increments_of(observed);
                const PermutationSet perms = sample_permutation_set(
                    scheme0.n, cfg.alpha_list.front(), derive_seed(cfg.master_seed, kFigurePerms, 0));
                CsvWriter out(cfg.output_dir / "quasi.csv", {"perm_id", "t", "value"});
                for (std::size_t k = 0; k < observed.values.size(); ++k) {
                    out.row({std::uint64_t{0}, scheme0.time(k), observed.values[k]});
                }
                for (std::size_t i = 0; i < perms.perms.size(); ++i) {
                    const StepPath q = build_quasi_path(cfg.model.u, inc, perms.perms[i]);
                    for (std::size_t k = 0; k < q.values.size(); ++k) {
                        out.row({static_cast<std::uint64_t>(i + 1), scheme0.time(k), q.values[k]});
                    }
                }
                out.close();
                break;
            }
            case Figure::ValueCurves: {
                const StepPath observed = figure_observed_path(cfg, 0);
                const IncrementSeries inc = increments_of(observed);
                const PermutationSet perms = sample_permutation_set(
                    scheme0.n, cfg.valuecurve_count, derive_seed(cfg.master_seed, kFigurePerms, 0));
                CsvWriter out(cfg.output_dir / "valuecurves.csv", {"perm_id", "theta", "value"});
                for (std::size_t i = 0; i < perms.perms.size(); ++i) {
                    const StepPath q = build_quasi_path(cfg.model.u, inc, perms.perms[i]);
                    const ValueCurve curve = value_curve(q, grid, cfg.r);
                    for (std::size_t j = 0; j < grid.size(); ++j) {
                        out.row({static_cast<std::uint64_t>(i + 1), curve.thetas[j], curve.values[j]});
                    }
                }
                out.close();
                break;
            }
            case Figure::Contrast: {
                CsvWriter out(cfg.output_dir / "contrast.csv", {"series_id", "theta", "mean_value"});
                for (std::size_t hi = 0; hi < cfg.h_list.size(); ++hi) {
                    const StepPath observed = figure_observed_path(cfg, hi);
                    const IncrementSeries inc = increments_of(observed);
                    for (std::size_t alpha : cfg.alpha_list) {
                        EstimateOptions options;
                        options.threads = cfg.threads;
                        const Estimate est = estimate_barrier(inc, cfg.model.u, alpha, grid, cfg.r,
                                                              derive_seed(cfg.master_seed, kFigurePerms, hi),
                                                              options);
                        const std::string id = fmt::format("alpha{}_h{}", alpha, cfg.h_list[hi]);
                        for (std::size_t j = 0; j < grid.size(); ++j) {
                            out.row({id, est.curve.thetas[j], est.curve.values[j]});
                        }
                    }
                }
                try {
                    const OracleResult oracle(cfg.model, cfg.r);
                    for (double theta : grid) {
                        out.row({std::string("oracle"), theta, oracle.value_at(cfg.model.u, theta)});
                    }
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NoDiffusion) throw;
                }
                out.close();
                break;
            }
            case Figure::Boxplot: {
                if (!std::filesystem::exists(cfg.output_dir / "estimates.csv")) run_experiment(cfg);
                break;
            }
        }
    }
}

}  // namespace divest
