#include "commands.hpp"

#include "gclust/diagnostics.hpp"
#include "gclust/error.hpp"
#include "gclust/evaluation/experiment.hpp"
#include "gclust/evaluation/simulate.hpp"
#include "gclust/evaluation/swimmer.hpp"
#include "gclust/ingest.hpp"
#include "gclust/io.hpp"
#include "gclust/model_selection.hpp"
#include "gclust/nmf.hpp"
#include "gclust/spectral.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace gclust::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) fail(ErrorKind::io, fmt::format("input not found: {}", path));
}

std::vector<Index> parse_index_list(const std::string& text, const char* what) {
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<Index>(v));
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_argument, fmt::format("{}: '{}' is not an integer", what, item));
        }
    }
    require(!out.empty(), ErrorKind::invalid_argument, fmt::format("{} is empty", what));
    return out;
}

DataMatrix load_data(const std::string& input, const std::string& meta) {
    require_file(input);
    if (!meta.empty()) {
        require_file(meta);
        return io::read_data_matrix(input, meta);
    }
    const fs::path sibling = fs::path(input).parent_path() / "meta.json";
    return io::read_data_matrix(input, fs::exists(sibling) ? sibling : fs::path{});
}

std::string labels_json(const std::vector<int>& labels) { return json(labels).dump() + "\n"; }

// ---- ingest -------------------------------------------------------------

struct IngestArgs {
    std::string events, boundaries, map, out_dir, delimiter = "tab";
    int bins = 0;
    std::optional<double> horizon;
    std::optional<int> vertices;
    bool header = false, skip_bad = false, symmetrize = false;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
    require_file(a.events);
    if (!a.boundaries.empty()) require_file(a.boundaries);
    if (!a.map.empty()) require_file(a.map);
    require((a.bins > 0) != !a.boundaries.empty(), ErrorKind::invalid_argument,
            "give exactly one of --bins and --boundaries");

    ParseOptions options;
    options.header = a.header;
    options.policy = a.skip_bad ? BadLinePolicy::skip : BadLinePolicy::strict;
    if (a.delimiter == "tab") options.delimiter = '\t';
    else if (a.delimiter == "comma") options.delimiter = ',';
    else if (a.delimiter == "space") options.delimiter = ' ';
    else fail(ErrorKind::invalid_argument, fmt::format("unknown delimiter '{}'", a.delimiter));

    std::ifstream in(a.events);
    const ParseResult parsed = parse_events(in, options);

    std::optional<TemporalPartition> partition;
    if (a.bins > 0) {
        // Bins are half-open, so the default horizon sits just past the last event.
        const double horizon = a.horizon ? *a.horizon
                                         : std::nextafter(parsed.log.horizon, std::numeric_limits<double>::infinity());
        partition = TemporalPartition::uniform(horizon, a.bins);
    } else {
        std::ifstream bin(a.boundaries);
        std::vector<double> b;
        for (double v; bin >> v;) b.push_back(v);
        require(bin.eof(), ErrorKind::parse, fmt::format("{}: boundaries must be numbers", a.boundaries));
        partition = TemporalPartition(std::move(b));
    }

    GraphSequence g = temporal_bin(parsed.log, *partition, a.vertices);
    if (a.symmetrize) g = symmetrize(g);
    if (!a.map.empty()) {
        std::ifstream min(a.map);
        g = contract_vertices(g, ContractionMap::read(min, g.vertices()));
    }
    const DataMatrix data = vectorize(g);
    io::write_data_matrix(a.out_dir, data);
    out << json{{"n", data.n}, {"T", data.length()}, {"records", parsed.log.records.size()}, {"skipped", parsed.skipped}}
               .dump()
        << "\n";
    return 0;
}

// ---- gclust -------------------------------------------------------------

struct NmfArgs {
    std::string solver = "ls";
    int restarts = 20;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    int max_iter = 2000;
    double alpha = 0.0, beta = 0.0;
};

struct GclustArgs {
    std::string input, meta, out_dir;
    std::optional<int> r;
    bool select_dim = false;
    std::optional<int> r_max;
    int r_min = 1;
    NmfArgs nmf;
};

GclustOptions gclust_options(const NmfArgs& a) {
    require(a.restarts >= 1, ErrorKind::invalid_argument, "--restarts must be positive");
    require(a.tol >= 0.0, ErrorKind::invalid_argument, "--tol must be non-negative");
    require(a.max_iter >= 1, ErrorKind::invalid_argument, "--max-iter must be positive");
    GclustOptions o;
    o.solver = parse_solver(a.solver);
    o.restarts = a.restarts;
    o.seed = a.seed;
    o.nmf.tol = a.tol;
    o.nmf.max_iter = a.max_iter;
    o.nmf.alpha = a.alpha;
    o.nmf.beta = a.beta;
    return o;
}

std::string scores_csv(const std::vector<ModelScore>& table) {
    std::string text = "r,loss,penalty,aicc\n";
    for (const auto& s : table)
        text += fmt::format("{},{},{},{}\n", s.r, io::format_number(s.loss), io::format_number(s.penalty),
                            io::format_number(s.aicc));
    return text;
}

int cmd_gclust(const GclustArgs& a, std::ostream& out) {
    require(a.r.has_value() != a.select_dim, ErrorKind::invalid_argument, "give exactly one of --r and --select-dim");
    const GclustOptions options = gclust_options(a.nmf);
    const DataMatrix data = load_data(a.input, a.meta);
    const Index limit = std::min(data.X.rows(), data.X.cols());

    std::vector<ModelScore> table;
    GclustResult fit;
    if (a.r) {
        if (*a.r < 1 || *a.r > limit)
            fail(ErrorKind::invalid_argument, fmt::format("--r {} outside [1, {}]", *a.r, limit));
        fit = gclust(data, *a.r, options);
        table.push_back(fit.score);
    } else {
        const Index r_max = a.r_max ? *a.r_max : default_r_max(data);
        if (a.r_min < 1 || r_max < a.r_min || r_max > limit)
            fail(ErrorKind::invalid_argument,
                 fmt::format("dimension range [{}, {}] outside [1, {}]", a.r_min, r_max, limit));
        ModelDimResult dim = get_gclust_model_dim(data, r_max, options, a.r_min);
        table = dim.table;
        fit = std::move(dim.fits[static_cast<std::size_t>(dim.r_hat - a.r_min)]);
    }

    const Factorization& f = fit.factorization;
    const FixedPointError eps = fixed_point_residuals(f.W, f.H, fit.normalized);
    json labels{{"r", f.rank()},
                {"labels", fit.labels.values},
                {"ties", fit.labels.ties},
                {"seed", options.seed},
                {"restart_seed", f.seed}};
    json meta{{"r", f.rank()},
              {"solver", to_string(options.solver)},
              {"seed", options.seed},
              {"restart_seed", f.seed},
              {"restarts", options.restarts},
              {"objective", f.objective},
              {"iterations", f.iterations},
              {"converged", f.converged},
              {"eps_w", eps.eps_w},
              {"eps_h", eps.eps_h},
              {"reference_rank", eps.rank_used},
              {"isvt_iterations", fit.isvt_iterations},
              {"isvt_converged", fit.isvt_converged},
              {"degenerate_columns", fit.degenerate_columns}};

    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    io::write_text_atomic(dir / "scores.csv", scores_csv(table));
    io::write_text_atomic(dir / "labels.json", labels.dump(2) + "\n");
    io::write_matrix_csv(dir / "W.csv", f.W);
    io::write_matrix_csv(dir / "H.csv", f.H);
    io::write_text_atomic(dir / "factorization.json", meta.dump(2) + "\n");
    out << json{{"r", f.rank()}, {"aicc", fit.score.aicc}}.dump() << "\n";
    return 0;
}

// ---- diagnose -----------------------------------------------------------

struct DiagnoseArgs {
    std::string input, meta, map, sketch, out_dir, cache_dir;
    int baseline_reps = kBaselineReps;
    std::uint64_t seed = 0;
    double usvt_constant = kUsvtConstant;
    double clip_percentile = 99.9;
    double floor = 1e-3;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
    if (!a.map.empty()) require_file(a.map);
    require(a.clip_percentile > 0.0 && a.clip_percentile <= 100.0, ErrorKind::invalid_argument,
            "--clip-percentile must lie in (0, 100]");
    require(a.floor > 0.0, ErrorKind::invalid_argument, "--floor must be positive");
    const DataMatrix data = load_data(a.input, a.meta);
    require(data.n > 0, ErrorKind::invalid_argument, "diagnose needs a graph data matrix (rows = n^2)");

    const GraphSequence g = devectorize(data);
    Matrix A = Matrix::Zero(data.n, data.n);
    for (const auto& s : g.slices) A += s;
    if (!a.map.empty()) {
        std::ifstream in(a.map);
        const Matrix J = ContractionMap::read(in, data.n).partition_matrix();
        A = J * A * J.transpose();
    }

    std::vector<Index> rows;
    if (a.sketch.empty()) {
        for (Index i = 0; i < A.rows(); ++i) rows.push_back(i);
    } else {
        rows = parse_index_list(a.sketch, "--sketch");
    }

    UsvtOptions usvt_options;
    usvt_options.constant = a.usvt_constant;
    usvt_options.clip_quantile = a.clip_percentile / 100.0;
    const SvtResult estimate = usvt(A, usvt_options);
    const Matrix mean = estimate.estimate.cwiseMax(a.floor);
    const auto floored = (estimate.estimate.array() < a.floor).count();
    const Matrix delta = sketch(residual_matrix(A, mean, MeanSource::svt_estimate).delta, rows);

    const fs::path dir = a.out_dir;
    const fs::path cache = a.cache_dir.empty() ? dir / "cache" : fs::path(a.cache_dir);
    const auto p = static_cast<Index>(rows.size());
    const GaussianBaseline baseline = cached_gaussian_baseline(cache, p, a.baseline_reps, a.seed);
    const double mse = contraction_mse(delta, baseline);
    const Vector s = singular_values(delta);

    std::string text = "index,sigma_hat,sigma_bar\n";
    for (Index l = 0; l < p; ++l)
        text += fmt::format("{},{},{}\n", l + 1, io::format_number(s[l]), io::format_number(baseline.sigma_bar[l]));
    fs::create_directories(dir);
    io::write_text_atomic(dir / "residual_singular_values.csv", text);
    io::write_matrix_csv(dir / "residual.csv", delta);
    const json report{{"p", p},
                      {"mse", mse},
                      {"mean_source", "svt_estimate"},
                      {"usvt_rank", estimate.rank_used},
                      {"floored_entries", floored},
                      {"baseline_reps", a.baseline_reps},
                      {"seed", a.seed}};
    io::write_text_atomic(dir / "diagnose.json", report.dump(2) + "\n");
    out << json{{"p", p}, {"mse", mse}}.dump() << "\n";
    return 0;
}

// ---- simulate / benchmark -----------------------------------------------

struct SimulateArgs {
    double rho = 1.0;
    int m = 10, T = 10;
    bool contract = false;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    require(a.m >= 1, ErrorKind::invalid_argument, "--m must be positive");
    const BlockModelSpec spec = study_model(a.m, a.T, a.rho);
    GraphSequence g = simulate_block_poisson(spec, a.seed);
    if (a.contract) g = contract_vertices(g, within_block_contraction(spec.blocks(), spec.m));
    const DataMatrix data = vectorize(g);
    io::write_data_matrix(a.out_dir, data);
    io::write_text_atomic(fs::path(a.out_dir) / "truth.json", labels_json(spec.schedule));
    out << json{{"n", data.n}, {"T", data.length()}, {"total", data.N.sum()}}.dump() << "\n";
    return 0;
}

struct BenchmarkArgs {
    std::string config, out_dir;
    std::optional<int> replicates;
    std::optional<std::uint64_t> seed;
};

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
    ExperimentConfig config;
    if (!a.config.empty()) {
        require_file(a.config);
        config = experiment_config_from_json(io::read_text(a.config));
    }
    if (a.replicates) {
        require(*a.replicates >= 1, ErrorKind::invalid_argument, "--replicates must be positive");
        config.replicates = *a.replicates;
    }
    if (a.seed) config.seed = *a.seed;
    const ExperimentReport report = run_monte_carlo(config);
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    io::write_text_atomic(dir / "config.json", experiment_config_to_json(config));
    io::write_text_atomic(dir / "report.csv", report.to_csv());
    out << report.to_csv();
    return 0;
}

// ---- nmf-compare --------------------------------------------------------

struct CompareArgs {
    std::string input, meta, out_dir, iters = "0,10,100,500,1000,2000";
    int r = 0, restarts = 20;
    std::uint64_t seed = 0;
};

int cmd_nmf_compare(const CompareArgs& a, std::ostream& out) {
    require(a.restarts >= 1, ErrorKind::invalid_argument, "--restarts must be positive");
    const DataMatrix data = load_data(a.input, a.meta);
    const Index limit = std::min(data.X.rows(), data.X.cols());
    if (a.r < 1 || a.r > limit) fail(ErrorKind::invalid_argument, fmt::format("--r {} outside [1, {}]", a.r, limit));
    std::vector<int> grid;
    for (const Index v : parse_index_list(a.iters, "--iters")) grid.push_back(static_cast<int>(v));

    const auto rows = compare_solvers(data.X, a.r, a.restarts, grid, a.seed);
    std::string text = "solver,iteration,objective,eps_w,eps_h\n";
    for (const auto& row : rows)
        text += fmt::format("{},{},{},{},{}\n", to_string(row.solver), row.iteration, io::format_number(row.objective),
                            io::format_number(row.eps_w), io::format_number(row.eps_h));
    fs::create_directories(a.out_dir);
    io::write_text_atomic(fs::path(a.out_dir) / "trace.csv", text);
    out << text;
    return 0;
}

// ---- fixture ------------------------------------------------------------

struct FixtureArgs {
    std::string kind, out_dir;
    double kappa = 0.1;
    int copies = 5, rows = 16, cols = 8;
    std::uint64_t seed = 0;
};

int cmd_fixture(const FixtureArgs& a, std::ostream& out) {
    DataMatrix data;
    std::optional<std::vector<int>> truth;
    if (a.kind == "two-pattern") {
        TwoPatternFixture f = two_pattern_fixture(a.kappa, a.copies);
        data = std::move(f.data);
        truth = std::move(f.truth);
    } else if (a.kind == "swimmer") {
        data = generate_swimmer();
    } else if (a.kind == "rank-one") {
        data = rank_one_fixture(a.rows, a.cols, a.seed);
        truth = std::vector<int>(static_cast<std::size_t>(a.cols), 1);
    } else {
        fail(ErrorKind::invalid_argument, fmt::format("unknown fixture '{}'", a.kind));
    }
    io::write_data_matrix(a.out_dir, data);
    if (truth) io::write_text_atomic(fs::path(a.out_dir) / "truth.json", labels_json(*truth));
    out << json{{"rows", data.X.rows()}, {"T", data.length()}}.dump() << "\n";
    return 0;
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::numerical ? 1 : 2; }

void report(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Clustering of time-indexed graph sequences by non-negative factorization with AICc model selection",
                 "gclust"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Bin an event file into the n^2 x T data matrix (X.csv, meta.json)");
    c_ingest->add_option("--events", ingest.events, "Event file: time source target [action]")->required();
    c_ingest->add_option("--bins", ingest.bins, "Number of equal-width time bins (0: use --boundaries)");
    c_ingest->add_option("--horizon", ingest.horizon, "End of the last bin (default: just past the last event)");
    c_ingest->add_option("--boundaries", ingest.boundaries, "File of bin boundaries tau_0 = 0 < ... < tau_T");
    c_ingest->add_option("--map", ingest.map, "Vertex contraction map: vertex group pairs");
    c_ingest->add_option("--vertices", ingest.vertices, "Vertex count (default: max id + 1)");
    c_ingest->add_option("--delimiter", ingest.delimiter, "Field delimiter: tab, comma or space");
    c_ingest->add_flag("--header", ingest.header, "Skip the first line");
    c_ingest->add_flag("--strict,!--skip-bad-lines", ingest.skip_bad, "Reject (default) or skip malformed lines")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    c_ingest->add_flag("--symmetrize", ingest.symmetrize, "Fold G + G^T before contraction");
    c_ingest->add_option("--out-dir", ingest.out_dir, "Output directory")->required();

    GclustArgs gc;
    auto add_nmf = [](CLI::App* c, NmfArgs& n) {
        c->add_option("--solver", n.solver, "NMF solver: ls (Lee-Seung) or kl (Brunet-style)")
            ->check(CLI::IsMember({"ls", "kl"}));
        c->add_option("--restarts", n.restarts, "NMF restarts per inner dimension");
        c->add_option("--seed", n.seed, "Base seed for every random choice");
        c->add_option("--tol", n.tol, "Relative objective change that stops NMF (0: run --max-iter)");
        c->add_option("--max-iter", n.max_iter, "NMF iteration cap");
        c->add_option("--alpha", n.alpha, "LS penalty weight on ||W||_F^2");
        c->add_option("--beta", n.beta, "LS penalty weight on ||H||_F^2");
    };
    auto* c_gclust = app.add_subcommand("gclust", "Cluster the columns of a data matrix; score by AICc");
    c_gclust->add_option("--input", gc.input, "Data matrix CSV")->required();
    c_gclust->add_option("--meta", gc.meta, "Metadata JSON (default: meta.json next to the input, if present)");
    c_gclust->add_option("--r", gc.r, "Inner dimension");
    c_gclust->add_flag("--select-dim", gc.select_dim, "Select the inner dimension by minimum AICc");
    c_gclust->add_option("--r-max", gc.r_max, "Largest dimension tried by --select-dim (default: min(T, 12))");
    c_gclust->add_option("--r-min", gc.r_min, "Smallest dimension tried by --select-dim");
    add_nmf(c_gclust, gc.nmf);
    c_gclust->add_option("--out-dir", gc.out_dir, "Output directory")->required();

    DiagnoseArgs dg;
    auto* c_diag = app.add_subcommand("diagnose", "Residual singular values of a contraction against a Gaussian baseline");
    c_diag->add_option("--input", dg.input, "Data matrix CSV")->required();
    c_diag->add_option("--meta", dg.meta, "Metadata JSON (default: meta.json next to the input, if present)");
    c_diag->add_option("--map", dg.map, "Vertex contraction map applied to the aggregated graph");
    c_diag->add_option("--sketch", dg.sketch, "Comma-separated 0-based rows kept in the sketch (default: all)");
    c_diag->add_option("--baseline-reps", dg.baseline_reps, "Monte Carlo replicates of the Gaussian baseline");
    c_diag->add_option("--seed", dg.seed, "Baseline seed");
    c_diag->add_option("--cache-dir", dg.cache_dir, "Baseline cache directory (default: <out-dir>/cache)");
    c_diag->add_option("--usvt-constant", dg.usvt_constant, "USVT threshold constant c in sqrt(c * min(rows, cols))");
    c_diag->add_option("--clip-percentile", dg.clip_percentile, "Entries are clipped at this percentile before USVT");
    c_diag->add_option("--floor", dg.floor, "Lower bound applied to the estimated mean");
    c_diag->add_option("--out-dir", dg.out_dir, "Output directory")->required();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Draw one two-pattern block-model sequence (X.csv, meta.json, truth.json)");
    c_sim->add_option("--rho", sim.rho, "Intensity scale in (0, 1]");
    c_sim->add_option("--m", sim.m, "Vertices per block");
    c_sim->add_option("--T", sim.T, "Number of time steps");
    c_sim->add_flag("--contract", sim.contract, "Merge each block into one vertex");
    c_sim->add_option("--seed", sim.seed, "Simulation seed");
    c_sim->add_option("--out-dir", sim.out_dir, "Output directory")->required();

    BenchmarkArgs bench;
    auto* c_bench = app.add_subcommand("benchmark", "Run the Monte Carlo comparison (report.csv)");
    c_bench->add_option("--config", bench.config, "Experiment JSON (default: built-in grid)");
    c_bench->add_option("--replicates", bench.replicates, "Override the replicate count");
    c_bench->add_option("--seed", bench.seed, "Override the base seed");
    c_bench->add_option("--out-dir", bench.out_dir, "Output directory")->required();

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("nmf-compare", "Median objective and fixed-point errors of both solvers (trace.csv)");
    c_cmp->add_option("--input", cmp.input, "Data matrix CSV")->required();
    c_cmp->add_option("--meta", cmp.meta, "Metadata JSON");
    c_cmp->add_option("--r", cmp.r, "Inner dimension")->required();
    c_cmp->add_option("--restarts", cmp.restarts, "Restarts per solver");
    c_cmp->add_option("--iters", cmp.iters, "Comma-separated iteration checkpoints");
    c_cmp->add_option("--seed", cmp.seed, "Base seed");
    c_cmp->add_option("--out-dir", cmp.out_dir, "Output directory")->required();

    FixtureArgs fx;
    auto* c_fix = app.add_subcommand("fixture", "Write a built-in data matrix: two-pattern, swimmer or rank-one");
    c_fix->add_option("kind", fx.kind, "Fixture name")->required()->check(
        CLI::IsMember({"two-pattern", "swimmer", "rank-one"}));
    c_fix->add_option("--kappa", fx.kappa, "Overlap weight of the two-pattern fixture");
    c_fix->add_option("--copies", fx.copies, "Columns per pattern in the two-pattern fixture");
    c_fix->add_option("--rows", fx.rows, "Rows of the rank-one fixture");
    c_fix->add_option("--cols", fx.cols, "Columns of the rank-one fixture");
    c_fix->add_option("--seed", fx.seed, "Seed of the rank-one fixture");
    c_fix->add_option("--out-dir", fx.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << e.what() << "\n";
            return 0;
        }
        report(err, "invalid_argument", e.what());
        return 2;
    }

    try {
        if (*c_ingest) return cmd_ingest(ingest, out);
        if (*c_gclust) return cmd_gclust(gc, out);
        if (*c_diag) return cmd_diagnose(dg, out);
        if (*c_sim) return cmd_simulate(sim, out);
        if (*c_bench) return cmd_benchmark(bench, out);
        if (*c_cmp) return cmd_nmf_compare(cmp, out);
        if (*c_fix) return cmd_fixture(fx, out);
    } catch (const Error& e) {
        report(err, to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        report(err, "io", e.what());
        return 2;
    } catch (const std::exception& e) {
        report(err, "internal", e.what());
        return 1;
    }
    return 1;
}

}  // namespace gclust::cli
