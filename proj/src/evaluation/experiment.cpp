#include "gclust/evaluation/experiment.hpp"

#include "gclust/error.hpp"
#include "gclust/evaluation/ari.hpp"
#include "gclust/evaluation/baselines.hpp"
#include "gclust/evaluation/simulate.hpp"
#include "gclust/io.hpp"
#include "gclust/model_selection.hpp"
#include "gclust/parallel.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace gclust {

const char* to_string(Method method) noexcept {
    switch (method) {
        case Method::aicc_nmf: return "aicc_nmf";
        case Method::pamk_dist: return "pamk_dist";
        case Method::gmm_pca: return "gmm_pca";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    for (const Method m : {Method::aicc_nmf, Method::pamk_dist, Method::gmm_pca})
        if (name == to_string(m)) return m;
    fail(ErrorKind::invalid_argument, fmt::format("unknown method '{}'", name));
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    ExperimentConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("rho")) c.rho = j["rho"].get<std::vector<double>>();
        if (j.contains("contraction")) c.contraction = j["contraction"].get<std::vector<bool>>();
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
        }
        c.replicates = j.value("replicates", c.replicates);
        c.m = j.value("m", c.m);
        c.T = j.value("T", c.T);
        c.r_max = j.value("r_max", c.r_max);
        c.restarts = j.value("restarts", c.restarts);
        if (j.contains("solver")) c.solver = parse_solver(j["solver"].get<std::string>());
        c.max_iter = j.value("max_iter", c.max_iter);
        c.pamk_k_min = j.value("pamk_k_min", c.pamk_k_min);
        c.pamk_k_max = j.value("pamk_k_max", c.pamk_k_max);
        c.gmm_k_min = j.value("gmm_k_min", c.gmm_k_min);
        c.gmm_k_max = j.value("gmm_k_max", c.gmm_k_max);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, fmt::format("experiment config: {}", e.what()));
    }
    require(!c.rho.empty() && !c.contraction.empty() && !c.methods.empty(), ErrorKind::invalid_argument,
            "experiment grid is empty");
    require(c.replicates >= 1 && c.restarts >= 1 && c.max_iter >= 1, ErrorKind::invalid_argument,
            "replicates, restarts and max_iter must be positive");
    return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["rho"] = c.rho;
    j["contraction"] = c.contraction;
    std::vector<std::string> methods;
    for (const Method m : c.methods) methods.emplace_back(to_string(m));
    j["methods"] = methods;
    j["replicates"] = c.replicates;
    j["m"] = c.m;
    j["T"] = c.T;
    j["r_max"] = c.r_max;
    j["restarts"] = c.restarts;
    j["solver"] = to_string(c.solver);
    j["max_iter"] = c.max_iter;
    j["pamk_k_min"] = c.pamk_k_min;
    j["pamk_k_max"] = c.pamk_k_max;
    j["gmm_k_min"] = c.gmm_k_min;
    j["gmm_k_max"] = c.gmm_k_max;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

const ExperimentCell& ExperimentReport::at(double rho, bool contraction, Method method) const {
    for (const auto& c : cells)
        if (c.rho == rho && c.contraction == contraction && c.method == method) return c;
    fail(ErrorKind::out_of_range, fmt::format("no cell for rho = {}, contraction = {}, method = {}", rho, contraction,
                                              to_string(method)));
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "rho,contraction,method,mean_ari,stderr,reps\n";
    for (const auto& c : cells)
        out << io::format_number(c.rho) << ',' << (c.contraction ? "within_block" : "none") << ','
            << to_string(c.method) << ',' << io::format_number(c.mean_ari) << ',' << io::format_number(c.stderr_ari)
            << ',' << c.reps << '\n';
    return out.str();
}

namespace {

std::vector<int> run_method(Method method, const ExperimentConfig& c, const GraphSequence& g, std::uint64_t seed) {
    const DataMatrix data = vectorize(g);
    switch (method) {
        case Method::aicc_nmf: {
            GclustOptions options;
            options.solver = c.solver;
            options.restarts = c.restarts;
            options.seed = seed;
            options.nmf.max_iter = c.max_iter;
            const Index r_max = std::min<Index>(c.r_max, std::min(data.X.rows(), data.X.cols()));
            const auto dim = get_gclust_model_dim(data, r_max, options);
            return dim.fits[static_cast<std::size_t>(dim.r_hat - 1)].labels.values;
        }
        case Method::pamk_dist:
            return pamk(pairwise_frobenius(g), c.pamk_k_min, std::min(c.pamk_k_max, g.length() - 1)).labels;
        case Method::gmm_pca:
            return gmm_pca_cluster(data.X, c.gmm_k_min, std::min(c.gmm_k_max, g.length() - 1), seed).labels;
    }
    return {};
}

}  // namespace

ExperimentReport run_monte_carlo(const ExperimentConfig& c) {
    struct Job {
        double rho;
        bool contraction;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    std::uint64_t cell = 0;
    for (const double rho : c.rho)
        for (const bool contraction : c.contraction) {
            const std::uint64_t cell_seed = derive_seed(c.seed, cell++);
            for (int rep = 0; rep < c.replicates; ++rep)
                jobs.push_back({rho, contraction, derive_seed(cell_seed, static_cast<std::uint64_t>(rep))});
        }

    const std::size_t methods = c.methods.size();
    std::vector<double> ari(jobs.size() * methods, 0.0);
    parallel_for(jobs.size(), [&](std::size_t j) {
        const Job& job = jobs[j];
        const BlockModelSpec spec = study_model(c.m, c.T, job.rho);
        GraphSequence g = simulate_block_poisson(spec, job.seed);
        if (job.contraction) g = contract_vertices(g, within_block_contraction(spec.blocks(), spec.m));
        for (std::size_t k = 0; k < methods; ++k) {
            std::vector<int> labels;
            try {
                labels = run_method(c.methods[k], c, g, derive_seed(job.seed, k + 1));
            } catch (const Error& e) {
                // A replicate the method cannot process (e.g. an empty time slice) scores as one cluster.
                if (e.kind() != ErrorKind::numerical && e.kind() != ErrorKind::invalid_argument) throw;
                labels.assign(spec.schedule.size(), 1);
            }
            ari[j * methods + k] = adjusted_rand_index(spec.schedule, labels);
        }
    });

    ExperimentReport report;
    std::size_t j = 0;
    for (const double rho : c.rho)
        for (const bool contraction : c.contraction) {
            for (std::size_t k = 0; k < methods; ++k) {
                ExperimentCell out{rho, contraction, c.methods[k], 0.0, 0.0, c.replicates, {}};
                for (int rep = 0; rep < c.replicates; ++rep) out.ari.push_back(ari[(j + rep) * methods + k]);
                double sum = 0.0, sq = 0.0;
                for (const double a : out.ari) sum += a;
                out.mean_ari = sum / c.replicates;
                for (const double a : out.ari) sq += (a - out.mean_ari) * (a - out.mean_ari);
                out.stderr_ari = c.replicates > 1 ? std::sqrt(sq / (c.replicates - 1) / c.replicates) : 0.0;
                report.cells.push_back(std::move(out));
            }
            j += static_cast<std::size_t>(c.replicates);
        }
    return report;
}

}  // namespace gclust
