#pragma once

// The simulation study: block-model graph sequences under an intensity grid,
// with and without within-block contraction, scored by ARI against the true
// time labels for three model-selection procedures.

#include "gclust/nmf.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gclust {

enum class Method { aicc_nmf, pamk_dist, gmm_pca };
const char* to_string(Method method) noexcept;
Method parse_method(const std::string& name);

struct ExperimentConfig {
    std::vector<double> rho{0.25, 0.5, 1.0};
    std::vector<bool> contraction{false, true};
    std::vector<Method> methods{Method::aicc_nmf, Method::pamk_dist, Method::gmm_pca};
    int replicates = 50;
    Index m = 5;  // vertices per block; n = 5m = 25
    int T = 10;
    int r_max = 4;
    int restarts = 20;
    Solver solver = Solver::ls;
    int max_iter = 2000;
    int pamk_k_min = 2;
    int pamk_k_max = 5;
    int gmm_k_min = 1;
    int gmm_k_max = 5;
    std::uint64_t seed = 0;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct ExperimentCell {
    double rho = 0.0;
    bool contraction = false;
    Method method = Method::aicc_nmf;
    double mean_ari = 0.0;
    double stderr_ari = 0.0;
    int reps = 0;
    std::vector<double> ari;  // per replicate
};

struct ExperimentReport {
    std::vector<ExperimentCell> cells;

    const ExperimentCell& at(double rho, bool contraction, Method method) const;
    std::string to_csv() const;
};

/// Replicate j of grid cell c uses seed derive_seed(derive_seed(seed, c), j).
ExperimentReport run_monte_carlo(const ExperimentConfig& config);

}  // namespace gclust
