#include "gclust/diagnostics.hpp"

#include "gclust/error.hpp"
#include "gclust/io.hpp"
#include "gclust/parallel.hpp"
#include "gclust/random.hpp"
#include "gclust/spectral.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace gclust {

ResidualMatrix residual_matrix(const Matrix& A, const Matrix& mean, MeanSource source) {
    require(A.rows() == mean.rows() && A.cols() == mean.cols(), ErrorKind::invalid_argument,
            fmt::format("observed {}x{} and mean {}x{} differ in shape", A.rows(), A.cols(), mean.rows(), mean.cols()));
    require((mean.array() > 0.0).all(), ErrorKind::invalid_argument, "residuals need strictly positive means");
    return {(A - mean).array() / mean.array().sqrt(), source};
}

Matrix sketch(const Matrix& delta, const std::vector<Index>& rows) {
    require(delta.rows() == delta.cols(), ErrorKind::invalid_argument, "sketch needs a square residual matrix");
    require(!rows.empty(), ErrorKind::invalid_argument, "sketch needs at least one selected row");
    std::set<Index> seen;
    for (const Index r : rows) {
        if (r < 0 || r >= delta.rows())
            fail(ErrorKind::out_of_range, fmt::format("sketch index {} outside [0, {})", r, delta.rows()));
        if (!seen.insert(r).second) fail(ErrorKind::invalid_argument, fmt::format("sketch selects row {} twice", r));
    }
    const auto p = static_cast<Index>(rows.size());
    Matrix out(p, p);
    for (Index a = 0; a < p; ++a)
        for (Index b = 0; b < p; ++b) out(a, b) = delta(rows[a], rows[b]);
    return out;
}

Matrix sketch(const Matrix& delta, const Matrix& S) {
    require(S.cols() == delta.rows(), ErrorKind::invalid_argument, "selection matrix width differs from residual size");
    std::vector<Index> rows;
    for (Index a = 0; a < S.rows(); ++a) {
        Index at = 0;
        const bool basis = (S.row(a).array() == 0.0).count() == S.cols() - 1 && S.row(a).maxCoeff(&at) == 1.0;
        require(basis, ErrorKind::invalid_argument, fmt::format("row {} of S is not a standard basis vector", a));
        rows.push_back(at);
    }
    return sketch(delta, rows);
}

GaussianBaseline gaussian_singular_baseline(Index p, int reps, std::uint64_t seed) {
    require(p >= 1, ErrorKind::invalid_argument, "baseline size p must be positive");
    require(reps >= 100, ErrorKind::invalid_argument, "baseline needs at least 100 replicates");
    const int chunks = 64;
    std::vector<Vector> sum(chunks, Vector::Zero(p)), sum_sq(chunks, Vector::Zero(p));
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        for (int r = static_cast<int>(c); r < reps; r += chunks) {
            const Vector s = singular_values(standard_normal_matrix(p, p, rng));
            sum[c] += s;
            sum_sq[c] += s.cwiseAbs2();
        }
    });
    Vector total = Vector::Zero(p), total_sq = Vector::Zero(p);
    for (int c = 0; c < chunks; ++c) {
        total += sum[c];
        total_sq += sum_sq[c];
    }
    const double n = reps;
    GaussianBaseline out;
    out.p = p;
    out.reps = reps;
    out.seed = seed;
    out.sigma_bar = total / n;
    const Vector var = ((total_sq / n) - out.sigma_bar.cwiseAbs2()).cwiseMax(0.0) * (n / (n - 1.0));
    out.std_error = (var / n).cwiseSqrt();
    return out;
}

std::string baseline_to_json(const GaussianBaseline& b) {
    nlohmann::json j;
    j["p"] = b.p;
    j["reps"] = b.reps;
    j["seed"] = b.seed;
    j["sigma_bar"] = std::vector<double>(b.sigma_bar.data(), b.sigma_bar.data() + b.sigma_bar.size());
    j["stderr"] = std::vector<double>(b.std_error.data(), b.std_error.data() + b.std_error.size());
    return j.dump(2) + "\n";
}

GaussianBaseline baseline_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, fmt::format("baseline cache: {}", e.what()));
    }
    GaussianBaseline b;
    try {
        b.p = j.at("p").get<Index>();
        b.reps = j.at("reps").get<int>();
        b.seed = j.at("seed").get<std::uint64_t>();
        const auto s = j.at("sigma_bar").get<std::vector<double>>();
        const auto e = j.at("stderr").get<std::vector<double>>();
        require(static_cast<Index>(s.size()) == b.p && e.size() == s.size(), ErrorKind::parse,
                "baseline cache: vector lengths differ from p");
        b.sigma_bar = Eigen::Map<const Vector>(s.data(), b.p);
        b.std_error = Eigen::Map<const Vector>(e.data(), b.p);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, fmt::format("baseline cache: {}", e.what()));
    }
    return b;
}

GaussianBaseline cached_gaussian_baseline(const std::filesystem::path& dir, Index p, int reps, std::uint64_t seed) {
    const auto path = dir / fmt::format("gaussian_p{}_reps{}_seed{}.json", p, reps, seed);
    if (std::filesystem::exists(path)) {
        GaussianBaseline b = baseline_from_json(io::read_text(path));
        if (b.p == p && b.reps == reps && b.seed == seed) return b;
    }
    GaussianBaseline b = gaussian_singular_baseline(p, reps, seed);
    std::filesystem::create_directories(dir);
    io::write_text_atomic(path, baseline_to_json(b));
    return b;
}

double contraction_mse(const Matrix& delta_hat, const GaussianBaseline& baseline) {
    require(delta_hat.rows() == delta_hat.cols() && delta_hat.rows() == baseline.p, ErrorKind::invalid_argument,
            fmt::format("residual is {}x{} but the baseline has p = {}", delta_hat.rows(), delta_hat.cols(),
                        baseline.p));
    const Vector s = singular_values(delta_hat);
    return std::sqrt((s - baseline.sigma_bar).squaredNorm() / static_cast<double>(baseline.p));
}

double svt_mse(const Matrix& estimate, const Matrix& true_mean) {
    require(estimate.rows() == true_mean.rows() && estimate.cols() == true_mean.cols(), ErrorKind::invalid_argument,
            "estimate and mean differ in shape");
    require(estimate.size() > 0, ErrorKind::invalid_argument, "empty matrices");
    return (estimate - true_mean).squaredNorm() / static_cast<double>(estimate.size());
}

double ks_statistic_normal(std::vector<double> sample) {
    require(!sample.empty(), ErrorKind::invalid_argument, "KS statistic of an empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = 0.5 * std::erfc(-sample[i] / std::sqrt(2.0));
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha) {
    require(n >= 1, ErrorKind::invalid_argument, "KS critical value needs n >= 1");
    double c = 0.0;
    if (alpha == 0.10) c = 1.224;
    else if (alpha == 0.05) c = 1.358;
    else if (alpha == 0.025) c = 1.480;
    else if (alpha == 0.01) c = 1.628;
    else fail(ErrorKind::invalid_argument, fmt::format("unsupported KS level {}", alpha));
    const double rn = std::sqrt(static_cast<double>(n));
    return c / (rn + 0.12 + 0.11 / rn);
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_argument,
            "correlation needs two equal-length samples of size >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

NormalityReport normality_check(const NormalityConfig& c) {
    require(c.m >= 1 && c.n % c.m == 0, ErrorKind::invalid_argument, "m must divide n");
    require(c.p >= 2 && c.p <= c.m, ErrorKind::invalid_argument, "sketch size must lie in [2, m]");
    require(c.replicates >= 1 && c.scale > 0.0, ErrorKind::invalid_argument, "invalid normality configuration");
    const Index per = c.n / c.m;

    NormalityReport report;
    report.critical = ks_critical_value(static_cast<std::size_t>(c.p * c.p), c.alpha);
    report.ks.resize(static_cast<std::size_t>(c.replicates));
    report.sketches.resize(static_cast<std::size_t>(c.replicates));

    parallel_for(report.ks.size(), [&](std::size_t rep) {
        Rng rng(derive_seed(c.seed, rep));
        const Matrix Y = simplex_positions(c.n, c.latent_dim, rng);
        Matrix A = Matrix::Zero(c.m, c.m);
        Matrix mean = Matrix::Zero(c.m, c.m);
        // Stream one source vertex at a time; only the contracted sums are kept.
        for (Index i = 0; i < c.n; ++i) {
            const Matrix row_mean = c.scale * (Y.row(i) * Y.transpose());
            const Matrix row = poisson_matrix(row_mean, rng);
            for (Index j = 0; j < c.n; ++j) {
                A(i / per, j / per) += row(0, j);
                mean(i / per, j / per) += row_mean(0, j);
            }
        }
        std::vector<Index> groups(static_cast<std::size_t>(c.m));
        std::iota(groups.begin(), groups.end(), Index{0});
        std::shuffle(groups.begin(), groups.end(), rng);
        groups.resize(static_cast<std::size_t>(c.p));
        const Matrix delta = sketch(residual_matrix(A, mean).delta, groups);
        report.ks[rep] = ks_statistic_normal(std::vector<double>(delta.data(), delta.data() + delta.size()));
        report.sketches[rep] = delta;
    });

    std::vector<double> left, right;
    for (const auto& d : report.sketches)
        for (Index u = 0; u < d.rows(); ++u)
            for (Index v = 0; v + 1 < d.cols(); ++v) {
                left.push_back(d(u, v));
                right.push_back(d(u, v + 1));
            }
    report.adjacent_correlation = pearson_correlation(left, right);
    report.rejections = static_cast<int>(
        std::count_if(report.ks.begin(), report.ks.end(), [&](double k) { return k > report.critical; }));
    return report;
}

}  // namespace gclust
