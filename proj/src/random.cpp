#include "gclust/random.hpp"

#include "gclust/error.hpp"

#include <cmath>

namespace gclust {

Matrix poisson_matrix(const Matrix& mean, Rng& rng) {
    require((mean.array() >= 0.0).all() && mean.allFinite(), ErrorKind::invalid_argument,
            "Poisson means must be finite and non-negative");
    std::poisson_distribution<long long> draw;
    using Param = std::poisson_distribution<long long>::param_type;
    Matrix out(mean.rows(), mean.cols());
    for (Index j = 0; j < mean.cols(); ++j)
        for (Index i = 0; i < mean.rows(); ++i) {
            const double mu = mean(i, j);
            out(i, j) = mu > 0.0 ? static_cast<double>(draw(rng, Param(mu))) : 0.0;
        }
    return out;
}

Matrix standard_normal_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> draw;
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = draw(rng);
    return out;
}

Matrix bernoulli_symmetric(const Matrix& P, Rng& rng) {
    require(P.rows() == P.cols(), ErrorKind::invalid_argument, "edge probabilities must be square");
    require((P.array() >= 0.0).all() && (P.array() <= 1.0).all(), ErrorKind::invalid_argument,
            "edge probabilities must lie in [0, 1]");
    Matrix A = Matrix::Zero(P.rows(), P.cols());
    for (Index j = 0; j < P.cols(); ++j)
        for (Index i = 0; i <= j; ++i) {
            const double a = uniform01(rng) < P(i, j) ? 1.0 : 0.0;
            A(i, j) = a;
            A(j, i) = a;
        }
    return A;
}

Matrix simplex_positions(Index n, Index r, Rng& rng) {
    require(n >= 1 && r >= 1, ErrorKind::invalid_argument, "simplex_positions needs n, r >= 1");
    Matrix Y(n, r);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < r; ++k) Y(i, k) = -std::log1p(-uniform01(rng));
        Y.row(i) /= Y.row(i).sum();
    }
    return Y;
}

}  // namespace gclust
