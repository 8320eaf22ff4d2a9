#include "gclust/evaluation/ari.hpp"

#include "gclust/error.hpp"

#include <map>
#include <utility>

namespace gclust {

namespace {

double choose2(double x) { return 0.5 * x * (x - 1.0); }

}  // namespace

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    require(a.size() == b.size(), ErrorKind::invalid_argument, "labelings differ in length");
    require(a.size() >= 2, ErrorKind::invalid_argument, "ARI needs at least two items");
    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cells[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, n] : cells) index += choose2(n);
    for (const auto& [key, n] : rows) sum_rows += choose2(n);
    for (const auto& [key, n] : cols) sum_cols += choose2(n);
    const double total = choose2(static_cast<double>(a.size()));
    const double expected = sum_rows * sum_cols / total;
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

}  // namespace gclust
