#pragma once

#include "gclust/random.hpp"
#include "gclust/types.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

namespace gclust::testing {

inline Matrix uniform_matrix(Index rows, Index cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Rng rng(seed);
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) M(i, j) = lo + (hi - lo) * uniform01(rng);
    return M;
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    return standard_normal_matrix(rows, cols, rng);
}

/// Fresh empty directory under the system temp dir, named after the running test.
inline std::filesystem::path scratch_dir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    auto dir = std::filesystem::temp_directory_path() / "gclust_tests" /
               (std::string(info->test_suite_name()) + "." + info->name());
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace gclust::testing
