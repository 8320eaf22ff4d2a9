#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace gclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Derives a child seed from a base seed and an index (splitmix64 finalizer).
/// Used everywhere a restart, replicate or cell needs its own reproducible stream.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace gclust
