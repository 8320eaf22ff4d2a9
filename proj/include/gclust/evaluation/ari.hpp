#pragma once

#include <vector>

namespace gclust {

/// Hubert-Arabie adjusted Rand index of two labelings of the same items.
/// Label values are arbitrary integers. Returns 1 when both partitions are
/// trivial in the same way (the index is undefined there).
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace gclust
