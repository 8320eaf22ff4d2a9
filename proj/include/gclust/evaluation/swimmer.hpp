#pragma once

#include "gclust/ingest.hpp"

namespace gclust {

inline constexpr int kSwimmerHeight = 20;
inline constexpr int kSwimmerWidth = 11;

/// Binary 220 x 256 matrix: one column per combination of four limbs in four
/// positions each, pixels flattened row-major (row * 11 + col). The torso
/// occupies column 5, rows 5..14; arms attach at row 5, legs at row 14. Every
/// image has 26 lit pixels.
DataMatrix generate_swimmer();

}  // namespace gclust
