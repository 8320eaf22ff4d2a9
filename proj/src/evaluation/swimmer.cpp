#include "gclust/evaluation/swimmer.hpp"

#include <array>
#include <utility>
#include <vector>

namespace gclust {

namespace {

using Pixel = std::pair<int, int>;

constexpr int kTorsoColumn = 5;
constexpr int kArmRow = 5;
constexpr int kLegRow = 14;

// Limbs: 0 left arm, 1 right arm, 2 left leg, 3 right leg. Positions: 0 raised
// diagonal, 1 horizontal, 2 lowered diagonal, 3 vertical beside the torso.
// "Outward" is up for arms and down for legs.
std::vector<Pixel> limb_pixels(int limb, int position) {
    const int anchor = limb < 2 ? kArmRow : kLegRow;
    const int side = (limb == 0 || limb == 2) ? -1 : 1;
    const int out = limb < 2 ? -1 : 1;
    std::vector<Pixel> px;
    for (int s = 1; s <= 4; ++s) {
        switch (position) {
            case 0: px.emplace_back(anchor + out * s, kTorsoColumn + side * s); break;
            case 1: px.emplace_back(anchor, kTorsoColumn + side * s); break;
            case 2: px.emplace_back(anchor - out * s, kTorsoColumn + side * s); break;
            default: px.emplace_back(anchor + out * (s + 1), kTorsoColumn + side); break;
        }
    }
    return px;
}

}  // namespace

DataMatrix generate_swimmer() {
    constexpr int pixels = kSwimmerHeight * kSwimmerWidth;
    Matrix X = Matrix::Zero(pixels, 256);
    auto at = [](const Pixel& p) { return p.first * kSwimmerWidth + p.second; };
    for (int c = 0; c < 256; ++c) {
        for (int row = kArmRow; row <= kLegRow; ++row) X(at({row, kTorsoColumn}), c) = 1.0;
        // Column c encodes the positions in base 4, first limb most significant.
        for (int limb = 0; limb < 4; ++limb) {
            const int position = (c >> (2 * (3 - limb))) & 3;
            for (const Pixel& p : limb_pixels(limb, position)) X(at(p), c) = 1.0;
        }
    }
    return DataMatrix::from_matrix(std::move(X));
}

}  // namespace gclust
