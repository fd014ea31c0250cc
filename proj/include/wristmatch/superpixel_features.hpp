#ifndef WRISTMATCH_SUPERPIXEL_FEATURES_HPP
#define WRISTMATCH_SUPERPIXEL_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "wristmatch/color.hpp"
#include "wristmatch/gradients.hpp"
#include "wristmatch/matrix.hpp"
#include "wristmatch/slic.hpp"

namespace wristmatch {

/// Per-superpixel statistics dimensionality: (18 color + 7 gradient) planes
/// x (mean, std) for the superpixel itself and its 8 nearest neighbors.
constexpr int kSuperpixelFeatureDim = 450;

/// One row of 450 statistics per superpixel.
///
/// Layout per 50-value block: plane-major over the 18 color planes then the
/// 7 gradient maps, each contributing (mean, population std). Block 0 is the
/// superpixel itself; blocks 1..8 are the 8 nearest superpixels by centroid
/// distance, nearest first (ties by lower id). When fewer than 8 neighbors
/// exist the nearest one is repeated; a lone superpixel repeats itself.
/// Color statistics run over the [0,1]-rescaled planes; gradient statistics
/// run over the raw signed responses.
inline Matrix superpixel_features(const SuperpixelLabeling& sp,
                                  const ColorStack& stack,
                                  const GradientMapSet& grads) {
    if (sp.width != stack.width() || sp.height != stack.height())
        throw UsageError("superpixel_features: labeling/stack size mismatch");
    if (grads.maps[0].width != sp.width || grads.maps[0].height != sp.height)
        throw UsageError("superpixel_features: labeling/gradient size mismatch");

    constexpr int kPlanes = ColorStack::kPlaneCount + GradientMapSet::kMapCount;
    const int n = sp.count;

    // Accumulate sums and squared sums per (superpixel, plane).
    std::vector<double> sum(static_cast<std::size_t>(n) * kPlanes, 0.0);
    std::vector<double> sumsq(static_cast<std::size_t>(n) * kPlanes, 0.0);
    auto accumulate = [&](const ImagePlane& plane, int pi) {
        for (std::size_t i = 0; i < plane.size(); ++i) {
            const int l = sp.labels[i];
            const double v = plane.data[i];
            sum[static_cast<std::size_t>(l) * kPlanes + pi] += v;
            sumsq[static_cast<std::size_t>(l) * kPlanes + pi] += v * v;
        }
    };
    for (int p = 0; p < ColorStack::kPlaneCount; ++p)
        accumulate(stack.planes[p], p);
    for (int m = 0; m < GradientMapSet::kMapCount; ++m)
        accumulate(grads.maps[m], ColorStack::kPlaneCount + m);

    // stats[l] = the 50 per-superpixel values (mean, population std per plane).
    Matrix stats(static_cast<std::size_t>(n), 2 * kPlanes);
    for (int l = 0; l < n; ++l) {
        const double cnt = sp.sizes[l];
        for (int p = 0; p < kPlanes; ++p) {
            const double mean = sum[static_cast<std::size_t>(l) * kPlanes + p] / cnt;
            const double var =
                std::max(0.0, sumsq[static_cast<std::size_t>(l) * kPlanes + p] / cnt -
                                  mean * mean);
            stats.at(l, 2 * p) = mean;
            stats.at(l, 2 * p + 1) = std::sqrt(var);
        }
    }

    Matrix out(static_cast<std::size_t>(n), kSuperpixelFeatureDim);
    std::vector<std::pair<double, int>> order;
    for (int l = 0; l < n; ++l) {
        // 8 nearest neighbors by centroid distance, nearest first, id ties low.
        order.clear();
        for (int o = 0; o < n; ++o) {
            if (o == l) continue;
            const double dr = sp.centroid_row[l] - sp.centroid_row[o];
            const double dc = sp.centroid_col[l] - sp.centroid_col[o];
            order.emplace_back(dr * dr + dc * dc, o);
        }
        std::sort(order.begin(), order.end());
        int neighbors[8];
        for (int s = 0; s < 8; ++s) {
            if (order.empty())
                neighbors[s] = l;
            else if (static_cast<std::size_t>(s) < order.size())
                neighbors[s] = order[s].second;
            else
                neighbors[s] = order[0].second; // pad by repeating the nearest
        }
        std::copy(stats.row(l), stats.row(l) + 2 * kPlanes, out.row(l));
        for (int s = 0; s < 8; ++s)
            std::copy(stats.row(neighbors[s]), stats.row(neighbors[s]) + 2 * kPlanes,
                      out.row(l) + (s + 1) * 2 * kPlanes);
    }
    return out;
}

} // namespace wristmatch

#endif
