#ifndef WRISTMATCH_TEST_UTIL_HPP
#define WRISTMATCH_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "wristmatch/image.hpp"
#include "wristmatch/rng.hpp"

namespace testutil {

/// Uniform-noise plane in [lo, hi), seeded.
inline wristmatch::ImagePlane noise_plane(int w, int h, std::uint64_t seed,
                                          double lo = 0.0, double hi = 1.0) {
    wristmatch::ImagePlane p(w, h);
    wristmatch::Rng rng(seed);
    for (auto& v : p.data) v = rng.uniform(lo, hi);
    return p;
}

inline wristmatch::RgbImage noise_rgb(int w, int h, std::uint64_t seed) {
    return {noise_plane(w, h, seed * 3 + 0), noise_plane(w, h, seed * 3 + 1),
            noise_plane(w, h, seed * 3 + 2)};
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testutil

#endif
