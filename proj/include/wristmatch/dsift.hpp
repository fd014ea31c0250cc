#ifndef WRISTMATCH_DSIFT_HPP
#define WRISTMATCH_DSIFT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/image.hpp"

namespace wristmatch {

inline constexpr int kSiftWindow = 64;
inline constexpr int kSiftStep = 16;
inline constexpr int kSiftCells = 4;   // per axis
inline constexpr int kSiftOriBins = 8;
inline constexpr int kSiftDescriptorDim =
    kSiftCells * kSiftCells * kSiftOriBins; // 128

namespace detail {

/// One SIFT descriptor for the 64x64 window whose top-left corner is
/// (y0, x0). Gradients are precomputed for the whole image; the Gaussian
/// window (sigma = half the window) sits at the window center. Standard
/// trilinear soft-binning into a 4x4 grid of 8-bin orientation histograms
/// (Lowe's layout: cell-major rows, orientation innermost), then
/// L2-normalize, clamp at 0.2, renormalize.
inline void sift_descriptor(const std::vector<double>& mag,
                            const std::vector<double>& ang, int width,
                            int y0, int x0, double* out) {
    constexpr double kPi = 3.141592653589793238462643383279502884;
    constexpr int kCellPx = kSiftWindow / kSiftCells;
    const double center = kSiftWindow / 2.0 - 0.5;
    const double sigma = kSiftWindow / 2.0;

    for (int i = 0; i < kSiftDescriptorDim; ++i) out[i] = 0.0;

    for (int ly = 0; ly < kSiftWindow; ++ly)
        for (int lx = 0; lx < kSiftWindow; ++lx) {
            const std::size_t at =
                static_cast<std::size_t>(y0 + ly) * width + (x0 + lx);
            const double m = mag[at];
            if (m == 0.0) continue;
            const double dy = ly - center, dx = lx - center;
            const double w =
                m * std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));

            const double cy = (ly + 0.5) / kCellPx - 0.5;
            const double cx = (lx + 0.5) / kCellPx - 0.5;
            const double ob = ang[at] / (2.0 * kPi) * kSiftOriBins;
            const int cy0 = static_cast<int>(std::floor(cy));
            const int cx0 = static_cast<int>(std::floor(cx));
            const int ob0 = static_cast<int>(std::floor(ob));
            const double fy = cy - cy0, fx = cx - cx0, fo = ob - ob0;

            for (int iy = 0; iy < 2; ++iy) {
                const int ry = cy0 + iy;
                if (ry < 0 || ry >= kSiftCells) continue;
                const double wy = w * (iy ? fy : 1.0 - fy);
                for (int ix = 0; ix < 2; ++ix) {
                    const int rx = cx0 + ix;
                    if (rx < 0 || rx >= kSiftCells) continue;
                    const double wx = wy * (ix ? fx : 1.0 - fx);
                    for (int io = 0; io < 2; ++io) {
                        const int ro = (ob0 + io) % kSiftOriBins;
                        out[(ry * kSiftCells + rx) * kSiftOriBins + ro] +=
                            wx * (io ? fo : 1.0 - fo);
                    }
                }
            }
        }

    double ss = 0.0;
    for (int i = 0; i < kSiftDescriptorDim; ++i) ss += out[i] * out[i];
    if (ss < 1e-24) { // featureless window stays a zero vector
        for (int i = 0; i < kSiftDescriptorDim; ++i) out[i] = 0.0;
        return;
    }
    double inv = 1.0 / std::sqrt(ss);
    ss = 0.0;
    for (int i = 0; i < kSiftDescriptorDim; ++i) {
        out[i] = std::min(out[i] * inv, 0.2);
        ss += out[i] * out[i];
    }
    inv = 1.0 / std::sqrt(ss);
    for (int i = 0; i < kSiftDescriptorDim; ++i) out[i] *= inv;
}

} // namespace detail

/// Dense SIFT over a fixed lattice: 64x64 windows every 16 px in both
/// axes, descriptors concatenated row-major over window sites. A 128x80
/// image yields 2 x 5 sites = 1280 values.
inline std::vector<double> dense_sift(const ImagePlane& gray) {
    constexpr double kPi = 3.141592653589793238462643383279502884;
    if (gray.width < kSiftWindow || gray.height < kSiftWindow)
        throw UsageError("dense sift: image smaller than the 64x64 window");

    const int w = gray.width, h = gray.height;
    std::vector<double> mag(static_cast<std::size_t>(w) * h);
    std::vector<double> ang(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double gx = gray.at_clamped(r, c + 1) - gray.at_clamped(r, c - 1);
            const double gy = gray.at_clamped(r + 1, c) - gray.at_clamped(r - 1, c);
            const std::size_t at = static_cast<std::size_t>(r) * w + c;
            mag[at] = std::sqrt(gx * gx + gy * gy);
            double a = std::atan2(gy, gx);
            if (a < 0.0) a += 2.0 * kPi;
            if (a >= 2.0 * kPi) a = 0.0;
            ang[at] = a;
        }

    std::vector<double> out;
    for (int y0 = 0; y0 + kSiftWindow <= h; y0 += kSiftStep)
        for (int x0 = 0; x0 + kSiftWindow <= w; x0 += kSiftStep) {
            const std::size_t base = out.size();
            out.resize(base + kSiftDescriptorDim);
            detail::sift_descriptor(mag, ang, w, y0, x0, out.data() + base);
        }
    return out;
}

} // namespace wristmatch

#endif
