#ifndef WRISTMATCH_LBP_HPP
#define WRISTMATCH_LBP_HPP

#include <array>
#include <cmath>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/grids.hpp"
#include "wristmatch/image.hpp"

namespace wristmatch {

inline constexpr int kLbpPoints = 8;

namespace detail {

/// Circular 0/1 transition count of an 8-bit code.
inline int lbp_transitions(int code) {
    int t = 0;
    for (int p = 0; p < 8; ++p) {
        const int a = (code >> p) & 1;
        const int b = (code >> ((p + 1) % 8)) & 1;
        t += a != b;
    }
    return t;
}

/// Rotation-invariant uniform map: uniform codes (at most two transitions)
/// collapse to their popcount 0..8, everything else to bin 9.
inline const std::array<int, 256>& lbp_riu2_map() {
    static const std::array<int, 256> map = [] {
        std::array<int, 256> m{};
        for (int code = 0; code < 256; ++code) {
            if (lbp_transitions(code) <= 2) {
                int ones = 0;
                for (int p = 0; p < 8; ++p) ones += (code >> p) & 1;
                m[static_cast<std::size_t>(code)] = ones;
            } else {
                m[static_cast<std::size_t>(code)] = 9;
            }
        }
        return m;
    }();
    return map;
}

/// Uniform map: the 58 uniform codes get bins 0..57 in increasing code
/// order; every non-uniform code falls into catch-all bin 58.
inline const std::array<int, 256>& lbp_u2_map() {
    static const std::array<int, 256> map = [] {
        std::array<int, 256> m{};
        int next = 0;
        for (int code = 0; code < 256; ++code)
            m[static_cast<std::size_t>(code)] =
                lbp_transitions(code) <= 2 ? next++ : 58;
        return m;
    }();
    return map;
}

} // namespace detail

inline constexpr int kRiu2Bins = 10;
inline constexpr int kU2Bins = 59;

/// Raw 8-point LBP code at (row, col): neighbor p sits at angle 2*pi*p/8 on
/// the radius-R circle (x right, y up), sampled bilinearly. A neighbor
/// counts as 1 when it is at least as bright as the center; the tiny slack
/// absorbs interpolation round-off so exact ties (constant patches) stay 1.
inline int lbp_code(const ImagePlane& p, int row, int col, double radius) {
    constexpr double kTieSlack = 1e-9;
    constexpr double kPi = 3.141592653589793238462643383279502884;
    const double center = p.at(row, col);
    int code = 0;
    for (int k = 0; k < kLbpPoints; ++k) {
        const double ang = 2.0 * kPi * k / kLbpPoints;
        const double nr = row - radius * std::sin(ang);
        const double nc = col + radius * std::cos(ang);
        const double value = sample_bilinear(p, nr, nc);
        if (value >= center - kTieSlack) code |= 1 << k;
    }
    return code;
}

namespace detail {

/// Append one histogram per block. Codes are taken only where the whole
/// sampling circle fits inside the block, so every block is independent of
/// its surroundings; bilinear samples still never leave the block.
inline void lbp_block_hists(const ImagePlane& plane,
                            const std::vector<GridBlock>& blocks, int radius,
                            const std::array<int, 256>& map, int bins,
                            std::vector<double>& out) {
    for (const auto& b : blocks) {
        if (b.height() < 2 * radius + 1 || b.width() < 2 * radius + 1)
            throw UsageError("lbp: block smaller than the sampling circle");
        const std::size_t base = out.size();
        out.resize(base + static_cast<std::size_t>(bins), 0.0);
        for (int r = b.r0 + radius; r < b.r1 - radius; ++r)
            for (int c = b.c0 + radius; c < b.c1 - radius; ++c) {
                const int code = lbp_code(plane, r, c, radius);
                out[base + static_cast<std::size_t>(
                                map[static_cast<std::size_t>(code)])] += 1.0;
            }
    }
}

} // namespace detail

/// 10-bin rotation-invariant uniform histograms (radius 1), one per block.
inline std::vector<double> lbp_riu2_hist(const ImagePlane& plane,
                                         const std::vector<GridBlock>& blocks) {
    std::vector<double> out;
    out.reserve(blocks.size() * kRiu2Bins);
    detail::lbp_block_hists(plane, blocks, 1, detail::lbp_riu2_map(),
                            kRiu2Bins, out);
    return out;
}

/// 59-bin uniform histograms (radius 2), one per block.
inline std::vector<double> lbp_u2_hist(const ImagePlane& plane,
                                       const std::vector<GridBlock>& blocks) {
    std::vector<double> out;
    out.reserve(blocks.size() * kU2Bins);
    detail::lbp_block_hists(plane, blocks, 2, detail::lbp_u2_map(), kU2Bins,
                            out);
    return out;
}

} // namespace wristmatch

#endif
