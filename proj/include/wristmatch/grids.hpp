#ifndef WRISTMATCH_GRIDS_HPP
#define WRISTMATCH_GRIDS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "wristmatch/errors.hpp"

namespace wristmatch {

/// Half-open pixel block [r0, r1) x [c0, c1).
struct GridBlock {
    int r0 = 0;
    int c0 = 0;
    int r1 = 0;
    int c1 = 0;

    int height() const { return r1 - r0; }
    int width() const { return c1 - c0; }
    int area() const { return height() * width(); }
};

/// One of the seven block layouts over the ROI. The first two grids carry
/// the small blocks (rotation-invariant LBP), the other five the large ones.
struct GridSpec {
    const char* name;
    int cols;
    int rows;

    int count() const { return cols * rows; }
};

inline constexpr int kGridCount = 7;
inline constexpr int kSmallGridCount = 2;

inline constexpr GridSpec kGrids[kGridCount] = {
    {"b1", 8, 5}, {"b2", 6, 5}, {"b3", 5, 4}, {"b4", 4, 4},
    {"b5", 4, 3}, {"b6", 4, 2}, {"b7", 3, 2},
};

inline constexpr int kSmallGridBlocks = 40 + 30;                    // b1, b2
inline constexpr int kLargeGridBlocks = 20 + 16 + 12 + 8 + 6;       // b3..b7
inline constexpr int kTotalGridBlocks = kSmallGridBlocks + kLargeGridBlocks;

static_assert(kSmallGridBlocks == 70);
static_assert(kLargeGridBlocks == 62);
static_assert(kTotalGridBlocks == 132);

/// Cut a w x h plane into the grid's blocks, row-major. Boundaries are
/// rounded fractions i*dim/n, so the blocks tile the plane exactly.
inline std::vector<GridBlock> grid_blocks(const GridSpec& spec, int w, int h) {
    if (w < spec.cols || h < spec.rows)
        throw UsageError(std::string("grid ") + spec.name +
                         " does not fit the plane");
    auto edge = [](int i, int n, int dim) {
        return static_cast<int>(std::lround(static_cast<double>(i) * dim / n));
    };
    std::vector<GridBlock> blocks;
    blocks.reserve(static_cast<std::size_t>(spec.count()));
    for (int br = 0; br < spec.rows; ++br)
        for (int bc = 0; bc < spec.cols; ++bc)
            blocks.push_back({edge(br, spec.rows, h), edge(bc, spec.cols, w),
                              edge(br + 1, spec.rows, h),
                              edge(bc + 1, spec.cols, w)});
    return blocks;
}

} // namespace wristmatch

#endif
