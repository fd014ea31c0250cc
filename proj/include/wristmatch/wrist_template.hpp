#ifndef WRISTMATCH_WRIST_TEMPLATE_HPP
#define WRISTMATCH_WRIST_TEMPLATE_HPP

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/gradients.hpp"
#include "wristmatch/wrinkles.hpp"

namespace wristmatch {

inline constexpr int kTemplateHeight = 40;
inline constexpr int kTemplateWidth = 64;
inline constexpr int kPointsPerPolyline = 25;

inline constexpr const char* kRoleNames[4] = {"UP", "DOWN", "W1", "W2"};

/// Uniformly pick `count` points along a polyline by index (nearest-index
/// resampling, endpoints always included). A single-point polyline repeats.
inline std::vector<GridPoint> resample_polyline(
    const std::vector<GridPoint>& poly, int count = kPointsPerPolyline) {
    if (poly.empty()) throw UsageError("resample_polyline: empty polyline");
    if (count < 2) throw UsageError("resample_polyline: need count >= 2");
    std::vector<GridPoint> out;
    out.reserve(count);
    const double last = static_cast<double>(poly.size() - 1);
    for (int t = 0; t < count; ++t) {
        const auto idx = static_cast<std::size_t>(
            std::lround(last * t / static_cast<double>(count - 1)));
        out.push_back(poly[idx]);
    }
    return out;
}

/// 100-point cloud of one key point set (25 per polyline), as (row, col)
/// doubles in the set's own frame. Order: UP, DOWN, W1, W2.
inline std::vector<std::array<double, 2>> keypoint_cloud(const KeyPointSet& kp) {
    std::vector<std::array<double, 2>> cloud;
    cloud.reserve(4 * kPointsPerPolyline);
    const std::vector<GridPoint>* polys[4] = {
        &kp.boundaries.up, &kp.boundaries.down, &kp.wrinkles[0].nodes,
        &kp.wrinkles[1].nodes};
    for (const auto* poly : polys)
        for (const auto& p : resample_polyline(*poly))
            cloud.push_back({static_cast<double>(p.r), static_cast<double>(p.c)});
    return cloud;
}

/// Canonical wrist shape in a fixed 40x64 frame: four 25-point polylines
/// (two boundaries, two wrinkles) fitted to key point heat maps.
struct WristTemplate {
    std::array<std::vector<GridPoint>, 4> polylines; // UP, DOWN, W1, W2

    std::vector<std::array<double, 2>> cloud() const {
        std::vector<std::array<double, 2>> pts;
        for (const auto& poly : polylines)
            for (const auto& p : poly)
                pts.push_back(
                    {static_cast<double>(p.r), static_cast<double>(p.c)});
        return pts;
    }

    /// Mean column of wrinkle 0 or 1, the ROI crop anchors.
    double wrinkle_col(int which) const {
        const auto& poly = polylines[2 + which];
        double s = 0.0;
        for (const auto& p : poly) s += p.c;
        return s / static_cast<double>(poly.size());
    }
};

namespace detail {

/// Rescale a point into the template frame. Columns stretch to the full
/// 64-cell width; rows are already in the 40-row frame for standard inputs.
inline GridPoint to_template_frame(GridPoint p, int w, int h) {
    GridPoint out;
    out.c = w > 1 ? static_cast<int>(std::lround(
                        p.c * (kTemplateWidth - 1.0) / (w - 1.0)))
                  : 0;
    out.r = h == kTemplateHeight
                ? p.r
                : (h > 1 ? static_cast<int>(std::lround(
                               p.r * (kTemplateHeight - 1.0) / (h - 1.0)))
                         : 0);
    return out;
}

} // namespace detail

/// Accumulate per-role key point heat maps over the training sets, smooth
/// with a sigma-1 Gaussian, and fit one ridge polyline per role: boundary
/// ridges take the strongest row of every occupied column, wrinkle ridges
/// the strongest column of every occupied row (wrinkles run top to bottom).
/// Each ridge is resampled to 25 points, 100 template points in total.
inline WristTemplate build_template(const std::vector<KeyPointSet>& sets) {
    if (sets.empty()) throw UsageError("build_template: no key point sets");

    std::array<ImagePlane, 4> heat;
    for (auto& h : heat) h = ImagePlane(kTemplateWidth, kTemplateHeight);
    for (const auto& kp : sets) {
        if (kp.width <= 0 || kp.height <= 0)
            throw UsageError("build_template: key point set without frame");
        auto splat = [&](int role, const std::vector<GridPoint>& pts) {
            for (const auto& p : pts) {
                const GridPoint q =
                    detail::to_template_frame(p, kp.width, kp.height);
                if (q.r >= 0 && q.r < kTemplateHeight && q.c >= 0 &&
                    q.c < kTemplateWidth)
                    heat[role].at(q.r, q.c) += 1.0;
            }
        };
        splat(0, kp.boundaries.up);
        splat(1, kp.boundaries.down);
        splat(2, kp.wrinkles[0].nodes);
        splat(3, kp.wrinkles[1].nodes);
    }

    WristTemplate tpl;
    constexpr double kMassEps = 1e-12;
    for (int role = 0; role < 4; ++role) {
        const ImagePlane smooth = detail::gaussian_blur(heat[role], 1.0);
        std::vector<GridPoint> ridge;
        if (role < 2) {
            for (int c = 0; c < kTemplateWidth; ++c) {
                int best_r = -1;
                double best = kMassEps;
                for (int r = 0; r < kTemplateHeight; ++r)
                    if (smooth.at(r, c) > best) {
                        best = smooth.at(r, c);
                        best_r = r;
                    }
                if (best_r >= 0) ridge.push_back({best_r, c});
            }
        } else {
            for (int r = 0; r < kTemplateHeight; ++r) {
                int best_c = -1;
                double best = kMassEps;
                for (int c = 0; c < kTemplateWidth; ++c)
                    if (smooth.at(r, c) > best) {
                        best = smooth.at(r, c);
                        best_c = c;
                    }
                if (best_c >= 0) ridge.push_back({r, best_c});
            }
        }
        if (ridge.empty())
            throw DataError(std::string("build_template: no mass for role ") +
                            kRoleNames[role]);
        tpl.polylines[role] = resample_polyline(ridge);
    }
    return tpl;
}

inline void save_template(const WristTemplate& tpl, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "# wrist template, frame " << kTemplateWidth << "x"
        << kTemplateHeight << "\n";
    for (int role = 0; role < 4; ++role)
        for (const auto& p : tpl.polylines[role])
            out << kRoleNames[role] << " " << p.r << " " << p.c << "\n";
    if (!out) throw DataError("write failed: " + path);
}

inline WristTemplate load_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    WristTemplate tpl;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string label;
        GridPoint p;
        if (!(ls >> label >> p.r >> p.c))
            throw DataError(path + ": malformed template point at line " +
                            std::to_string(lineno));
        int role = -1;
        for (int i = 0; i < 4; ++i)
            if (label == kRoleNames[i]) role = i;
        if (role < 0)
            throw DataError(path + ": unknown label " + label + " at line " +
                            std::to_string(lineno));
        tpl.polylines[role].push_back(p);
    }
    for (const auto& poly : tpl.polylines)
        if (poly.empty()) throw DataError(path + ": incomplete template");
    return tpl;
}

} // namespace wristmatch

#endif
