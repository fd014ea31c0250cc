#ifndef WRISTMATCH_SLIC_HPP
#define WRISTMATCH_SLIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "wristmatch/color.hpp"
#include "wristmatch/errors.hpp"

namespace wristmatch {

/// Superpixel partition of an image: contiguous labels 0..count-1, each label
/// one 4-connected region. Adjacency lists are sorted and symmetric.
struct SuperpixelLabeling {
    int width = 0;
    int height = 0;
    int count = 0;
    std::vector<int> labels;
    std::vector<double> centroid_row;
    std::vector<double> centroid_col;
    std::vector<int> sizes;
    std::vector<std::vector<int>> adjacency;

    int label_at(int r, int c) const {
        return labels[static_cast<std::size_t>(r) * width + c];
    }
};

namespace detail {

/// Rebuild centroids, sizes and adjacency from a label raster.
inline void finalize_labeling(SuperpixelLabeling& sp) {
    sp.centroid_row.assign(sp.count, 0.0);
    sp.centroid_col.assign(sp.count, 0.0);
    sp.sizes.assign(sp.count, 0);
    sp.adjacency.assign(sp.count, {});
    std::vector<std::set<int>> adj(sp.count);
    for (int r = 0; r < sp.height; ++r)
        for (int c = 0; c < sp.width; ++c) {
            const int l = sp.label_at(r, c);
            sp.centroid_row[l] += r;
            sp.centroid_col[l] += c;
            sp.sizes[l] += 1;
            if (c + 1 < sp.width) {
                const int l2 = sp.label_at(r, c + 1);
                if (l2 != l) { adj[l].insert(l2); adj[l2].insert(l); }
            }
            if (r + 1 < sp.height) {
                const int l2 = sp.label_at(r + 1, c);
                if (l2 != l) { adj[l].insert(l2); adj[l2].insert(l); }
            }
        }
    for (int l = 0; l < sp.count; ++l) {
        sp.centroid_row[l] /= sp.sizes[l];
        sp.centroid_col[l] /= sp.sizes[l];
        sp.adjacency[l].assign(adj[l].begin(), adj[l].end());
    }
}

} // namespace detail

/// SLIC superpixels over the CIELAB planes of a ColorStack.
///
/// Color distances follow the classic convention (L in [0,100], a and b
/// centered 8-bit), recovered from the stack's [0,1] planes by the inverse of
/// their documented scalings; `compactness` (default 10) then weighs spatial
/// against color distance as D^2 = d_lab^2 + (compactness * d_xy / S)^2 with
/// S = sqrt(N/k). Ten assignment/update sweeps, then connectivity
/// enforcement: fragments smaller than a quarter of the mean superpixel area
/// merge into the preceding scan-order neighbor, so every final label is one
/// 4-connected region and the count stays near k. Fully deterministic.
inline SuperpixelLabeling slic(const ColorStack& stack, int k,
                               double compactness = 10.0) {
    const int w = stack.width();
    const int h = stack.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (k < 2) throw UsageError("slic: need k >= 2");
    if (static_cast<std::size_t>(k) > n)
        throw UsageError("slic: more superpixels than pixels requested");

    // Native-range LAB recovered from the [0,1] planes.
    std::vector<double> L(n), A(n), B(n);
    for (std::size_t i = 0; i < n; ++i) {
        L[i] = stack.planes[6].data[i] * 100.0;
        A[i] = stack.planes[7].data[i] * 255.0 - 128.0;
        B[i] = stack.planes[8].data[i] * 255.0 - 128.0;
    }

    const double S = std::sqrt(static_cast<double>(n) / k);
    const int nx = std::max(1, static_cast<int>(std::lround(w / S)));
    const int ny = std::max(1, static_cast<int>(std::lround(h / S)));

    struct Center {
        double l, a, b, r, c;
    };
    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);

    // Squared LAB gradient, for seeding centers off edges.
    auto grad = [&](int r, int c) {
        const auto idx = [&](int rr, int cc) {
            rr = std::clamp(rr, 0, h - 1);
            cc = std::clamp(cc, 0, w - 1);
            return static_cast<std::size_t>(rr) * w + cc;
        };
        const std::size_t xp = idx(r, c + 1), xm = idx(r, c - 1);
        const std::size_t yp = idx(r + 1, c), ym = idx(r - 1, c);
        const double dx = (L[xp] - L[xm]) * (L[xp] - L[xm]) +
                          (A[xp] - A[xm]) * (A[xp] - A[xm]) +
                          (B[xp] - B[xm]) * (B[xp] - B[xm]);
        const double dy = (L[yp] - L[ym]) * (L[yp] - L[ym]) +
                          (A[yp] - A[ym]) * (A[yp] - A[ym]) +
                          (B[yp] - B[ym]) * (B[yp] - B[ym]);
        return dx + dy;
    };

    for (int gy = 0; gy < ny; ++gy)
        for (int gx = 0; gx < nx; ++gx) {
            int r = std::clamp(
                static_cast<int>(std::lround((gy + 0.5) * h / ny - 0.5)), 0, h - 1);
            int c = std::clamp(
                static_cast<int>(std::lround((gx + 0.5) * w / nx - 0.5)), 0, w - 1);
            double best = std::numeric_limits<double>::infinity();
            int br = r, bc = c;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const int rr = std::clamp(r + dr, 0, h - 1);
                    const int cc = std::clamp(c + dc, 0, w - 1);
                    const double g = grad(rr, cc);
                    if (g < best) { best = g; br = rr; bc = cc; }
                }
            const std::size_t i = static_cast<std::size_t>(br) * w + bc;
            centers.push_back({L[i], A[i], B[i], static_cast<double>(br),
                               static_cast<double>(bc)});
        }

    // Initial assignment: nearest center spatially, so no pixel is orphaned.
    std::vector<int> labels(n);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const int gy = std::min(ny - 1, r * ny / h);
            const int gx = std::min(nx - 1, c * nx / w);
            labels[static_cast<std::size_t>(r) * w + c] = gy * nx + gx;
        }

    const double spatial_w = compactness / S;
    std::vector<double> dist(n);
    for (int iter = 0; iter < 10; ++iter) {
        std::fill(dist.begin(), dist.end(),
                  std::numeric_limits<double>::infinity());
        const int reach = static_cast<int>(std::ceil(S));
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            const Center& cen = centers[ci];
            const int r0 = std::max(0, static_cast<int>(cen.r) - reach);
            const int r1 = std::min(h - 1, static_cast<int>(cen.r) + reach);
            const int c0 = std::max(0, static_cast<int>(cen.c) - reach);
            const int c1 = std::min(w - 1, static_cast<int>(cen.c) + reach);
            for (int r = r0; r <= r1; ++r)
                for (int c = c0; c <= c1; ++c) {
                    const std::size_t i = static_cast<std::size_t>(r) * w + c;
                    const double dl = L[i] - cen.l;
                    const double da = A[i] - cen.a;
                    const double db = B[i] - cen.b;
                    const double dr = (r - cen.r) * spatial_w;
                    const double dc = (c - cen.c) * spatial_w;
                    const double d =
                        dl * dl + da * da + db * db + dr * dr + dc * dc;
                    if (d < dist[i]) {
                        dist[i] = d;
                        labels[i] = static_cast<int>(ci);
                    }
                }
        }
        // Recenter.
        std::vector<double> sl(centers.size()), sa(centers.size()),
            sb(centers.size()), sr(centers.size()), sc(centers.size());
        std::vector<int> cnt(centers.size(), 0);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * w + c;
                const int l = labels[i];
                sl[l] += L[i]; sa[l] += A[i]; sb[l] += B[i];
                sr[l] += r; sc[l] += c;
                cnt[l] += 1;
            }
        for (std::size_t ci = 0; ci < centers.size(); ++ci)
            if (cnt[ci] > 0)
                centers[ci] = {sl[ci] / cnt[ci], sa[ci] / cnt[ci],
                               sb[ci] / cnt[ci], sr[ci] / cnt[ci],
                               sc[ci] / cnt[ci]};
    }

    // Connectivity enforcement: flood 4-connected components in scan order;
    // fragments below min_size adopt the label of the preceding neighbor.
    const int min_size =
        std::max(1, static_cast<int>(n / static_cast<std::size_t>(k) / 4));
    std::vector<int> out(n, -1);
    std::vector<std::size_t> stackbuf;
    int next_label = 0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const std::size_t start = static_cast<std::size_t>(r) * w + c;
            if (out[start] >= 0) continue;
            int prev_label = -1;
            if (c > 0) prev_label = out[start - 1];
            else if (r > 0) prev_label = out[start - w];
            const int cur = labels[start];
            stackbuf.clear();
            stackbuf.push_back(start);
            out[start] = next_label;
            std::vector<std::size_t> member{start};
            while (!stackbuf.empty()) {
                const std::size_t i = stackbuf.back();
                stackbuf.pop_back();
                const int ir = static_cast<int>(i / w);
                const int ic = static_cast<int>(i % w);
                const int drs[4] = {-1, 1, 0, 0};
                const int dcs[4] = {0, 0, -1, 1};
                for (int t = 0; t < 4; ++t) {
                    const int rr = ir + drs[t];
                    const int cc = ic + dcs[t];
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                    const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
                    if (out[j] < 0 && labels[j] == cur) {
                        out[j] = next_label;
                        member.push_back(j);
                        stackbuf.push_back(j);
                    }
                }
            }
            if (static_cast<int>(member.size()) < min_size && prev_label >= 0) {
                for (std::size_t i : member) out[i] = prev_label;
            } else {
                ++next_label;
            }
        }

    SuperpixelLabeling sp;
    sp.width = w;
    sp.height = h;
    sp.count = next_label;
    sp.labels = std::move(out);
    detail::finalize_labeling(sp);
    return sp;
}

} // namespace wristmatch

#endif
