#ifndef WRISTMATCH_GRAPH_HPP
#define WRISTMATCH_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/gradients.hpp"
#include "wristmatch/image.hpp"

namespace wristmatch {

inline constexpr int kGraphHeight = 40;
inline constexpr double kSqrt2 = 1.4142135623730951;

/// 8-connected grid graph over the skin pixels of the 40-pixel-height frame.
/// Nodes are indexed r * width + c. The directed edge u -> v costs
/// gx[v] * sqrt(2) for diagonal moves and gx[v] otherwise, so every weight
/// lies in [0, sqrt(2)].
struct WristGraph {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> fg;
    std::vector<double> gx;

    int node(int r, int c) const { return r * width + c; }
    int row_of(int id) const { return id / width; }
    int col_of(int id) const { return id % width; }
    bool in_bounds(int r, int c) const {
        return r >= 0 && r < height && c >= 0 && c < width;
    }
    bool foreground(int id) const { return fg[static_cast<std::size_t>(id)] != 0; }
    bool foreground(int r, int c) const {
        return in_bounds(r, c) && foreground(node(r, c));
    }
    std::size_t size() const { return fg.size(); }

    double weight(int /*u*/, int v, bool diagonal) const {
        return gx[static_cast<std::size_t>(v)] * (diagonal ? kSqrt2 : 1.0);
    }
};

/// Fixed neighbor order; axial moves first, then diagonals, each in
/// (-row, +row, -col, +col) order. Iteration order never affects results
/// (ties are resolved by node id), but keeping it fixed aids debugging.
inline constexpr int kNeighborDr[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
inline constexpr int kNeighborDc[8] = {0, 0, -1, 1, -1, 1, -1, 1};

struct GraphBuild {
    WristGraph graph;
    ImagePlane gx;   // the 40-frame cost field
    ImagePlane mask; // the 40-frame binary mask (0/1)
};

/// Build the wrinkle-search graph from a segmented image and its mask.
///
/// Per channel, |horizontal Sobel| is taken on the masked image; the cost
/// field is 1 - max over channels, clamped to [0, 1], which is small exactly
/// where some channel has a strong vertical structure. No gradient rescaling:
/// a global-maximum rescale would let the mask's own edge cliff (an artifact
/// of segmentation, strongest where the boundary is jagged) flatten the
/// wrinkle contrast everywhere else. The field is computed at the input
/// resolution and then resized to the 40-pixel frame, as is the mask
/// (foreground at >= 0.5).
inline GraphBuild build_graph(const RgbImage& img, const ImagePlane& mask) {
    if (img.empty()) throw UsageError("build_graph: empty image");
    if (img.width() != mask.width || img.height() != mask.height)
        throw UsageError("build_graph: image/mask size mismatch");
    bool any = false;
    for (double v : mask.data)
        if (v >= 0.5) { any = true; break; }
    if (!any) throw DataError("build_graph: empty skin mask");

    const ImagePlane* channels[3] = {&img.r, &img.g, &img.b};
    ImagePlane combined(img.width(), img.height());
    for (const ImagePlane* ch : channels) {
        ImagePlane masked(img.width(), img.height());
        for (std::size_t i = 0; i < masked.data.size(); ++i)
            masked.data[i] = mask.data[i] >= 0.5 ? ch->data[i] : 0.0;
        ImagePlane gx = sobel_x(masked);
        for (std::size_t i = 0; i < combined.data.size(); ++i)
            combined.data[i] = std::max(combined.data[i], std::abs(gx.data[i]));
    }
    for (auto& v : combined.data) v = std::clamp(1.0 - v, 0.0, 1.0);

    GraphBuild out;
    out.gx = resize_to_height(combined, kGraphHeight);
    for (auto& v : out.gx.data) v = std::clamp(v, 0.0, 1.0);
    ImagePlane small_mask = resize_to_height(mask, kGraphHeight);
    out.mask = ImagePlane(small_mask.width, small_mask.height);
    for (std::size_t i = 0; i < small_mask.data.size(); ++i)
        out.mask.data[i] = small_mask.data[i] >= 0.5 ? 1.0 : 0.0;

    out.graph.width = out.gx.width;
    out.graph.height = out.gx.height;
    out.graph.gx = out.gx.data;
    out.graph.fg.resize(out.mask.data.size());
    for (std::size_t i = 0; i < out.mask.data.size(); ++i)
        out.graph.fg[i] = out.mask.data[i] >= 0.5 ? 1 : 0;
    return out;
}

/// Sum of edge weights along a node sequence, accumulated start-to-end
/// (the same association order the shortest-path search uses).
inline double path_cost(const WristGraph& g, const std::vector<int>& nodes) {
    double cost = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const int dr = g.row_of(nodes[i]) - g.row_of(nodes[i - 1]);
        const int dc = g.col_of(nodes[i]) - g.col_of(nodes[i - 1]);
        cost += g.weight(nodes[i - 1], nodes[i], dr != 0 && dc != 0);
    }
    return cost;
}

/// Memoized all-pairs shortest paths over a WristGraph.
///
/// All weights are nonnegative by construction, so a per-source Dijkstra
/// sweep is the whole of Johnson's algorithm (the reweighting step
/// degenerates); distances equal a Bellman-Ford oracle bit for bit because
/// both take the pointwise minimum of start-to-end rounded path sums.
/// Equal-cost ties are broken lexicographically by node sequence.
/// Disconnected pairs report an infinite cost and an empty path; they are
/// not an error. Not thread-safe: one table serves one worker.
class PathTable {
  public:
    explicit PathTable(const WristGraph& g) : g_(&g) {}

    static constexpr double kInf = std::numeric_limits<double>::infinity();

    /// Minimal cost from s to f, +inf when unreachable.
    double cost(int s, int f) const {
        require_node(s);
        require_node(f);
        return forward(s).dist[static_cast<std::size_t>(f)];
    }

    /// The lexicographically smallest minimum-cost node sequence from s to
    /// f; empty when unreachable.
    std::vector<int> path(int s, int f) const {
        require_node(s);
        require_node(f);
        const Search& fs = forward(s);
        const double total = fs.dist[static_cast<std::size_t>(f)];
        if (total == kInf) return {};
        if (s == f) return {s};
        const std::vector<double>& rev = reverse(f);

        // Walk forward, at each step taking the smallest-id neighbor that
        // still lies on some minimum-cost continuation. The membership test
        // prefix + w + suffix == total is exact in the common case; when
        // rounding of the reverse accumulation makes every candidate miss,
        // the nearest candidate is taken, and as a last resort the Dijkstra
        // parent chain is returned. Every fallback is deterministic.
        std::vector<int> nodes{s};
        std::vector<std::uint8_t> visited(g_->size(), 0);
        visited[static_cast<std::size_t>(s)] = 1;
        double prefix = 0.0;
        int u = s;
        const std::size_t node_budget = g_->size() + 1;
        while (u != f && nodes.size() <= node_budget) {
            int best = -1;
            double best_gap = kInf;
            double best_w = 0.0;
            const int ur = g_->row_of(u), uc = g_->col_of(u);
            // Candidates in id order: scan the 8 neighbors sorted by id.
            int cand[8];
            int cand_n = 0;
            for (int t = 0; t < 8; ++t) {
                const int r = ur + kNeighborDr[t], c = uc + kNeighborDc[t];
                if (g_->foreground(r, c)) cand[cand_n++] = g_->node(r, c);
            }
            std::sort(cand, cand + cand_n);
            for (int i = 0; i < cand_n; ++i) {
                const int v = cand[i];
                if (visited[static_cast<std::size_t>(v)]) continue;
                const double rv = rev[static_cast<std::size_t>(v)];
                if (rv == kInf) continue;
                const bool diag = g_->row_of(v) != ur && g_->col_of(v) != uc;
                const double w = g_->weight(u, v, diag);
                const double through = prefix + w + rv;
                if (through == total) {
                    best = v;
                    best_w = w;
                    break;
                }
                const double gap = std::abs(through - total);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = v;
                    best_w = w;
                }
            }
            if (best < 0) return parent_chain(fs, s, f); // walked into a dead end
            visited[static_cast<std::size_t>(best)] = 1;
            prefix += best_w;
            nodes.push_back(best);
            u = best;
        }
        if (u != f) return parent_chain(fs, s, f);
        return nodes;
    }

    struct Pair {
        int s = -1;
        int f = -1;
        double cost = kInf;
    };

    /// Cheapest (source, sink) pair; ties prefer the smaller source id, then
    /// the smaller sink id. Pairs with s == f are skipped (a wrinkle needs
    /// extent). Returns an infinite-cost Pair when nothing connects.
    Pair min_pair(const std::vector<int>& sources,
                  const std::vector<int>& sinks) const {
        std::vector<int> ss(sources), ff(sinks);
        std::sort(ss.begin(), ss.end());
        std::sort(ff.begin(), ff.end());
        Pair best;
        for (int s : ss) {
            const Search& fs = forward(s);
            for (int f : ff) {
                if (s == f) continue;
                const double c = fs.dist[static_cast<std::size_t>(f)];
                if (c < best.cost) best = {s, f, c};
            }
        }
        return best;
    }

  private:
    struct Search {
        std::vector<double> dist;
        std::vector<int> parent;
    };

    const WristGraph* g_;
    mutable std::unordered_map<int, Search> fwd_;
    mutable std::unordered_map<int, std::vector<double>> rev_;

    void require_node(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= g_->size() ||
            !g_->foreground(id))
            throw UsageError("path table: endpoint is not a graph node");
    }

    std::vector<int> parent_chain(const Search& fs, int s, int f) const {
        std::vector<int> nodes;
        for (int v = f; v != -1; v = fs.parent[static_cast<std::size_t>(v)]) {
            nodes.push_back(v);
            if (v == s) break;
        }
        std::reverse(nodes.begin(), nodes.end());
        return nodes;
    }

    const Search& forward(int s) const {
        auto it = fwd_.find(s);
        if (it != fwd_.end()) return it->second;
        Search sr;
        sr.dist.assign(g_->size(), kInf);
        sr.parent.assign(g_->size(), -1);
        dijkstra(s, /*reversed=*/false, sr.dist, &sr.parent);
        return fwd_.emplace(s, std::move(sr)).first->second;
    }

    const std::vector<double>& reverse(int f) const {
        auto it = rev_.find(f);
        if (it != rev_.end()) return it->second;
        std::vector<double> dist(g_->size(), kInf);
        dijkstra(f, /*reversed=*/true, dist, nullptr);
        return rev_.emplace(f, std::move(dist)).first->second;
    }

    /// Plain binary-heap Dijkstra. In the reversed direction the relaxed
    /// edge is v -> u (u just popped), whose weight depends on u, the head.
    /// Parent ties on exact cost equality keep the smaller parent id.
    void dijkstra(int start, bool reversed, std::vector<double>& dist,
                  std::vector<int>* parent) const {
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        dist[static_cast<std::size_t>(start)] = 0.0;
        heap.push({0.0, start});
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[static_cast<std::size_t>(u)]) continue;
            const int ur = g_->row_of(u), uc = g_->col_of(u);
            for (int t = 0; t < 8; ++t) {
                const int r = ur + kNeighborDr[t], c = uc + kNeighborDc[t];
                if (!g_->foreground(r, c)) continue;
                const int v = g_->node(r, c);
                const bool diag = r != ur && c != uc;
                const double w =
                    reversed ? g_->weight(v, u, diag) : g_->weight(u, v, diag);
                const double nd = d + w;
                const double cur = dist[static_cast<std::size_t>(v)];
                if (nd < cur) {
                    dist[static_cast<std::size_t>(v)] = nd;
                    if (parent) (*parent)[static_cast<std::size_t>(v)] = u;
                    heap.push({nd, v});
                } else if (parent && nd == cur &&
                           u < (*parent)[static_cast<std::size_t>(v)]) {
                    (*parent)[static_cast<std::size_t>(v)] = u;
                }
            }
        }
    }
};

} // namespace wristmatch

#endif
