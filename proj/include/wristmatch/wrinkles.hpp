#ifndef WRISTMATCH_WRINKLES_HPP
#define WRISTMATCH_WRINKLES_HPP

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wristmatch/binio.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/graph.hpp"

namespace wristmatch {

struct GridPoint {
    int r = 0;
    int c = 0;
    bool operator==(const GridPoint&) const = default;
};

/// Upper and lower skin boundaries: the topmost and bottommost mask pixel of
/// every occupied column, ordered by column.
struct Boundaries {
    std::vector<GridPoint> up;
    std::vector<GridPoint> down;
};

inline Boundaries boundaries(const WristGraph& g) {
    Boundaries b;
    for (int c = 0; c < g.width; ++c) {
        int top = -1, bottom = -1;
        for (int r = 0; r < g.height; ++r)
            if (g.foreground(r, c)) {
                if (top < 0) top = r;
                bottom = r;
            }
        if (top >= 0) {
            b.up.push_back({top, c});
            b.down.push_back({bottom, c});
        }
    }
    if (b.up.empty()) throw DataError("boundaries: empty mask");
    return b;
}

/// A wrinkle path: 8-connected node run with its normalized length, the
/// mean edge weight d_p = cost / edge count.
struct WrinklePath {
    std::vector<GridPoint> nodes;
    double normalized_length = 0.0;
};

namespace detail {

inline std::vector<int> to_ids(const WristGraph& g,
                               const std::vector<GridPoint>& pts) {
    std::vector<int> ids;
    ids.reserve(pts.size());
    for (const auto& p : pts) ids.push_back(g.node(p.r, p.c));
    return ids;
}

inline std::vector<GridPoint> to_points(const WristGraph& g,
                                        const std::vector<int>& ids) {
    std::vector<GridPoint> pts;
    pts.reserve(ids.size());
    for (int id : ids) pts.push_back({g.row_of(id), g.col_of(id)});
    return pts;
}

inline WrinklePath make_path(const WristGraph& g, const std::vector<int>& ids) {
    WrinklePath p;
    p.nodes = to_points(g, ids);
    if (ids.size() >= 2)
        p.normalized_length =
            path_cost(g, ids) / static_cast<double>(ids.size() - 1);
    return p;
}

inline const GridPoint* boundary_at(const std::vector<GridPoint>& list, int c) {
    for (const auto& p : list)
        if (p.c == c) return &p;
    return nullptr;
}

} // namespace detail

/// Trim noisy path ends: candidate endpoints are the boundary anchors of the
/// path's end columns shifted i rows down (start) and j rows up (finish),
/// each shift at most floor(n*a) where n is the edge count of the anchored
/// baseline path. Among the candidate shortest paths, the one with the
/// smallest normalized length wins, strictly; the input is returned when no
/// candidate improves on it. Because the shift grid and its bound depend
/// only on the fixed boundaries, re-adjusting an adjusted path (against the
/// same table) finds nothing better: the operation is idempotent.
inline WrinklePath adjust_path(const WristGraph& g, const PathTable& table,
                               const Boundaries& b, const WrinklePath& p,
                               double a = 0.2) {
    if (a < 0.0 || a >= 1.0) throw UsageError("adjust_path: need 0 <= a < 1");
    if (p.nodes.size() < 2) return p;
    const GridPoint* s0 = detail::boundary_at(b.up, p.nodes.front().c);
    const GridPoint* f0 = detail::boundary_at(b.down, p.nodes.back().c);
    if (!s0 || !f0 || *s0 == *f0) return p;

    const std::vector<int> baseline = table.path(g.node(s0->r, s0->c),
                                                 g.node(f0->r, f0->c));
    if (baseline.size() < 2) return p;
    const int n0 = static_cast<int>(baseline.size()) - 1;
    const int max_shift = static_cast<int>(std::floor(n0 * a));

    double best_d = path_cost(g, detail::to_ids(g, p.nodes)) /
                    static_cast<double>(p.nodes.size() - 1);
    WrinklePath best = p;
    for (int i = 0; i <= max_shift; ++i) {
        const int sr = s0->r + i;
        if (!g.foreground(sr, s0->c)) continue;
        for (int j = 0; j <= max_shift; ++j) {
            if (i == 0 && j == 0) continue;
            if (i + j >= n0) break;
            const int fr = f0->r - j;
            if (!g.foreground(fr, f0->c)) continue;
            const int s = g.node(sr, s0->c);
            const int f = g.node(fr, f0->c);
            if (s == f) continue;
            if (table.cost(s, f) == PathTable::kInf) continue;
            const std::vector<int> cand = table.path(s, f);
            if (cand.size() < 2) continue;
            const double d = path_cost(g, cand) /
                             static_cast<double>(cand.size() - 1);
            if (d < best_d) {
                best_d = d;
                best = detail::make_path(g, cand);
            }
        }
    }
    return best;
}

/// Find the two dominant wrinkle paths between the boundaries.
///
/// P1 is the cheapest boundary-to-boundary path. For P2 the first path's
/// nodes are removed and the remainder eroded by the 3x3 axial cross
/// (positions outside the mask or image count as background), then the
/// boundary nodes are restored, and the search repeats on that subgraph.
/// With `adjust`, each path is end-trimmed by adjust_path right after it is
/// found, so the subgraph removes the adjusted first path.
inline std::array<WrinklePath, 2> detect_wrinkles(const WristGraph& g,
                                                  const Boundaries& b, double a,
                                                  bool adjust) {
    if (b.up.empty() || b.down.empty())
        throw UsageError("detect_wrinkles: empty boundaries");
    const std::vector<int> sources = detail::to_ids(g, b.up);
    const std::vector<int> sinks = detail::to_ids(g, b.down);

    PathTable table(g);
    const PathTable::Pair first = table.min_pair(sources, sinks);
    if (first.cost == PathTable::kInf)
        throw NumericError(
            "detect_wrinkles: boundaries are not connected through the mask");
    WrinklePath p1 = detail::make_path(g, table.path(first.s, first.f));
    if (adjust) p1 = adjust_path(g, table, b, p1, a);

    WristGraph sub = g;
    std::vector<std::uint8_t> in_p1(g.size(), 0);
    for (const auto& pt : p1.nodes)
        in_p1[static_cast<std::size_t>(g.node(pt.r, pt.c))] = 1;
    auto kept = [&](int r, int c) {
        return g.foreground(r, c) && !in_p1[static_cast<std::size_t>(g.node(r, c))];
    };
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) {
            const bool survives = kept(r, c) && kept(r - 1, c) &&
                                  kept(r + 1, c) && kept(r, c - 1) &&
                                  kept(r, c + 1);
            sub.fg[static_cast<std::size_t>(g.node(r, c))] = survives ? 1 : 0;
        }
    for (int id : sources) sub.fg[static_cast<std::size_t>(id)] = 1;
    for (int id : sinks) sub.fg[static_cast<std::size_t>(id)] = 1;

    PathTable sub_table(sub);
    const PathTable::Pair second = sub_table.min_pair(sources, sinks);
    if (second.cost == PathTable::kInf)
        throw NumericError(
            "detect_wrinkles: degenerate wrinkle structure, no second path "
            "after removing the first");
    WrinklePath p2 = detail::make_path(sub, sub_table.path(second.s, second.f));
    if (adjust) p2 = adjust_path(sub, sub_table, b, p2, a);
    return {p1, p2};
}

enum class Procedure { kProc2, kProc23 };

inline const char* procedure_name(Procedure p) {
    return p == Procedure::kProc2 ? "Proc2" : "Proc2/3";
}

/// Boundary and wrinkle key points of one image, in the 40-pixel frame.
/// Wrinkle 0 is the leftmost by mean column. normalized_length values are
/// in-memory only; the text serialization stores points and the procedure.
struct KeyPointSet {
    int width = 0;
    int height = 0;
    Boundaries boundaries;
    std::array<WrinklePath, 2> wrinkles;
    Procedure procedure = Procedure::kProc2;
};

namespace detail {

inline double mean_col(const WrinklePath& p) {
    double s = 0.0;
    for (const auto& n : p.nodes) s += n.c;
    return p.nodes.empty() ? 0.0 : s / static_cast<double>(p.nodes.size());
}

} // namespace detail

inline KeyPointSet locate_keypoints(const WristGraph& g, double a,
                                    bool adjust) {
    KeyPointSet kp;
    kp.width = g.width;
    kp.height = g.height;
    kp.boundaries = boundaries(g);
    kp.wrinkles = detect_wrinkles(g, kp.boundaries, a, adjust);
    if (detail::mean_col(kp.wrinkles[1]) < detail::mean_col(kp.wrinkles[0]))
        std::swap(kp.wrinkles[0], kp.wrinkles[1]);
    kp.procedure = adjust ? Procedure::kProc23 : Procedure::kProc2;
    return kp;
}

inline void save_keypoints(const KeyPointSet& kp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "# wrist key points\n";
    out << "# procedure: " << procedure_name(kp.procedure) << "\n";
    out << "# frame: " << kp.width << " " << kp.height << "\n";
    auto dump = [&](const char* label, const std::vector<GridPoint>& pts) {
        for (const auto& p : pts)
            out << label << " " << p.r << " " << p.c << "\n";
    };
    dump("UP", kp.boundaries.up);
    dump("DOWN", kp.boundaries.down);
    dump("W1", kp.wrinkles[0].nodes);
    dump("W2", kp.wrinkles[1].nodes);
    if (!out) throw DataError("write failed: " + path);
}

inline KeyPointSet load_keypoints(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    KeyPointSet kp;
    bool have_frame = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "procedure:") {
                std::string v;
                hs >> v;
                if (v == "Proc2") kp.procedure = Procedure::kProc2;
                else if (v == "Proc2/3") kp.procedure = Procedure::kProc23;
                else throw DataError(path + ": unknown procedure tag " + v);
            } else if (key == "frame:") {
                if (!(hs >> kp.width >> kp.height) || kp.width <= 0 ||
                    kp.height <= 0)
                    throw DataError(path + ": malformed frame header");
                have_frame = true;
            }
            continue;
        }
        std::istringstream ls(line);
        std::string label;
        GridPoint p;
        if (!(ls >> label >> p.r >> p.c))
            throw DataError(path + ": malformed point at line " +
                            std::to_string(lineno));
        if (label == "UP") kp.boundaries.up.push_back(p);
        else if (label == "DOWN") kp.boundaries.down.push_back(p);
        else if (label == "W1") kp.wrinkles[0].nodes.push_back(p);
        else if (label == "W2") kp.wrinkles[1].nodes.push_back(p);
        else
            throw DataError(path + ": unknown label " + label + " at line " +
                            std::to_string(lineno));
    }
    if (!have_frame) throw DataError(path + ": missing frame header");
    if (kp.boundaries.up.empty() || kp.boundaries.down.empty() ||
        kp.wrinkles[0].nodes.empty() || kp.wrinkles[1].nodes.empty())
        throw DataError(path + ": incomplete key point set");
    return kp;
}

} // namespace wristmatch

#endif
