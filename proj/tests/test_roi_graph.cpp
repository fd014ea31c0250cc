#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <vector>

#include "test_util.hpp"
#include "wristmatch/graph.hpp"
#include "wristmatch/wrinkles.hpp"

using namespace wristmatch;

namespace {

// ---------------------------------------------------------------------------
// Independent oracles. Both accumulate edge weights start-to-end, the same
// association order the production search uses, so cost comparisons below
// are exact (==), not approximate.

/// Label-correcting Bellman-Ford run to fixpoint.
double bf_cost(const WristGraph& g, int s, int f) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.size(), inf);
    dist[static_cast<std::size_t>(s)] = 0.0;
    bool changed = true;
    int sweeps = 0;
    while (changed) {
        REQUIRE(++sweeps <= static_cast<int>(g.size()) + 1);
        changed = false;
        for (int r = 0; r < g.height; ++r)
            for (int c = 0; c < g.width; ++c) {
                const int u = g.node(r, c);
                if (!g.foreground(u) || dist[static_cast<std::size_t>(u)] == inf)
                    continue;
                for (int t = 0; t < 8; ++t) {
                    const int rr = r + kNeighborDr[t], cc = c + kNeighborDc[t];
                    if (!g.foreground(rr, cc)) continue;
                    const int v = g.node(rr, cc);
                    const double nd =
                        dist[static_cast<std::size_t>(u)] +
                        g.weight(u, v, rr != r && cc != c);
                    if (nd < dist[static_cast<std::size_t>(v)]) {
                        dist[static_cast<std::size_t>(v)] = nd;
                        changed = true;
                    }
                }
            }
    }
    return dist[static_cast<std::size_t>(f)];
}

struct EnumBest {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<int> path;
};

void enum_walk(const WristGraph& g, int u, int f, std::vector<int>& cur,
               std::vector<char>& used, double cost, EnumBest& best) {
    if (u == f) {
        if (cost < best.cost ||
            (cost == best.cost && (best.path.empty() || cur < best.path))) {
            best.cost = cost;
            best.path = cur;
        }
        return;
    }
    const int ur = g.row_of(u), uc = g.col_of(u);
    for (int t = 0; t < 8; ++t) {
        const int r = ur + kNeighborDr[t], c = uc + kNeighborDc[t];
        if (!g.foreground(r, c)) continue;
        const int v = g.node(r, c);
        if (used[static_cast<std::size_t>(v)]) continue;
        used[static_cast<std::size_t>(v)] = 1;
        cur.push_back(v);
        enum_walk(g, v, f, cur, used, cost + g.weight(u, v, r != ur && c != uc),
                  best);
        cur.pop_back();
        used[static_cast<std::size_t>(v)] = 0;
    }
}

/// Exhaustive minimum over every simple path; ties keep the
/// lexicographically smallest node sequence. Only for tiny graphs.
EnumBest enum_best(const WristGraph& g, int s, int f) {
    EnumBest best;
    std::vector<int> cur{s};
    std::vector<char> used(g.size(), 0);
    used[static_cast<std::size_t>(s)] = 1;
    enum_walk(g, s, f, cur, used, 0.0, best);
    return best;
}

// ---------------------------------------------------------------------------

WristGraph make_grid(int w, int h, double gx_value = 1.0) {
    WristGraph g;
    g.width = w;
    g.height = h;
    g.fg.assign(static_cast<std::size_t>(w) * h, 1);
    g.gx.assign(static_cast<std::size_t>(w) * h, gx_value);
    return g;
}

void check_path_shape(const WristGraph& g, const std::vector<int>& path,
                      int s, int f) {
    REQUIRE(!path.empty());
    REQUIRE(path.front() == s);
    REQUIRE(path.back() == f);
    std::set<int> seen;
    for (std::size_t i = 0; i < path.size(); ++i) {
        REQUIRE(g.foreground(path[i]));
        REQUIRE(seen.insert(path[i]).second); // simple path, no revisits
        if (i == 0) continue;
        const int dr = g.row_of(path[i]) - g.row_of(path[i - 1]);
        const int dc = g.col_of(path[i]) - g.col_of(path[i - 1]);
        REQUIRE(std::abs(dr) <= 1);
        REQUIRE(std::abs(dc) <= 1);
        REQUIRE(std::abs(dr) + std::abs(dc) >= 1);
    }
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("edge weights scale diagonal steps by sqrt(2)", "[graph]") {
    WristGraph g = make_grid(5, 4, 0.25);
    const int u = g.node(1, 1), v = g.node(1, 2), d = g.node(2, 2);
    REQUIRE(g.weight(u, v, false) == 0.25);
    REQUIRE(g.weight(u, d, true) == 0.25 * kSqrt2);

    // Audit on noisy weights: every edge lies in [0, sqrt(2)] and the
    // diagonal cost into a node is exactly sqrt(2) times the axial cost.
    Rng rng(7);
    for (auto& x : g.gx) x = rng.uniform();
    for (int id = 0; id < static_cast<int>(g.size()); ++id) {
        const double ax = g.weight(0, id, false);
        const double di = g.weight(0, id, true);
        REQUIRE(ax >= 0.0);
        REQUIRE(di <= kSqrt2);
        REQUIRE(di == ax * kSqrt2);
    }
}

TEST_CASE("shortest-path costs equal a Bellman-Ford oracle on random masks",
          "[graph][oracle]") {
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        Rng rng(seed);
        const int w = 4 + static_cast<int>(rng.below(17)); // up to 20
        const int h = 4 + static_cast<int>(rng.below(37)); // up to 40
        WristGraph g = make_grid(w, h);
        std::vector<int> fg_ids;
        for (int id = 0; id < static_cast<int>(g.size()); ++id) {
            g.fg[static_cast<std::size_t>(id)] = rng.uniform() < 0.85 ? 1 : 0;
            g.gx[static_cast<std::size_t>(id)] = rng.uniform();
            if (g.fg[static_cast<std::size_t>(id)]) fg_ids.push_back(id);
        }
        if (fg_ids.size() < 2) continue;

        PathTable table(g);
        for (int trial = 0; trial < 6; ++trial) {
            const int s = fg_ids[rng.below(fg_ids.size())];
            const int f = fg_ids[rng.below(fg_ids.size())];
            const double oracle = bf_cost(g, s, f);
            const double got = table.cost(s, f);
            REQUIRE(got == oracle); // exact, not approximate
            const std::vector<int> path = table.path(s, f);
            if (got == PathTable::kInf) {
                REQUIRE(path.empty());
                continue;
            }
            check_path_shape(g, path, s, f);
            REQUIRE(path_cost(g, path) == Catch::Approx(got).margin(1e-9));
        }
    }
}

TEST_CASE("a uniform 3x3 grid is crossed corner to corner by two diagonals",
          "[graph][oracle]") {
    WristGraph g = make_grid(3, 3);
    const EnumBest oracle = enum_best(g, g.node(0, 0), g.node(2, 2));
    REQUIRE(oracle.cost == 2.0 * kSqrt2); // beats any axial mix (>= 1 + sqrt 2)
    REQUIRE(oracle.path == std::vector<int>{0, 4, 8});

    PathTable table(g);
    REQUIRE(table.cost(0, 8) == oracle.cost);
    REQUIRE(table.path(0, 8) == oracle.path);
}

TEST_CASE("search agrees with exhaustive enumeration on weighted grids",
          "[graph][oracle]") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        WristGraph g = make_grid(4, 3);
        Rng rng(100 + seed);
        for (auto& x : g.gx) x = rng.uniform(0.05, 1.0);
        PathTable table(g);
        const int corners[4] = {g.node(0, 0), g.node(0, 3), g.node(2, 0),
                                g.node(2, 3)};
        for (int s : corners)
            for (int f : corners) {
                if (s == f) continue;
                const EnumBest oracle = enum_best(g, s, f);
                REQUIRE(table.cost(s, f) == oracle.cost);
                // Continuous random weights make the optimum unique, so the
                // whole node sequence must match, not just its cost.
                REQUIRE(table.path(s, f) == oracle.path);
            }
    }
}

TEST_CASE("equal-cost routes resolve to the smallest node sequence",
          "[graph]") {
    SECTION("two mirrored L-routes, exact floating tie") {
        WristGraph g = make_grid(2, 2);
        g.gx = {1.0, 0.1, 0.1, 1.0};
        PathTable table(g);
        // Via node 1 and via node 2 both cost the identical rounded sum
        // 0.1 + 1.0; the diagonal costs sqrt(2). Node 1 wins on order.
        REQUIRE(table.cost(0, 3) == 0.1 + 1.0);
        REQUIRE(table.path(0, 3) == std::vector<int>{0, 1, 3});
        REQUIRE(enum_best(g, 0, 3).path == std::vector<int>{0, 1, 3});
    }
    SECTION("zero-cost column, many zero-cost continuations") {
        WristGraph g = make_grid(3, 3);
        g.gx = {1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0};
        PathTable table(g);
        REQUIRE(table.cost(1, 7) == 0.0);
        REQUIRE(table.path(1, 7) == enum_best(g, 1, 7).path);
    }
}

TEST_CASE("a zero-cost corridor dominates the crossing", "[graph]") {
    WristGraph g = make_grid(9, 40);
    for (int r = 0; r < 40; ++r) g.gx[static_cast<std::size_t>(g.node(r, 6))] = 0.0;

    std::vector<int> sources, sinks;
    for (int c = 0; c < 9; ++c) {
        sources.push_back(g.node(0, c));
        sinks.push_back(g.node(39, c));
    }
    PathTable table(g);
    const PathTable::Pair best = table.min_pair(sources, sinks);
    REQUIRE(best.cost == 0.0);
    // The diagonal entry from column 5 is the first zero-cost source.
    REQUIRE(best.s == g.node(0, 5));
    REQUIRE(best.f == g.node(39, 6));
    for (int id : table.path(best.s, best.f)) {
        REQUIRE(g.col_of(id) >= 5);
        REQUIRE(g.col_of(id) <= 7);
    }
}

TEST_CASE("min pair prefers the smallest source, then sink", "[graph]") {
    WristGraph g = make_grid(4, 1); // chain 0-1-2-3, unit axial steps
    PathTable table(g);

    PathTable::Pair p = table.min_pair({0, 3}, {1, 2});
    // (0,1) and (3,2) both cost 1; the smaller source id wins.
    REQUIRE(p.s == 0);
    REQUIRE(p.f == 1);
    REQUIRE(p.cost == 1.0);

    // A source equal to a sink is not a usable pair.
    p = table.min_pair({1}, {1, 2});
    REQUIRE(p.s == 1);
    REQUIRE(p.f == 2);

    p = table.min_pair({2}, {2});
    REQUIRE(p.cost == PathTable::kInf);
    REQUIRE(p.s == -1);
}

TEST_CASE("disconnected pairs report infinite cost, not an error", "[graph]") {
    WristGraph g = make_grid(2, 5);
    for (int r = 1; r <= 3; ++r)
        for (int c = 0; c < 2; ++c)
            g.fg[static_cast<std::size_t>(g.node(r, c))] = 0;

    PathTable table(g);
    REQUIRE(table.cost(g.node(0, 0), g.node(4, 0)) == PathTable::kInf);
    REQUIRE(table.path(g.node(0, 0), g.node(4, 0)).empty());
    const PathTable::Pair p =
        table.min_pair({g.node(0, 0), g.node(0, 1)},
                       {g.node(4, 0), g.node(4, 1)});
    REQUIRE(p.cost == PathTable::kInf);

    // Endpoints must be graph nodes at all.
    REQUIRE_THROWS_AS(table.cost(g.node(2, 0), g.node(0, 0)), UsageError);
    REQUIRE_THROWS_AS(table.path(g.node(0, 0), -1), UsageError);
}

TEST_CASE("uniform grids are mirror symmetric", "[graph]") {
    const int w = 11, h = 9;
    WristGraph g = make_grid(w, h, 0.7);
    PathTable table(g);
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const int sc = static_cast<int>(rng.below(w));
        const int fc = static_cast<int>(rng.below(w));
        const int sr = static_cast<int>(rng.below(h));
        const int fr = static_cast<int>(rng.below(h));
        const double c = table.cost(g.node(sr, sc), g.node(fr, fc));
        const double m =
            table.cost(g.node(sr, w - 1 - sc), g.node(fr, w - 1 - fc));
        REQUIRE(c == Catch::Approx(m).margin(1e-12));

        // Closed form: diagonal steps cover the smaller displacement.
        const int dr = std::abs(fr - sr), dc = std::abs(fc - sc);
        const int diag = std::min(dr, dc), axial = std::max(dr, dc) - diag;
        REQUIRE(c ==
                Catch::Approx(0.7 * (axial + kSqrt2 * diag)).margin(1e-12));
    }
}

TEST_CASE("graph construction flattens constant images to unit cost",
          "[graph]") {
    RgbImage img(100, 160);
    for (auto* p : {&img.r, &img.g, &img.b})
        for (auto& v : p->data) v = 0.6;
    ImagePlane mask(100, 160);
    for (auto& v : mask.data) v = 1.0;

    const GraphBuild gb = build_graph(img, mask);
    REQUIRE(gb.graph.height == 40);
    REQUIRE(gb.graph.width == 25); // lround(100 * 40 / 160)
    for (double v : gb.graph.gx) REQUIRE(v == 1.0);
    for (std::uint8_t f : gb.graph.fg) REQUIRE(f == 1);
    // With unit cost everywhere the audit is exact.
    REQUIRE(gb.graph.weight(0, 1, false) == 1.0);
    REQUIRE(gb.graph.weight(0, 1, true) == kSqrt2);
}

TEST_CASE("graph construction validates its inputs", "[graph]") {
    RgbImage img(8, 8);
    ImagePlane mask(8, 8);
    REQUIRE_THROWS_AS(build_graph(RgbImage{}, mask), UsageError);
    REQUIRE_THROWS_AS(build_graph(img, ImagePlane(4, 8)), UsageError);
    REQUIRE_THROWS_AS(build_graph(img, mask), DataError); // all background
}

TEST_CASE("a dark vertical band attracts the cheapest crossing", "[graph]") {
    RgbImage img(64, 160);
    for (auto* p : {&img.r, &img.g, &img.b}) {
        for (auto& v : p->data) v = 0.8;
        for (int r = 0; r < 160; ++r)
            for (int c = 26; c <= 33; ++c) p->at(r, c) = 0.1;
    }
    ImagePlane mask(64, 160);
    for (auto& v : mask.data) v = 1.0;

    const GraphBuild gb = build_graph(img, mask);
    const WristGraph& g = gb.graph;
    REQUIRE(g.width == 16);
    const Boundaries b = boundaries(g);
    PathTable table(g);
    const PathTable::Pair best = table.min_pair(detail::to_ids(g, b.up),
                                                detail::to_ids(g, b.down));
    REQUIRE(best.cost < 10.0); // far below the 39-step unit-cost crossing
    double mean_col = 0.0;
    const std::vector<int> path = table.path(best.s, best.f);
    for (int id : path) {
        const int c = g.col_of(id);
        REQUIRE(c >= 4); // stays on the band flanks, cols ~6.4 and ~8.4
        REQUIRE(c <= 11);
        mean_col += c;
    }
    mean_col /= static_cast<double>(path.size());
    REQUIRE(mean_col > 5.0);
    REQUIRE(mean_col < 10.0);
}

TEST_CASE("end trimming drops the expensive lead of a corridor path",
          "[wrinkles]") {
    // Single column, 20 edges; the first three edges cost 1, the rest 0.
    WristGraph g = make_grid(1, 21, 0.0);
    for (int r = 1; r <= 3; ++r) g.gx[static_cast<std::size_t>(r)] = 1.0;
    g.gx[0] = 1.0;
    Boundaries b;
    b.up = {{0, 0}};
    b.down = {{20, 0}};

    PathTable table(g);
    const WrinklePath full = detail::make_path(g, table.path(0, 20));
    REQUIRE(full.nodes.size() == 21);
    REQUIRE(full.normalized_length == Catch::Approx(3.0 / 20.0));

    // a = 0.2 allows shifts up to floor(20 * 0.2) = 4. Dropping the three
    // unit edges at the start reaches d = 0; trimming the tail instead only
    // raises d (3/19 > 3/20), so the trim is exactly (3 leading, 0 trailing).
    const WrinklePath adj = adjust_path(g, table, b, full, 0.2);
    REQUIRE(adj.nodes.size() == 18);
    REQUIRE(adj.nodes.front() == GridPoint{3, 0});
    REQUIRE(adj.nodes.back() == GridPoint{20, 0});
    REQUIRE(adj.normalized_length == 0.0);

    // a = 0 forbids every shift.
    const WrinklePath kept = adjust_path(g, table, b, full, 0.0);
    REQUIRE(kept.nodes == full.nodes);

    REQUIRE_THROWS_AS(adjust_path(g, table, b, full, 1.0), UsageError);
    REQUIRE_THROWS_AS(adjust_path(g, table, b, full, -0.1), UsageError);
}

TEST_CASE("end trimming leaves uniform paths alone", "[wrinkles]") {
    WristGraph g = make_grid(1, 21, 0.5);
    Boundaries b;
    b.up = {{0, 0}};
    b.down = {{20, 0}};
    PathTable table(g);
    const WrinklePath full = detail::make_path(g, table.path(0, 20));
    // Every candidate has the same normalized length, and improvement must
    // be strict, so nothing changes.
    const WrinklePath adj = adjust_path(g, table, b, full, 0.2);
    REQUIRE(adj.nodes == full.nodes);
}

TEST_CASE("end trimming never worsens normalized length and is idempotent",
          "[wrinkles]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(400 + seed);
        const int w = 6 + static_cast<int>(rng.below(7));
        const int h = 8 + static_cast<int>(rng.below(9));
        WristGraph g = make_grid(w, h);
        for (auto& x : g.gx) x = rng.uniform();
        const Boundaries b = boundaries(g);
        PathTable table(g);

        const int sc = static_cast<int>(rng.below(w));
        const int fc = static_cast<int>(rng.below(w));
        const WrinklePath p =
            detail::make_path(g, table.path(g.node(0, sc), g.node(h - 1, fc)));
        const WrinklePath adj = adjust_path(g, table, b, p, 0.2);
        REQUIRE(adj.normalized_length <= p.normalized_length);
        const WrinklePath again = adjust_path(g, table, b, adj, 0.2);
        REQUIRE(again.nodes == adj.nodes);
        REQUIRE(again.normalized_length == adj.normalized_length);
    }
}

namespace {

/// 40x20 toy wrist: two cheap vertical corridors, one free (column 5) and
/// one nearly free (column 12), in a unit-cost field.
WristGraph two_corridor_graph() {
    WristGraph g = make_grid(20, 40);
    for (int r = 0; r < 40; ++r) {
        g.gx[static_cast<std::size_t>(g.node(r, 5))] = 0.0;
        g.gx[static_cast<std::size_t>(g.node(r, 12))] = 0.001;
    }
    return g;
}

} // namespace

TEST_CASE("wrinkle detection returns the two corridors in cost order",
          "[wrinkles]") {
    const WristGraph g = two_corridor_graph();
    const Boundaries b = boundaries(g);
    const auto paths = detect_wrinkles(g, b, 0.2, false);

    REQUIRE(paths[0].normalized_length == 0.0);
    REQUIRE(paths[1].normalized_length ==
            Catch::Approx(0.001).epsilon(0.01));
    REQUIRE(detail::mean_col(paths[0]) == Catch::Approx(5.0).margin(1.0));
    REQUIRE(detail::mean_col(paths[1]) == Catch::Approx(12.0).margin(1.0));

    // The second path's interior never touches the axial cross around any
    // node of the first: the carving erodes that whole neighborhood.
    std::set<std::pair<int, int>> p1;
    for (const auto& n : paths[0].nodes) p1.insert({n.r, n.c});
    for (std::size_t i = 1; i + 1 < paths[1].nodes.size(); ++i) {
        const auto& q = paths[1].nodes[i];
        REQUIRE(p1.count({q.r, q.c}) == 0);
        REQUIRE(p1.count({q.r - 1, q.c}) == 0);
        REQUIRE(p1.count({q.r + 1, q.c}) == 0);
        REQUIRE(p1.count({q.r, q.c - 1}) == 0);
        REQUIRE(p1.count({q.r, q.c + 1}) == 0);
    }
}

TEST_CASE("key point location orders wrinkles left to right and tags the "
          "procedure",
          "[wrinkles]") {
    const WristGraph g = two_corridor_graph();

    const KeyPointSet plain = locate_keypoints(g, 0.2, false);
    REQUIRE(plain.procedure == Procedure::kProc2);
    REQUIRE(plain.width == 20);
    REQUIRE(plain.height == 40);
    REQUIRE(detail::mean_col(plain.wrinkles[0]) <
            detail::mean_col(plain.wrinkles[1]));
    REQUIRE(plain.boundaries.up.size() == 20);
    REQUIRE(plain.boundaries.down.size() == 20);

    const KeyPointSet trimmed = locate_keypoints(g, 0.2, true);
    REQUIRE(trimmed.procedure == Procedure::kProc23);
    // Both corridors already have uniform per-edge cost, so trimming finds
    // no strict improvement and the geometry matches the plain run.
    REQUIRE(trimmed.wrinkles[0].nodes == plain.wrinkles[0].nodes);
    REQUIRE(trimmed.wrinkles[1].nodes == plain.wrinkles[1].nodes);
}

TEST_CASE("wrinkle detection refuses degenerate masks", "[wrinkles]") {
    SECTION("boundaries need at least one foreground pixel") {
        WristGraph g = make_grid(4, 4);
        g.fg.assign(g.fg.size(), 0);
        REQUIRE_THROWS_AS(boundaries(g), DataError);
    }
    SECTION("no route between the boundaries") {
        WristGraph g = make_grid(2, 5);
        for (int r = 1; r <= 3; ++r)
            for (int c = 0; c < 2; ++c)
                g.fg[static_cast<std::size_t>(g.node(r, c))] = 0;
        const Boundaries b = boundaries(g);
        REQUIRE_THROWS_AS(detect_wrinkles(g, b, 0.2, false), NumericError);
    }
    SECTION("removing the first path leaves no second route") {
        WristGraph g = make_grid(1, 40);
        const Boundaries b = boundaries(g);
        REQUIRE_THROWS_AS(detect_wrinkles(g, b, 0.2, false), NumericError);
    }
}

TEST_CASE("key point sets round-trip through their text form", "[wrinkles]") {
    const WristGraph g = two_corridor_graph();
    const KeyPointSet kp = locate_keypoints(g, 0.2, true);

    const auto path = temp_file("wm_keypoints.txt");
    save_keypoints(kp, path.string());
    const KeyPointSet back = load_keypoints(path.string());
    std::filesystem::remove(path);

    REQUIRE(back.width == kp.width);
    REQUIRE(back.height == kp.height);
    REQUIRE(back.procedure == kp.procedure);
    REQUIRE(back.boundaries.up == kp.boundaries.up);
    REQUIRE(back.boundaries.down == kp.boundaries.down);
    REQUIRE(back.wrinkles[0].nodes == kp.wrinkles[0].nodes);
    REQUIRE(back.wrinkles[1].nodes == kp.wrinkles[1].nodes);
    // Normalized lengths live in memory only.
    REQUIRE(back.wrinkles[0].normalized_length == 0.0);
}

TEST_CASE("key point loading rejects malformed files", "[wrinkles]") {
    const auto path = temp_file("wm_keypoints_bad.txt");
    auto write_file = [&](const char* text) {
        std::ofstream out(path);
        out << text;
    };

    REQUIRE_THROWS_AS(load_keypoints("/nonexistent/keypoints.txt"), DataError);

    write_file("UP 0 0\nDOWN 1 0\nW1 0 0\nW2 1 0\n"); // no frame header
    REQUIRE_THROWS_AS(load_keypoints(path.string()), DataError);

    write_file("# frame: 2 2\nUP 0 0\nDOWN 1 0\nW1 0 0\nGHOST 1 0\n");
    REQUIRE_THROWS_AS(load_keypoints(path.string()), DataError);

    write_file("# procedure: Proc9\n# frame: 2 2\nUP 0 0\n");
    REQUIRE_THROWS_AS(load_keypoints(path.string()), DataError);

    write_file("# frame: 2 2\nUP 0\n");
    REQUIRE_THROWS_AS(load_keypoints(path.string()), DataError);

    write_file("# frame: 2 2\nUP 0 0\nDOWN 1 0\nW1 0 0\n"); // W2 missing
    REQUIRE_THROWS_AS(load_keypoints(path.string()), DataError);

    std::filesystem::remove(path);
}
