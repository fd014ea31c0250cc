// Acceptance gate for the wrist-identification pipeline. Every contract the
// library ships under is checked here against an independent oracle or an
// analytic identity, one PASS/FAIL line per check, nonzero exit on any
// failure. The final block generates a 20-identity synthetic benchmark and
// runs the full pipeline on it twice (once for quality, once to prove the
// report is byte-stable), which dominates the runtime.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wristmatch/experiment.hpp"
#include "wristmatch/synthetic.hpp"

using namespace wristmatch;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in && !in.eof()) throw DataError("cannot read " + p.string());
    return ss.str();
}

// ---------------------------------------------------------------------------
// Shortest paths vs a label-correcting Bellman-Ford oracle. Both sides add
// edge weights start-to-end in the same association order, so costs are
// compared exactly; infinities (disconnected fragments) compare equal too.

double bf_cost(const WristGraph& g, int s, int f) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.size(), inf);
    dist[static_cast<std::size_t>(s)] = 0.0;
    bool changed = true;
    int sweeps = 0;
    while (changed) {
        if (++sweeps > static_cast<int>(g.size()) + 1)
            return -1.0; // negative cycle: impossible here, flag loudly
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
                    const double nd = dist[static_cast<std::size_t>(u)] +
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

void check_shortest_paths() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    int masks = 0, queries = 0, mismatches = 0;
    while (masks < 200) {
        WristGraph g;
        g.width = 4 + static_cast<int>(rng.below(17));  // <= 20
        g.height = 4 + static_cast<int>(rng.below(37)); // <= 40
        const auto nodes =
            static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height);
        g.fg.assign(nodes, 1);
        g.gx.assign(nodes, 0.0);
        std::vector<int> fg_ids;
        for (int id = 0; id < static_cast<int>(g.size()); ++id) {
            g.fg[static_cast<std::size_t>(id)] = rng.uniform() < 0.85 ? 1 : 0;
            g.gx[static_cast<std::size_t>(id)] = rng.uniform();
            if (g.fg[static_cast<std::size_t>(id)]) fg_ids.push_back(id);
        }
        if (fg_ids.size() < 2) continue;
        ++masks;

        PathTable table(g);
        for (int trial = 0; trial < 4; ++trial) {
            const int s = fg_ids[rng.below(fg_ids.size())];
            const int f = fg_ids[rng.below(fg_ids.size())];
            ++queries;
            if (table.cost(s, f) != bf_cost(g, s, f)) ++mismatches;
        }
    }
    const double dt = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "200 masks, %d queries, %d mismatches, %.1fs", queries,
                  mismatches, dt);
    report(mismatches == 0 && dt < 60.0, "shortest-path oracle", buf);
}

// ---------------------------------------------------------------------------
// Texture code maps, exhaustively over all 256 byte codes. Circular bit
// transitions are recounted here from scratch.

int transitions(int code) {
    int t = 0;
    for (int i = 0; i < 8; ++i)
        t += ((code >> i) & 1) != ((code >> ((i + 1) % 8)) & 1);
    return t;
}

int rotate8(int code, int k) {
    return ((code << k) | (code >> (8 - k))) & 0xff;
}

void check_lbp_maps() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& riu2 = detail::lbp_riu2_map();
    const auto& u2 = detail::lbp_u2_map();

    std::set<int> riu2_classes(riu2.begin(), riu2.end());
    std::set<int> u2_classes(u2.begin(), u2.end());

    bool rotation_ok = true;
    for (int code = 0; code < 256; ++code)
        for (int k = 1; k < 8; ++k)
            rotation_ok = rotation_ok && riu2[static_cast<std::size_t>(code)] ==
                                             riu2[static_cast<std::size_t>(
                                                 rotate8(code, k))];

    // nonuniform codes share one catch-all bin; uniform codes never use it
    bool catch_all_ok = true;
    for (int code = 0; code < 256; ++code)
        catch_all_ok =
            catch_all_ok &&
            (u2[static_cast<std::size_t>(code)] == 58) == (transitions(code) > 2);

    const double dt = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "riu2 %zu classes%s, u2 %zu classes, catch-all %s, %.3fs",
                  riu2_classes.size(),
                  rotation_ok ? " rotation-invariant" : " ROTATION BROKEN",
                  u2_classes.size(),
                  catch_all_ok ? "iff transitions > 2" : "WRONG", dt);
    report(riu2_classes.size() == 10 && rotation_ok && u2_classes.size() == 59 &&
               catch_all_ok && dt < 1.0,
           "texture code maps", buf);
}

// ---------------------------------------------------------------------------
// Descriptor layout: the three segments at their documented lengths, and the
// full vector as their exact concatenation, on 100 noise ROIs.

void check_feature_dims() {
    Rng rng(77);
    bool ok = true;
    for (int n = 0; n < 100 && ok; ++n) {
        RoiImage roi;
        roi.rgb = RgbImage(kRoiWidth, kRoiHeight);
        roi.variant = n % 2 ? RoiVariant::kRoi2 : RoiVariant::kRoi1;
        for (ImagePlane* ch : {&roi.rgb.r, &roi.rgb.g, &roi.rgb.b})
            for (auto& v : ch->data) v = rng.uniform();

        std::vector<GridBlock> small_blocks, large_blocks;
        for (int g = 0; g < kSmallGridCount; ++g)
            for (const auto& b : grid_blocks(kGrids[g], kRoiWidth, kRoiHeight))
                small_blocks.push_back(b);
        for (int g = kSmallGridCount; g < kGridCount; ++g)
            for (const auto& b : grid_blocks(kGrids[g], kRoiWidth, kRoiHeight))
                large_blocks.push_back(b);

        std::vector<double> texture;
        for (const ImagePlane* ch : {&roi.rgb.r, &roi.rgb.g, &roi.rgb.b}) {
            const auto fine = lbp_riu2_hist(*ch, small_blocks);
            const auto coarse = lbp_u2_hist(*ch, large_blocks);
            texture.insert(texture.end(), fine.begin(), fine.end());
            texture.insert(texture.end(), coarse.begin(), coarse.end());
        }
        const ImagePlane gray = luma(roi.rgb);
        const auto orient =
            gabor_histograms(roi_gabor_bank().orientation_field(gray));
        const auto sift = dense_sift(gray);

        ok = ok && texture.size() == 13074 && orient.size() == 2112 &&
             sift.size() == 1280;

        const FeatureVector fv = extract_features(roi);
        ok = ok && fv.values.size() == 16466;
        ok = ok && std::equal(texture.begin(), texture.end(), fv.values.begin());
        ok = ok && std::equal(orient.begin(), orient.end(),
                              fv.values.begin() + 13074);
        ok = ok &&
             std::equal(sift.begin(), sift.end(), fv.values.begin() + 15186);
    }
    report(ok, "descriptor layout",
           "100 ROIs, segments 13074 + 2112 + 1280 = 16466, concatenation "
           "verified");
}

// ---------------------------------------------------------------------------
// Regression oracle: with one predictor and one component the latent model
// collapses to ordinary least squares, and score columns of the iterative
// fit are mutually orthogonal.

void check_pls() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(31);
    double max_rel = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 8 + rng.below(25);
        Matrix x(n, 1);
        std::vector<double> y(n);
        double ols = 0.0;
        do {
            double sx = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x.at(i, 0) = rng.uniform(-3.0, 3.0);
                y[i] = rng.uniform(-2.0, 2.0) + 0.8 * x.at(i, 0);
                sx += x.at(i, 0);
                sy += y[i];
            }
            sx /= static_cast<double>(n);
            sy /= static_cast<double>(n);
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sxx += (x.at(i, 0) - sx) * (x.at(i, 0) - sx);
                sxy += (x.at(i, 0) - sx) * (y[i] - sy);
            }
            ols = sxy / sxx;
        } while (std::abs(ols) < 1e-3); // keep the relative error well-posed
        const PlsModel model = pls_train(x, y, 1);
        max_rel = std::max(max_rel, std::abs(model.beta[0] - ols) /
                                        std::abs(ols));
    }

    double max_orth = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 20 + rng.below(21), d = 8 + rng.below(9);
        Matrix x(n, d);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) x.at(i, j) = rng.normal();
            y[i] = i % 2 ? 1.0 : -1.0;
        }
        PlsTrainingState state;
        pls_train(x, y, 5, &state);
        for (std::size_t a = 0; a < state.t.cols; ++a)
            for (std::size_t b = a + 1; b < state.t.cols; ++b) {
                double dot = 0.0, na = 0.0, nb = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += state.t.at(i, a) * state.t.at(i, b);
                    na += state.t.at(i, a) * state.t.at(i, a);
                    nb += state.t.at(i, b) * state.t.at(i, b);
                }
                max_orth =
                    std::max(max_orth, std::abs(dot) / std::sqrt(na * nb));
            }
    }

    const double dt = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "50 slopes vs least squares, max rel err %.2e; score "
                  "orthogonality %.2e, %.2fs",
                  max_rel, max_orth, dt);
    report(max_rel <= 1e-10 && max_orth <= 1e-8 && dt < 5.0,
           "latent regression oracle", buf);
}

// ---------------------------------------------------------------------------
// Tail-model fits on deterministic inverse-CDF grids, plus the closed-form
// identities of the distribution itself.

void check_weibull_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    double max_rel = 0.0;
    for (const auto& [a, b] : std::array<std::array<double, 2>, 3>{
             {{2.0, 1.5}, {1.0, 1.0}, {5.0, 0.8}}}) {
        std::vector<double> grid(1000);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double p = (static_cast<double>(i) + 0.5) / 1000.0;
            grid[i] = a * std::pow(-std::log(1.0 - p), 1.0 / b);
        }
        const WeibullFit fit = weibull_fit(grid);
        max_rel = std::max(max_rel, std::abs(fit.scale - a) / a);
        max_rel = std::max(max_rel, std::abs(fit.shape - b) / b);
    }
    const double dt = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "(2,1.5) (1,1) (5,0.8) on 1000-point grids, max rel err "
                  "%.2f%%, %.3fs",
                  100.0 * max_rel, dt);
    report(max_rel <= 0.02 && dt < 1.0, "tail-model recovery", buf);
}

void check_weibull_identities() {
    double max_dev = 0.0;
    const double at_scale = 1.0 - std::exp(-1.0);
    for (double a : {0.5, 1.0, 2.0, 7.5})
        for (double b : {0.6, 1.0, 1.5, 4.0}) {
            const WeibullFit fit{b, a, 0.0, 0};
            max_dev = std::max(max_dev,
                               std::abs(weibull_cdf(a, fit) - at_scale));
            const double median = a * std::pow(std::log(2.0), 1.0 / b);
            max_dev =
                std::max(max_dev, std::abs(weibull_cdf(median, fit) - 0.5));
        }
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "F(a) = 1 - 1/e and F(median) = 1/2, max dev %.2e", max_dev);
    report(max_dev <= 1e-12, "tail-model identities", buf);
}

// ---------------------------------------------------------------------------
// Point-set registration on clouds with known ground truth.

void check_registration() {
    const auto t0 = std::chrono::steady_clock::now();

    double id_dev = 0.0;
    for (std::uint64_t seed : {11, 21, 31}) {
        Rng rng(seed);
        std::vector<std::array<double, 2>> pts;
        for (int i = 0; i < 100; ++i)
            pts.push_back({rng.uniform(0.0, 64.0), rng.uniform(0.0, 40.0)});
        const AffineTransform t = cpd_affine_register(pts, pts);
        id_dev = std::max({id_dev, std::abs(t.linear[0] - 1.0),
                           std::abs(t.linear[1]), std::abs(t.linear[2]),
                           std::abs(t.linear[3] - 1.0),
                           std::abs(t.translation[0]),
                           std::abs(t.translation[1])});
    }

    AffineTransform truth;
    truth.linear = {2.0, 0.3, 0.0, 2.0};
    truth.translation = {5.0, -3.0};
    double af_dev = 0.0;
    for (std::uint64_t seed : {13, 23, 33}) {
        Rng rng(seed);
        std::vector<std::array<double, 2>> src, dst;
        for (int i = 0; i < 100; ++i)
            src.push_back({rng.uniform(0.0, 64.0), rng.uniform(0.0, 40.0)});
        for (const auto& p : src) dst.push_back(truth.apply(p));
        const AffineTransform t = cpd_affine_register(src, dst);
        for (int i = 0; i < 4; ++i)
            af_dev = std::max(af_dev, std::abs(t.linear[i] - truth.linear[i]));
        af_dev = std::max(af_dev,
                          std::abs(t.translation[0] - truth.translation[0]));
        af_dev = std::max(af_dev,
                          std::abs(t.translation[1] - truth.translation[1]));
        for (std::size_t i = 0; i < src.size(); ++i) {
            const auto q = t.apply(src[i]);
            af_dev = std::max({af_dev, std::abs(q[0] - dst[i][0]),
                               std::abs(q[1] - dst[i][1])});
        }
    }

    const double dt = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "identity dev %.1e, scale/shear/translation dev %.1e on "
                  "100-point clouds, %.2fs",
                  id_dev, af_dev, dt);
    report(id_dev <= 1e-6 && af_dev <= 1e-3 && dt < 5.0,
           "point-set registration", buf);
}

// ---------------------------------------------------------------------------
// Meta-selection on constructed tables where exactly one system's top score
// sits 100 tail standard deviations above its own tail.

void check_meta_outlier() {
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.push_back("w" + std::to_string(i));

    Rng rng(909);
    int hits = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        const int outlier = trial % 4;
        std::vector<ScoreTable> tables;
        for (int sys = 0; sys < 4; ++sys) {
            std::vector<double> rest(19);
            for (auto& v : rest) v = rng.uniform(0.2, 0.8);
            std::sort(rest.begin(), rest.end(), std::greater<>());

            // the fitted window is ranks 2..10 of the final table
            double mean = 0.0, sq = 0.0;
            for (int j = 0; j < 9; ++j) mean += rest[static_cast<std::size_t>(j)];
            mean /= 9.0;
            for (int j = 0; j < 9; ++j) {
                const double d = rest[static_cast<std::size_t>(j)] - mean;
                sq += d * d;
            }
            const double sd = std::sqrt(sq / 9.0);

            std::vector<double> scores;
            scores.push_back(sys == outlier
                                 ? mean + 100.0 * sd
                                 : rest[0] + 0.001 * (rest[0] - rest[8]));
            scores.insert(scores.end(), rest.begin(), rest.end());
            tables.push_back(make_score_table(ids, scores));
        }
        hits += meta_select(tables, 0.5).chosen == outlier;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d/%d outlier systems selected", hits,
                  trials);
    report(hits == trials, "meta-selection outlier", buf);
}

// ---------------------------------------------------------------------------
// The synthetic benchmark: 20 identities, 4 gallery + 2 probe images each,
// difficulty 0.2, one fixed seed. Quality gates, then tail-fraction
// sensitivity over the recorded tables, then a full second run that must
// reproduce every artifact byte for byte.

bool tables_equal(const ScoreTable& a, const ScoreTable& b) {
    return a.wrist_ids == b.wrist_ids && a.scores == b.scores &&
           a.order == b.order;
}

void check_benchmark() {
    namespace fs = std::filesystem;
    const fs::path ws = fs::temp_directory_path() / "wristmatch_acceptance";
    fs::remove_all(ws);
    fs::create_directories(ws);

    const unsigned threads =
        std::max(1u, std::thread::hardware_concurrency());
    ExperimentConfig cfg;
    cfg.jobs = static_cast<int>(threads);

    SynthOptions synth;
    synth.identities = 20;
    synth.gallery_per_id = 4;
    synth.probe_per_id = 2;
    synth.difficulty = 0.2;
    synth.seed = 1;
    synth.subdir = "bench";

    const auto t0 = std::chrono::steady_clock::now();
    const DatasetManifest manifest = synth_dataset(ws.string(), synth);
    const ExperimentReport rep = run_experiment(ws.string(), manifest, cfg);
    const double dt = seconds_since(t0);

    // quality: monotone curves, ensemble at least as good at rank 1 as the
    // weakest single system, and ensemble rank-1 over the gate
    bool monotone = true;
    for (const auto& curve : rep.curves)
        for (std::size_t k = 1; k < curve.values.size(); ++k)
            monotone = monotone && curve.values[k - 1] <= curve.values[k];
    const double wmm = rep.curves[6].rank1();
    double min_rs = 1.0;
    for (int i = 0; i < 4; ++i) min_rs = std::min(min_rs, rep.curves[i].rank1());

    // the budget is stated for 8 cores; scale it when fewer are available
    const double budget =
        600.0 * std::max(1.0, 8.0 / static_cast<double>(threads));
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "WMM rank-1 %.3f, min single-system rank-1 %.3f, curves "
                  "%smonotone, %.0fs (budget %.0fs at %u threads)",
                  wmm, min_rs, monotone ? "" : "NOT ", dt, budget, threads);
    report(wmm >= 0.90 && monotone && wmm >= min_rs && dt < budget,
           "end-to-end synthetic benchmark", buf);

    // re-running selection with a different tail fraction may change which
    // system wins, but never edits a table
    int choice_changes = 0;
    bool unmutated = true, verbatim = true;
    for (const auto& probe : rep.probes) {
        const std::vector<ScoreTable> tables(probe.rs.begin(), probe.rs.end());
        const std::vector<ScoreTable> saved = tables;
        const MetaDecision wide = meta_select(tables, 0.5);
        const MetaDecision narrow = meta_select(tables, 0.1);
        for (std::size_t i = 0; i < tables.size(); ++i)
            unmutated = unmutated && tables_equal(tables[i], saved[i]);
        verbatim = verbatim &&
                   tables_equal(wide.table,
                                saved[static_cast<std::size_t>(wide.chosen)]) &&
                   tables_equal(narrow.table,
                                saved[static_cast<std::size_t>(narrow.chosen)]);
        choice_changes += wide.chosen != narrow.chosen;
    }
    std::snprintf(buf, sizeof buf,
                  "%zu probes, tail 0.5 vs 0.1: %d choice changes, tables "
                  "%s, winners returned %s",
                  rep.probes.size(), choice_changes,
                  unmutated ? "unmutated" : "MUTATED",
                  verbatim ? "verbatim" : "ALTERED");
    report(unmutated && verbatim, "tail-fraction sensitivity", buf);

    // full second pass: regenerate the dataset, rerun the experiment, and
    // demand byte-identical images, manifest, report, and plot
    SynthOptions synth2 = synth;
    synth2.subdir = "bench2";
    synth_dataset(ws.string(), synth2);
    bool dataset_stable = true;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(ws / "bench")) {
        ++files;
        dataset_stable =
            dataset_stable &&
            slurp(entry.path()) == slurp(ws / "bench2" / entry.path().filename());
    }

    const ExperimentReport rep2 = run_experiment(ws.string(), manifest, cfg);
    write_report(rep, (ws / "report1.json").string());
    write_report(rep2, (ws / "report2.json").string());
    const bool report_stable =
        slurp(ws / "report1.json") == slurp(ws / "report2.json");
    const bool plot_stable = render_cmc_svg(rep) == render_cmc_svg(rep2);

    std::snprintf(buf, sizeof buf,
                  "%zu dataset files %s, report %s, plot %s across reruns",
                  files, dataset_stable ? "byte-identical" : "DIFFER",
                  report_stable ? "byte-identical" : "DIFFERS",
                  plot_stable ? "byte-identical" : "DIFFERS");
    report(dataset_stable && report_stable && plot_stable, "determinism", buf);
}

} // namespace

int main() {
    check_shortest_paths();
    check_lbp_maps();
    check_feature_dims();
    check_pls();
    check_weibull_recovery();
    check_weibull_identities();
    check_registration();
    check_meta_outlier();
    check_benchmark();
    std::printf("%s: %d failure%s\n", g_failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE OK",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures ? 1 : 0;
}
