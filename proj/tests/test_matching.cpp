#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "wristmatch/gallery.hpp"
#include "wristmatch/pls.hpp"
#include "wristmatch/svm.hpp"

#include "test_util.hpp"

using namespace wristmatch;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed,
                     double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix x(n, d);
    for (auto& v : x.data) v = dist(rng);
    return x;
}

double hinge_sum(const Matrix& x, const std::vector<double>& y,
                 const SvmModel& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        std::vector<double> row(x.row(i), x.row(i) + x.cols);
        total += std::max(0.0, 1.0 - y[i] * svm_score(m, row));
    }
    return total;
}

std::vector<double> matrix_row(const Matrix& x, std::size_t i) {
    return std::vector<double>(x.row(i), x.row(i) + x.cols);
}

/// Cluster generator: m wrists, one well-separated center per wrist,
/// samples jittered around it. Two variants get different jitter.
std::vector<GallerySample> cluster_samples(int wrists, int per_wrist,
                                           std::size_t d, bool both_variants,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::vector<GallerySample> samples;
    for (int w = 0; w < wrists; ++w) {
        for (int i = 0; i < per_wrist; ++i) {
            for (RoiVariant v : {RoiVariant::kRoi1, RoiVariant::kRoi2}) {
                if (!both_variants && v == RoiVariant::kRoi2) continue;
                GallerySample s;
                s.wrist_id = "w" + std::to_string(w);
                s.variant = v;
                s.features.assign(d, 0.0);
                s.features[static_cast<std::size_t>(w) % d] = 5.0;
                for (auto& f : s.features) f += jitter(rng);
                samples.push_back(std::move(s));
            }
        }
    }
    return samples;
}

} // namespace

TEST_CASE("single-predictor pls with one component is least squares",
          "[matching]") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        const std::size_t n = 40;
        Matrix x(n, 1);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x.at(i, 0) = dist(rng);
            y[i] = 3.2 * x.at(i, 0) - 0.7 + 0.3 * dist(rng);
        }

        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += x.at(i, 0);
            my += y[i];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sxy += (x.at(i, 0) - mx) * (y[i] - my);
            sxx += (x.at(i, 0) - mx) * (x.at(i, 0) - mx);
        }
        const double ols_slope = sxy / sxx;

        const auto model = pls_train(x, y, 1);
        REQUIRE(model.components == 1);
        REQUIRE(model.beta[0] == Catch::Approx(ols_slope).margin(1e-10));
        REQUIRE(pls_score(model, {mx}) == Catch::Approx(my).margin(1e-10));
    }
}

TEST_CASE("pls recovers an exact linear relation", "[matching]") {
    const std::size_t n = 10, d = 3;
    auto x = random_matrix(n, d, 99);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = 2.0 * x.at(i, 0) - x.at(i, 1) + 0.5 * x.at(i, 2) + 4.0;

    PlsTrainingState state;
    const auto model = pls_train(x, y, 3, &state);
    REQUIRE(model.components == 3);

    double f_norm = 0.0;
    for (double v : state.f) f_norm += v * v;
    REQUIRE(std::sqrt(f_norm) < 1e-8);
    for (std::size_t i = 0; i < n; ++i)
        REQUIRE(pls_score(model, matrix_row(x, i)) ==
                Catch::Approx(y[i]).margin(1e-8));
}

TEST_CASE("pls scoring is affine and centered", "[matching]") {
    const std::size_t n = 25, d = 7;
    auto x = random_matrix(n, d, 301);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i % 3 == 0 ? 1.0 : -1.0;
    const auto model = pls_train(x, y, 4);

    REQUIRE(pls_score(model, model.x_mean) ==
            Catch::Approx(model.y_mean).margin(1e-12));

    const auto probe = matrix_row(x, 3);
    const std::vector<double> zero(d, 0.0);
    const double base = pls_score(model, zero);
    for (double a : {-2.0, 0.5, 3.0}) {
        std::vector<double> scaled(d);
        for (std::size_t j = 0; j < d; ++j) scaled[j] = a * probe[j];
        const double lhs = pls_score(model, scaled) - base;
        const double rhs = a * (pls_score(model, probe) - base);
        REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-9));
    }

    // additivity: score(x1 + x2) - base == (score(x1) - base) + (score(x2) - base)
    const auto p2 = matrix_row(x, 7);
    std::vector<double> both(d);
    for (std::size_t j = 0; j < d; ++j) both[j] = probe[j] + p2[j];
    REQUIRE(pls_score(model, both) - base ==
            Catch::Approx((pls_score(model, probe) - base) +
                          (pls_score(model, p2) - base))
                .epsilon(1e-9));
}

TEST_CASE("nipals score columns are orthogonal", "[matching]") {
    const std::size_t n = 20, d = 12;
    auto x = random_matrix(n, d, 555);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1.0 : -1.0;

    PlsTrainingState state;
    const auto model = pls_train(x, y, 5, &state);
    REQUIRE(model.components == 5);
    REQUIRE(state.t.cols == 5);
    for (std::size_t a = 0; a < state.t.cols; ++a)
        for (std::size_t b = a + 1; b < state.t.cols; ++b) {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dot += state.t.at(i, a) * state.t.at(i, b);
                na += state.t.at(i, a) * state.t.at(i, a);
                nb += state.t.at(i, b) * state.t.at(i, b);
            }
            REQUIRE(std::abs(dot) <= 1e-8 * std::sqrt(na * nb));
        }
}

TEST_CASE("pls handles degenerate inputs", "[matching]") {
    auto x = random_matrix(6, 3, 7);
    REQUIRE_THROWS_AS(pls_train(x, std::vector<double>(6, 1.0), 2), DataError);
    REQUIRE_THROWS_AS(pls_train(x, std::vector<double>(4, 1.0), 2), UsageError);
    REQUIRE_THROWS_AS(pls_train(Matrix(1, 3), {1.0}, 1), UsageError);
    REQUIRE_THROWS_AS(pls_train(x, std::vector<double>(6, 1.0), 0), UsageError);

    SECTION("rank-one features truncate the component count") {
        const std::size_t n = 8;
        Matrix r1(n, 3);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = 0.3 * static_cast<double>(i) - 1.0;
            r1.at(i, 0) = v;
            r1.at(i, 1) = 2.0 * v;
            r1.at(i, 2) = -v;
            y[i] = v;
        }
        const auto model = pls_train(r1, y, 3);
        REQUIRE(model.components == 1);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(pls_score(model, matrix_row(r1, i)) ==
                    Catch::Approx(y[i]).margin(1e-9));
    }

    SECTION("zero-variance dimensions keep the layout") {
        const std::size_t n = 12;
        Matrix x2(n, 3);
        std::vector<double> y2(n);
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            x2.at(i, 0) = dist(rng);
            x2.at(i, 1) = 0.77; // constant column
            x2.at(i, 2) = dist(rng);
            y2[i] = x2.at(i, 0) - x2.at(i, 2);
        }
        const auto model = pls_train(x2, y2, 2);
        REQUIRE(model.beta.size() == 3);
        REQUIRE(model.x_scale[1] == 1.0);
        REQUIRE(model.beta[1] == 0.0);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(pls_score(model, matrix_row(x2, i)) ==
                    Catch::Approx(y2[i]).margin(1e-8));
    }
}

TEST_CASE("pls training is deterministic and separates classes",
          "[matching]") {
    const std::size_t n = 30, d = 10;
    auto x = random_matrix(n, d, 808);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i < 10 ? 1.0 : -1.0;
        if (i < 10) x.at(i, 2) += 3.0; // separable direction
    }
    const auto m1 = pls_train(x, y, 5);
    const auto m2 = pls_train(x, y, 5);
    REQUIRE(m1.beta == m2.beta); // bit-identical

    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = pls_score(m1, matrix_row(x, i));
        (y[i] > 0 ? pos : neg) += s;
    }
    REQUIRE(pos / 10.0 > neg / 20.0);

    SECTION("one positive against many negatives") {
        std::vector<double> lone(n, -1.0);
        lone[4] = 1.0;
        const auto lm = pls_train(x, lone, 5);
        const double self = pls_score(lm, matrix_row(x, 4));
        double others = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != 4) others += pls_score(lm, matrix_row(x, i));
        REQUIRE(self > others / static_cast<double>(n - 1));
    }
}

TEST_CASE("svm solves a hand-checked three-point problem", "[matching]") {
    // x = 1,1,1 with labels +,+,-: every decision value is w + b, the
    // regularizer splits the optimum evenly, and the hinge terms pin
    // w + b = 1, so w = b = 1/2.
    Matrix x(3, 1, 1.0);
    const std::vector<double> y = {1.0, 1.0, -1.0};
    const auto model = svm_train(x, y, 1.0);
    REQUIRE(model.weight[0] == Catch::Approx(0.5).margin(1e-6));
    REQUIRE(model.bias == Catch::Approx(0.5).margin(1e-6));
    REQUIRE(svm_score(model, {1.0}) == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(svm_score(model, {1.0}) > 0.0); // majority class wins
}

TEST_CASE("svm reaches zero hinge loss on a separable set", "[matching]") {
    Matrix x(6, 2);
    std::vector<double> y(6);
    const double pts[3][2] = {{2.0, 0.0}, {3.0, 1.0}, {2.5, -0.5}};
    for (int i = 0; i < 3; ++i) {
        x.at(static_cast<std::size_t>(i), 0) = pts[i][0];
        x.at(static_cast<std::size_t>(i), 1) = pts[i][1];
        y[static_cast<std::size_t>(i)] = 1.0;
        x.at(static_cast<std::size_t>(i + 3), 0) = -pts[i][0];
        x.at(static_cast<std::size_t>(i + 3), 1) = -pts[i][1];
        y[static_cast<std::size_t>(i + 3)] = -1.0;
    }
    const auto model = svm_train(x, y, 1.0);
    REQUIRE(hinge_sum(x, y, model) < 1e-8);

    SECTION("rescaling inputs with C/100 keeps the boundary direction") {
        Matrix xs(6, 2);
        for (std::size_t i = 0; i < x.data.size(); ++i)
            xs.data[i] = 10.0 * x.data[i];
        const auto scaled = svm_train(xs, y, 0.01);
        const double cross = model.weight[0] * scaled.weight[1] -
                             model.weight[1] * scaled.weight[0];
        const double dot = model.weight[0] * scaled.weight[0] +
                           model.weight[1] * scaled.weight[1];
        REQUIRE(std::abs(std::atan2(cross, dot)) < 1e-3);
    }
}

TEST_CASE("svm rejects degenerate inputs", "[matching]") {
    Matrix x(4, 2, 0.5);
    REQUIRE_THROWS_AS(svm_train(x, {1.0, 1.0, 1.0, 1.0}, 1.0), DataError);
    REQUIRE_THROWS_AS(svm_train(x, {1.0, -1.0}, 1.0), UsageError);
    REQUIRE_THROWS_AS(svm_train(x, {1.0, -1.0, 1.0, -1.0}, 0.0), UsageError);
    REQUIRE_THROWS_AS(svm_train(Matrix(1, 2), {1.0}, 1.0), UsageError);

    const auto ok = svm_train(x, {1.0, -1.0, 1.0, -1.0}, 1.0);
    REQUIRE_THROWS_AS(svm_score(ok, {1.0, 2.0, 3.0}), UsageError);
}

TEST_CASE("gallery training counts classifiers per variant", "[matching]") {
    const auto samples = cluster_samples(3, 2, 6, false, 31);
    const auto gallery = train_gallery(samples, 2, 1.0);
    REQUIRE(gallery.wrist_ids == std::vector<std::string>{"w0", "w1", "w2"});
    REQUIRE(gallery.has_variant(RoiVariant::kRoi1));
    REQUIRE_FALSE(gallery.has_variant(RoiVariant::kRoi2));
    REQUIRE(gallery.classifiers[0].size() == 3);
    REQUIRE(gallery.classifiers[1].empty());
    for (const auto& pair : gallery.classifiers[0]) {
        REQUIRE(pair.pls.beta.size() == 6);
        REQUIRE(pair.svm.weight.size() == 6);
        for (double v : pair.svm.weight) REQUIRE(std::isfinite(v));
    }

    // both-variant probes cannot run against a one-variant gallery
    const std::vector<double> probe(6, 0.0);
    REQUIRE_THROWS_AS(match_probe(gallery, probe, probe), UsageError);
}

TEST_CASE("gallery training validates its inputs", "[matching]") {
    auto samples = cluster_samples(3, 2, 6, true, 32);
    REQUIRE_THROWS_AS(train_gallery({}), UsageError);
    REQUIRE_THROWS_AS(
        train_gallery({samples[0], samples[1], samples[2], samples[3]}),
        UsageError); // single wrist id

    SECTION("a wrist missing one variant is named") {
        // strip w1's ROI#2 samples
        std::vector<GallerySample> broken;
        for (const auto& s : samples)
            if (!(s.wrist_id == "w1" && s.variant == RoiVariant::kRoi2))
                broken.push_back(s);
        try {
            train_gallery(broken);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            REQUIRE(std::string(e.what()).find("w1") != std::string::npos);
        }
    }

    SECTION("inconsistent feature lengths are refused") {
        samples.back().features.push_back(0.0);
        REQUIRE_THROWS_AS(train_gallery(samples), UsageError);
    }
}

TEST_CASE("self matches rank first on separated clusters", "[matching]") {
    const auto samples = cluster_samples(5, 3, 8, true, 77);
    const auto gallery = train_gallery(samples);
    REQUIRE(gallery.wrist_ids.size() == 5);
    REQUIRE(gallery.classifiers[0].size() == 5);
    REQUIRE(gallery.classifiers[1].size() == 5);

    for (const auto& s : samples) {
        if (s.variant != RoiVariant::kRoi1) continue;
        // pair the stored ROI#1 features with the matching ROI#2 sample
        const GallerySample* other = nullptr;
        for (const auto& t : samples)
            if (t.wrist_id == s.wrist_id && t.variant == RoiVariant::kRoi2) {
                other = &t;
                break;
            }
        REQUIRE(other != nullptr);
        const auto tables = match_probe(gallery, s.features, other->features);
        for (const auto& table : tables) {
            REQUIRE(table.scores.size() == 5);
            REQUIRE(table.rank_of(s.wrist_id) == 1);
            REQUIRE(table.top() == s.wrist_id);
        }
    }
}

TEST_CASE("gallery results ignore sample insertion order", "[matching]") {
    const auto samples = cluster_samples(4, 2, 6, true, 99);
    // rotate whole wrist blocks; intra-wrist order untouched
    std::vector<GallerySample> rotated;
    for (const auto& s : samples)
        if (s.wrist_id == "w2" || s.wrist_id == "w3") rotated.push_back(s);
    for (const auto& s : samples)
        if (s.wrist_id == "w0" || s.wrist_id == "w1") rotated.push_back(s);

    const auto g1 = train_gallery(samples);
    const auto g2 = train_gallery(rotated);
    REQUIRE(g1.wrist_ids == g2.wrist_ids);

    const auto probe1 = samples[0].features;
    const auto probe2 = samples[1].features;
    const auto t1 = match_probe(g1, probe1, probe2);
    const auto t2 = match_probe(g2, probe1, probe2);
    for (int sys = 0; sys < kSystemCount; ++sys) {
        REQUIRE(t1[static_cast<std::size_t>(sys)].scores ==
                t2[static_cast<std::size_t>(sys)].scores);
        REQUIRE(t1[static_cast<std::size_t>(sys)].order ==
                t2[static_cast<std::size_t>(sys)].order);
    }
}

TEST_CASE("score tables sort stably by descending score", "[matching]") {
    const std::vector<std::string> ids = {"a", "b", "c", "d"};
    const auto table = make_score_table(ids, {2.0, 3.0, 2.0, 1.0});
    REQUIRE(table.order == std::vector<int>{1, 0, 2, 3});
    REQUIRE(table.top() == "b");
    REQUIRE(table.rank_of("b") == 1);
    REQUIRE(table.rank_of("a") == 2); // tie resolved toward the earlier id
    REQUIRE(table.rank_of("c") == 3);
    REQUIRE(table.rank_of("d") == 4);
    REQUIRE_THROWS_AS(table.rank_of("zz"), UsageError);
    REQUIRE_THROWS_AS(make_score_table(ids, {1.0}), UsageError);
}

TEST_CASE("gallery files reproduce scores bit-exactly", "[matching]") {
    const auto samples = cluster_samples(3, 2, 5, true, 1234);
    const auto gallery = train_gallery(samples);
    const auto path = temp_file("wm_gallery.model");
    save_gallery(gallery, path.string());
    const auto loaded = load_gallery(path.string());

    REQUIRE(loaded.wrist_ids == gallery.wrist_ids);
    REQUIRE(loaded.feature_dim == gallery.feature_dim);
    REQUIRE(loaded.pls_components == gallery.pls_components);
    REQUIRE(loaded.svm_c == gallery.svm_c);

    const auto t1 = match_probe(gallery, samples[0].features,
                                samples[1].features);
    const auto t2 = match_probe(loaded, samples[0].features,
                                samples[1].features);
    for (int sys = 0; sys < kSystemCount; ++sys)
        REQUIRE(t1[static_cast<std::size_t>(sys)].scores ==
                t2[static_cast<std::size_t>(sys)].scores);

    SECTION("malformed files are data errors") {
        const auto bad = temp_file("wm_gallery_bad.model");
        std::ofstream(bad, std::ios::binary) << "never a gallery";
        REQUIRE_THROWS_AS(load_gallery(bad.string()), DataError);

        std::filesystem::copy_file(
            path, bad, std::filesystem::copy_options::overwrite_existing);
        std::filesystem::resize_file(bad,
                                     std::filesystem::file_size(bad) / 2);
        REQUIRE_THROWS_AS(load_gallery(bad.string()), DataError);
    }
}
