#ifndef WRISTMATCH_GALLERY_HPP
#define WRISTMATCH_GALLERY_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wristmatch/binio.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/matrix.hpp"
#include "wristmatch/parallel.hpp"
#include "wristmatch/pls.hpp"
#include "wristmatch/roi_extract.hpp"
#include "wristmatch/svm.hpp"

namespace wristmatch {

/// The four recognition systems: a matcher (PLS or SVM) applied to one of
/// the two ROI variants.
enum class RecognitionSystem { kPls1 = 0, kPls2 = 1, kSvm1 = 2, kSvm2 = 3 };
inline constexpr int kSystemCount = 4;

inline const char* variant_label(RoiVariant v) {
    return v == RoiVariant::kRoi1 ? "ROI#1" : "ROI#2";
}

inline const char* system_name(RecognitionSystem s) {
    switch (s) {
        case RecognitionSystem::kPls1: return "RS_PLS1";
        case RecognitionSystem::kPls2: return "RS_PLS2";
        case RecognitionSystem::kSvm1: return "RS_SVM1";
        case RecognitionSystem::kSvm2: return "RS_SVM2";
    }
    throw UsageError("unknown recognition system");
}

/// One training observation: the descriptor of one ROI of one image.
struct GallerySample {
    std::string wrist_id;
    RoiVariant variant = RoiVariant::kRoi1;
    std::vector<double> features;
};

struct WristClassifiers {
    PlsModel pls;
    SvmModel svm;
};

/// Immutable after training; scoring is reentrant. Wrist ids are kept
/// sorted so every table and file is insertion-order independent.
struct GalleryModel {
    std::vector<std::string> wrist_ids;
    std::array<std::vector<WristClassifiers>, 2> classifiers; // per variant
    std::size_t feature_dim = 0;
    int pls_components = kPlsComponents;
    double svm_c = kSvmC;

    static std::size_t variant_index(RoiVariant v) {
        return v == RoiVariant::kRoi1 ? 0 : 1;
    }
    bool has_variant(RoiVariant v) const {
        return !classifiers[variant_index(v)].empty();
    }
    int wrist_index(const std::string& id) const {
        const auto it =
            std::lower_bound(wrist_ids.begin(), wrist_ids.end(), id);
        if (it == wrist_ids.end() || *it != id) return -1;
        return static_cast<int>(it - wrist_ids.begin());
    }
};

/// Scores for every gallery wrist plus the descending-order permutation.
/// The sort is stable over the sorted registry, so ties rank the smaller
/// wrist id first.
struct ScoreTable {
    std::vector<std::string> wrist_ids; // registry order
    std::vector<double> scores;         // registry order
    std::vector<int> order;             // order[0] indexes the best score

    int rank_of(const std::string& id) const {
        for (std::size_t r = 0; r < order.size(); ++r)
            if (wrist_ids[static_cast<std::size_t>(order[r])] == id)
                return static_cast<int>(r) + 1;
        throw UsageError("rank_of: wrist id not in the table: " + id);
    }
    const std::string& top() const {
        if (order.empty()) throw UsageError("top: empty score table");
        return wrist_ids[static_cast<std::size_t>(order[0])];
    }
};

inline ScoreTable make_score_table(const std::vector<std::string>& ids,
                                   std::vector<double> scores) {
    if (ids.size() != scores.size())
        throw UsageError("make_score_table: id/score length mismatch");
    ScoreTable table;
    table.wrist_ids = ids;
    table.scores = std::move(scores);
    table.order.resize(ids.size());
    std::iota(table.order.begin(), table.order.end(), 0);
    std::stable_sort(table.order.begin(), table.order.end(),
                     [&](int a, int b) {
                         return table.scores[static_cast<std::size_t>(a)] >
                                table.scores[static_cast<std::size_t>(b)];
                     });
    return table;
}

/// One-against-all training: for every wrist id and every ROI variant
/// present in the samples, fit a PLS and an SVM on +1 rows (that wrist)
/// versus -1 rows (everyone else). Classifiers train in parallel.
inline GalleryModel train_gallery(const std::vector<GallerySample>& samples,
                                  int components = kPlsComponents,
                                  double c = kSvmC, int jobs = 1) {
    if (samples.empty()) throw UsageError("train_gallery: no samples");

    GalleryModel model;
    model.pls_components = components;
    model.svm_c = c;
    model.feature_dim = samples.front().features.size();
    if (model.feature_dim == 0)
        throw UsageError("train_gallery: empty feature vectors");
    for (const auto& s : samples) {
        if (s.features.size() != model.feature_dim)
            throw UsageError("train_gallery: inconsistent feature lengths");
        model.wrist_ids.push_back(s.wrist_id);
    }
    std::sort(model.wrist_ids.begin(), model.wrist_ids.end());
    model.wrist_ids.erase(
        std::unique(model.wrist_ids.begin(), model.wrist_ids.end()),
        model.wrist_ids.end());
    const std::size_t m = model.wrist_ids.size();
    if (m < 2)
        throw UsageError("train_gallery: one-vs-all training needs at least "
                         "2 distinct gallery wrists, got " +
                         std::to_string(m));

    for (RoiVariant variant : {RoiVariant::kRoi1, RoiVariant::kRoi2}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].variant == variant) rows.push_back(i);
        if (rows.empty()) continue; // variant not requested

        // registry-major row order keeps training order-free
        std::stable_sort(rows.begin(), rows.end(),
                         [&](std::size_t a, std::size_t b) {
                             return samples[a].wrist_id < samples[b].wrist_id;
                         });
        for (std::size_t w = 0; w < m; ++w) {
            bool any = false;
            for (std::size_t r : rows)
                any |= samples[r].wrist_id == model.wrist_ids[w];
            if (!any)
                throw DataError("train_gallery: wrist " + model.wrist_ids[w] +
                                " has no " + variant_label(variant) +
                                " samples");
        }

        Matrix x(rows.size(), model.feature_dim);
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::copy(samples[rows[i]].features.begin(),
                      samples[rows[i]].features.end(), x.row(i));

        auto& bank = model.classifiers[GalleryModel::variant_index(variant)];
        bank.resize(m);
        parallel_for(m, jobs, [&](std::size_t w) {
            std::vector<double> y(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                y[i] = samples[rows[i]].wrist_id == model.wrist_ids[w] ? 1.0
                                                                       : -1.0;
            bank[w].pls = pls_train(x, y, components);
            bank[w].svm = svm_train(x, y, c);
        });
    }
    return model;
}

/// Score one probe against every gallery wrist with all four systems,
/// in the order RS_PLS1, RS_PLS2, RS_SVM1, RS_SVM2.
inline std::array<ScoreTable, kSystemCount> match_probe(
    const GalleryModel& gallery, const std::vector<double>& roi1_features,
    const std::vector<double>& roi2_features) {
    for (RoiVariant v : {RoiVariant::kRoi1, RoiVariant::kRoi2})
        if (!gallery.has_variant(v))
            throw UsageError(std::string("match_probe: gallery lacks ") +
                             variant_label(v) + " classifiers");

    std::array<ScoreTable, kSystemCount> tables;
    const std::size_t m = gallery.wrist_ids.size();
    for (int sys = 0; sys < kSystemCount; ++sys) {
        const bool pls = sys < 2;
        const auto& feats = (sys % 2 == 0) ? roi1_features : roi2_features;
        const auto& bank = gallery.classifiers[static_cast<std::size_t>(sys % 2)];
        std::vector<double> scores(m);
        for (std::size_t w = 0; w < m; ++w)
            scores[w] = pls ? pls_score(bank[w].pls, feats)
                            : svm_score(bank[w].svm, feats);
        tables[static_cast<std::size_t>(sys)] =
            make_score_table(gallery.wrist_ids, std::move(scores));
    }
    return tables;
}

// Versioned container: header, wrist-id table, then per-variant,
// per-wrist classifier records with 64-bit floats, so a reloaded gallery
// reproduces scores bit-exactly.

namespace detail {

inline void write_pls(std::ostream& os, const PlsModel& m) {
    binio::write_u32(os, 0); // record tag
    binio::write_u32(os, static_cast<std::uint32_t>(m.beta.size()));
    binio::write_u32(os, static_cast<std::uint32_t>(m.components));
    binio::write_f64(os, m.y_mean);
    for (double v : m.beta) binio::write_f64(os, v);
    for (double v : m.x_mean) binio::write_f64(os, v);
    for (double v : m.x_scale) binio::write_f64(os, v);
}

inline PlsModel read_pls(std::istream& is, std::size_t d) {
    if (binio::read_u32(is) != 0)
        throw DataError("gallery file: expected a PLS record");
    if (binio::read_u32(is) != d)
        throw DataError("gallery file: PLS dimension mismatch");
    PlsModel m;
    m.components = static_cast<int>(binio::read_u32(is));
    m.y_mean = binio::read_f64(is);
    m.beta.resize(d);
    m.x_mean.resize(d);
    m.x_scale.resize(d);
    for (auto& v : m.beta) v = binio::read_f64(is);
    for (auto& v : m.x_mean) v = binio::read_f64(is);
    for (auto& v : m.x_scale) v = binio::read_f64(is);
    return m;
}

inline void write_svm(std::ostream& os, const SvmModel& m) {
    binio::write_u32(os, 1); // record tag
    binio::write_u32(os, static_cast<std::uint32_t>(m.weight.size()));
    binio::write_f64(os, m.bias);
    binio::write_f64(os, m.c);
    for (double v : m.weight) binio::write_f64(os, v);
}

inline SvmModel read_svm(std::istream& is, std::size_t d) {
    if (binio::read_u32(is) != 1)
        throw DataError("gallery file: expected an SVM record");
    if (binio::read_u32(is) != d)
        throw DataError("gallery file: SVM dimension mismatch");
    SvmModel m;
    m.bias = binio::read_f64(is);
    m.c = binio::read_f64(is);
    m.weight.resize(d);
    for (auto& v : m.weight) v = binio::read_f64(is);
    return m;
}

} // namespace detail

inline void save_gallery(const GalleryModel& model, const std::string& path) {
    auto os = binio::open_out(path);
    binio::write_magic(os, "WMGALL\x01\x00");
    binio::write_u32(os, 1);
    binio::write_u32(os, static_cast<std::uint32_t>(model.feature_dim));
    binio::write_u32(os, static_cast<std::uint32_t>(model.pls_components));
    binio::write_f64(os, model.svm_c);
    std::uint32_t mask = 0;
    if (model.has_variant(RoiVariant::kRoi1)) mask |= 1;
    if (model.has_variant(RoiVariant::kRoi2)) mask |= 2;
    binio::write_u32(os, mask);
    binio::write_u32(os, static_cast<std::uint32_t>(model.wrist_ids.size()));
    for (const auto& id : model.wrist_ids) binio::write_string(os, id);
    for (std::size_t v = 0; v < 2; ++v)
        for (const auto& pair : model.classifiers[v]) {
            detail::write_pls(os, pair.pls);
            detail::write_svm(os, pair.svm);
        }
    if (!os) throw DataError("save_gallery: write failed: " + path);
}

inline GalleryModel load_gallery(const std::string& path) {
    auto is = binio::open_in(path);
    binio::expect_magic(is, "WMGALL\x01\x00", "gallery file");
    const auto version = binio::read_u32(is);
    if (version != 1)
        throw DataError("gallery file: unsupported version " +
                        std::to_string(version) + ": " + path);
    GalleryModel model;
    model.feature_dim = binio::read_u32(is);
    model.pls_components = static_cast<int>(binio::read_u32(is));
    model.svm_c = binio::read_f64(is);
    const auto mask = binio::read_u32(is);
    const auto m = binio::read_u32(is);
    model.wrist_ids.resize(m);
    for (auto& id : model.wrist_ids) id = binio::read_string(is);
    for (std::size_t v = 0; v < 2; ++v) {
        if (!(mask & (1u << v))) continue;
        model.classifiers[v].resize(m);
        for (auto& pair : model.classifiers[v]) {
            pair.pls = detail::read_pls(is, model.feature_dim);
            pair.svm = detail::read_svm(is, model.feature_dim);
        }
    }
    if (!is) throw DataError("gallery file: truncated: " + path);
    return model;
}

} // namespace wristmatch

#endif
