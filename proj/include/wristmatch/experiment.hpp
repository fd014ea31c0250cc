#ifndef WRISTMATCH_EXPERIMENT_HPP
#define WRISTMATCH_EXPERIMENT_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wristmatch/cmc.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/features.hpp"
#include "wristmatch/gallery.hpp"
#include "wristmatch/graph.hpp"
#include "wristmatch/manifest.hpp"
#include "wristmatch/metarec.hpp"
#include "wristmatch/roi_extract.hpp"
#include "wristmatch/segmenter.hpp"
#include "wristmatch/synthetic.hpp"
#include "wristmatch/wrinkles.hpp"
#include "wristmatch/wrist_template.hpp"

namespace wristmatch {

inline constexpr int kWorkingHeight = 200;
inline constexpr int kCurveCount = 7;

inline constexpr const char* kCurveNames[kCurveCount] = {
    "RS_PLS1", "RS_PLS2", "RS_SVM1", "RS_SVM2", "RS_PLS", "RS_SVM", "WMM"};

struct ExperimentConfig {
    int superpixel_k = 200;
    int tree_count = 300;
    // Skin-classifier training rows are capped by deterministic striding so
    // run time stays bounded on large galleries; <= 0 disables the cap.
    int max_skin_rows = 4000;
    double wrinkle_a = 0.2;
    int pls_components = kPlsComponents;
    double svm_c = kSvmC;
    double tail_fraction = kMetaTailFraction;
    std::uint64_t seed = 1; // forest bootstrap streams
    int jobs = 1;
};

/// Everything recorded about one probe: the four raw system tables plus the
/// three meta decisions over {PLS1,PLS2}, {SVM1,SVM2} and all four.
struct ProbeResult {
    std::string id; // manifest path, unique per record
    std::string truth;
    std::array<ScoreTable, kSystemCount> rs;
    MetaDecision meta_pls;
    MetaDecision meta_svm;
    MetaDecision meta_all;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::size_t gallery_size = 0;
    std::array<CmcCurve, kCurveCount> curves;
    std::vector<ProbeResult> probes;
};

namespace detail {

/// Rethrow pipeline errors with a stage tag (and optional item context) so
/// a failed run names the stage and input that broke it.
template <typename Fn>
auto stage(const std::string& tag, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const UsageError& e) {
        throw UsageError("[" + tag + "] " + e.what());
    } catch (const DataError& e) {
        throw DataError("[" + tag + "] " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("[" + tag + "] " + e.what());
    }
}

inline ImagePlane mask_to_working_frame(const std::vector<std::uint8_t>& mask,
                                        int w, int h, bool flip) {
    ImagePlane full(w, h);
    for (std::size_t i = 0; i < mask.size(); ++i)
        full.data[i] = mask[i] ? 1.0 : 0.0;
    if (flip) full = flip_horizontal(full);
    ImagePlane small = resize_to_height(full, kWorkingHeight);
    for (auto& v : small.data) v = v >= 0.5 ? 1.0 : 0.0;
    return small;
}

/// Superpixel rows labeled by ground-truth overlap (skin iff at least half
/// of the superpixel's pixels are inside the mask).
inline void append_skin_rows(const RgbImage& img, const ImagePlane& gt,
                             int superpixel_k,
                             std::vector<std::vector<double>>* rows,
                             std::vector<std::uint8_t>* labels) {
    const ColorStack stack = to_color_stack(img);
    const GradientMapSet grads = gradient_maps(luma(img));
    const SuperpixelLabeling sp = slic(stack, superpixel_k, 10.0);
    const Matrix feats = superpixel_features(sp, stack, grads);

    std::vector<std::int64_t> inside(sp.count, 0), total(sp.count, 0);
    for (std::size_t i = 0; i < sp.labels.size(); ++i) {
        total[sp.labels[i]] += 1;
        if (gt.data[i] >= 0.5) inside[sp.labels[i]] += 1;
    }
    for (int l = 0; l < sp.count; ++l) {
        rows->emplace_back(feats.row(l), feats.row(l) + feats.cols);
        labels->push_back(2 * inside[l] >= total[l] ? 1 : 0);
    }
}

inline RecognitionSystem meta_subsystem(int group, int chosen) {
    // group 0 -> {PLS1, PLS2}, 1 -> {SVM1, SVM2}, 2 -> all four
    const int base = group == 1 ? 2 : 0;
    return static_cast<RecognitionSystem>(base + chosen);
}

} // namespace detail

/// Segmentation plus both key point procedures for one working-frame image.
struct ImageAnalysis {
    SkinMask mask;
    KeyPointSet plain;    // boundary-anchored paths
    KeyPointSet adjusted; // endpoint-trimmed paths
};

/// Segment a working-frame image and locate its key points both ways.
inline ImageAnalysis analyze_image(const RgbImage& working,
                                   const SkinClassifier& skin,
                                   const ExperimentConfig& config) {
    const SegmentOptions seg_opts{config.superpixel_k, 10.0};
    ImageAnalysis st;
    st.mask = segment(working, skin, seg_opts);
    if (st.mask.empty) throw DataError("segmentation found no skin");
    const GraphBuild gb = build_graph(working, st.mask.to_plane());
    st.plain = locate_keypoints(gb.graph, config.wrinkle_a, false);
    st.adjusted = locate_keypoints(gb.graph, config.wrinkle_a, true);
    return st;
}

/// Register each key point set onto the template, warp, crop and describe.
/// Index 0 carries the plain-procedure ROI, index 1 the adjusted one.
inline std::array<FeatureVector, 2> image_descriptors(
    const RgbImage& working, const ImageAnalysis& st,
    const WristTemplate& tpl) {
    const ImagePlane mask = st.mask.to_plane();
    const auto target = tpl.cloud();
    std::array<FeatureVector, 2> out;
    const KeyPointSet* kps[2] = {&st.plain, &st.adjusted};
    const RoiVariant variants[2] = {RoiVariant::kRoi1, RoiVariant::kRoi2};
    for (int v = 0; v < 2; ++v) {
        const AffineTransform a40 =
            cpd_affine_register(keypoint_cloud(*kps[v]), target);
        const AlignedImage aligned = warp_to_template(working, mask, a40);
        RoiImage roi = extract_roi(aligned, tpl, variants[v]);
        out[v] = extract_features(roi);
    }
    return out;
}

/// Train the skin classifier from records' ground-truth mask siblings
/// ("<stem>_mask.png"). Errors are stage-tagged per record.
inline SkinClassifier train_skin_from_records(
    const std::string& workspace,
    const std::vector<const ManifestRecord*>& records,
    const ExperimentConfig& config) {
    std::vector<std::vector<double>> rows;
    std::vector<std::uint8_t> labels;
    for (const auto* rec : records)
        detail::stage("skin-training: " + rec->path, [&] {
            const RgbImage img =
                resize_to_height(load_record_image(workspace, *rec),
                                 kWorkingHeight);
            int mw = 0, mh = 0;
            const auto mask = read_mask_png(
                join_workspace(workspace, mask_path_for(rec->path)), mw, mh);
            const ImagePlane gt =
                detail::mask_to_working_frame(mask, mw, mh, rec->flip);
            if (gt.width != img.width() || gt.height != img.height())
                throw DataError("ground-truth mask size mismatch");
            detail::append_skin_rows(img, gt, config.superpixel_k, &rows,
                                     &labels);
        });

    std::size_t keep = rows.size();
    if (config.max_skin_rows > 0 &&
        keep > static_cast<std::size_t>(config.max_skin_rows)) {
        const std::size_t stride =
            (keep + config.max_skin_rows - 1) / config.max_skin_rows;
        std::size_t w = 0;
        for (std::size_t i = 0; i < rows.size(); i += stride, ++w) {
            if (w != i) rows[w] = std::move(rows[i]);
            labels[w] = labels[i];
        }
        keep = w;
    }
    return detail::stage("skin-training", [&] {
        if (rows.empty()) throw DataError("no training superpixels");
        Matrix x(keep, rows.front().size());
        for (std::size_t i = 0; i < keep; ++i)
            std::copy(rows[i].begin(), rows[i].end(), x.row(i));
        labels.resize(keep);
        ForestParams params;
        params.tree_count = config.tree_count;
        params.seed = config.seed;
        params.jobs = config.jobs;
        return train_skin_classifier(x, labels, params);
    });
}

/// Run the full identification experiment on a manifest: skin-classifier
/// training from gallery ground-truth masks, segmentation, key point
/// localization, template construction from the gallery's plain key point
/// sets, ROI extraction, feature extraction, one-against-all gallery
/// training, probe matching, meta-recognition and the 7 CMC curves (four
/// raw systems, the PLS and SVM pairs under meta-selection, and the
/// meta-selection over all four).
inline ExperimentReport run_experiment(const std::string& workspace,
                                       const DatasetManifest& manifest,
                                       const ExperimentConfig& config) {
    const auto gallery_recs = manifest.subset(SetTag::kGallery);
    const auto probe_recs = manifest.subset(SetTag::kProbe);
    detail::stage("manifest", [&] {
        validate_manifest(manifest);
        if (probe_recs.empty()) throw DataError("manifest: no probe records");
    });

    const SkinClassifier skin =
        train_skin_from_records(workspace, gallery_recs, config);

    // Segmentation and key points for every record; gallery plain-procedure
    // sets feed the template.
    auto locate = [&](const ManifestRecord& rec) {
        return detail::stage("keypoints: " + rec.path, [&] {
            const RgbImage img = resize_to_height(
                load_record_image(workspace, rec), kWorkingHeight);
            return analyze_image(img, skin, config);
        });
    };
    std::vector<ImageAnalysis> gallery_state, probe_state;
    for (const auto* rec : gallery_recs) gallery_state.push_back(locate(*rec));
    for (const auto* rec : probe_recs) probe_state.push_back(locate(*rec));

    const WristTemplate tpl = detail::stage("template", [&] {
        std::vector<KeyPointSet> sets;
        for (const auto& st : gallery_state) sets.push_back(st.plain);
        return build_template(sets);
    });

    // ROI and feature extraction. Probe features are kept per variant.
    auto features_for = [&](const ManifestRecord& rec,
                            const ImageAnalysis& st) {
        return detail::stage("features: " + rec.path, [&] {
            const RgbImage img = resize_to_height(
                load_record_image(workspace, rec), kWorkingHeight);
            return image_descriptors(img, st, tpl);
        });
    };

    std::vector<GallerySample> samples;
    for (std::size_t i = 0; i < gallery_recs.size(); ++i) {
        auto feats = features_for(*gallery_recs[i], gallery_state[i]);
        for (int v = 0; v < 2; ++v) {
            GallerySample s;
            s.wrist_id = gallery_recs[i]->wrist_id;
            s.variant = v == 0 ? RoiVariant::kRoi1 : RoiVariant::kRoi2;
            s.features = std::move(feats[v].values);
            samples.push_back(std::move(s));
        }
    }
    gallery_state.clear();

    const GalleryModel gallery = detail::stage("gallery-training", [&] {
        return train_gallery(samples, config.pls_components, config.svm_c,
                             config.jobs);
    });
    samples.clear();
    samples.shrink_to_fit();

    ExperimentReport rep;
    rep.config = config;
    rep.gallery_size = gallery.wrist_ids.size();

    for (std::size_t i = 0; i < probe_recs.size(); ++i) {
        auto feats = features_for(*probe_recs[i], probe_state[i]);
        ProbeResult pr;
        pr.id = probe_recs[i]->path;
        pr.truth = probe_recs[i]->wrist_id;
        detail::stage("matching: " + pr.id, [&] {
            pr.rs = match_probe(gallery, feats[0].values, feats[1].values);
        });
        detail::stage("meta: " + pr.id, [&] {
            pr.meta_pls = meta_select({pr.rs[0], pr.rs[1]},
                                      config.tail_fraction);
            pr.meta_svm = meta_select({pr.rs[2], pr.rs[3]},
                                      config.tail_fraction);
            pr.meta_all = meta_select(
                {pr.rs[0], pr.rs[1], pr.rs[2], pr.rs[3]},
                config.tail_fraction);
        });
        rep.probes.push_back(std::move(pr));
    }

    detail::stage("cmc", [&] {
        std::vector<std::string> truths;
        for (const auto& pr : rep.probes) truths.push_back(pr.truth);
        for (int s = 0; s < kSystemCount; ++s) {
            std::vector<ScoreTable> tables;
            for (const auto& pr : rep.probes)
                tables.push_back(pr.rs[static_cast<std::size_t>(s)]);
            rep.curves[static_cast<std::size_t>(s)] = cmc(tables, truths);
        }
        const auto meta_of = [&](int group, const ProbeResult& pr) {
            return group == 0 ? pr.meta_pls
                              : group == 1 ? pr.meta_svm : pr.meta_all;
        };
        for (int g = 0; g < 3; ++g) {
            std::vector<ScoreTable> tables;
            for (const auto& pr : rep.probes)
                tables.push_back(meta_of(g, pr).table);
            rep.curves[static_cast<std::size_t>(kSystemCount + g)] =
                cmc(tables, truths);
        }
    });
    return rep;
}

// --- report serialization ---------------------------------------------

inline nlohmann::json report_json(const ExperimentReport& rep) {
    nlohmann::json j;
    j["version"] = 1;
    j["gallery_size"] = rep.gallery_size;
    j["probe_count"] = rep.probes.size();
    j["config"] = {{"jobs", rep.config.jobs},
                   {"max_skin_rows", rep.config.max_skin_rows},
                   {"pls_components", rep.config.pls_components},
                   {"seed", rep.config.seed},
                   {"superpixel_k", rep.config.superpixel_k},
                   {"svm_c", rep.config.svm_c},
                   {"tail_fraction", rep.config.tail_fraction},
                   {"tree_count", rep.config.tree_count},
                   {"wrinkle_a", rep.config.wrinkle_a}};
    for (int s = 0; s < kCurveCount; ++s)
        j["curves"][kCurveNames[s]] =
            rep.curves[static_cast<std::size_t>(s)].values;

    auto& probes = j["probes"] = nlohmann::json::array();
    for (const auto& pr : rep.probes) {
        nlohmann::json p;
        p["id"] = pr.id;
        p["truth"] = pr.truth;
        const MetaDecision* metas[3] = {&pr.meta_pls, &pr.meta_svm,
                                        &pr.meta_all};
        const char* names[3] = {"RS_PLS", "RS_SVM", "WMM"};
        for (int g = 0; g < 3; ++g) {
            p["chosen"][names[g]] = system_name(
                detail::meta_subsystem(g, metas[g]->chosen));
            p["cdf"][names[g]] = metas[g]->cdf_values;
        }
        for (int s = 0; s < kSystemCount; ++s)
            p["rank_of_truth"][kCurveNames[s]] =
                pr.rs[static_cast<std::size_t>(s)].rank_of(pr.truth);
        for (int g = 0; g < 3; ++g)
            p["rank_of_truth"][names[g]] =
                metas[g]->table.rank_of(pr.truth);
        auto& top = p["top10"] = nlohmann::json::array();
        const ScoreTable& t = pr.meta_all.table;
        for (std::size_t r = 0; r < t.order.size() && r < 10; ++r) {
            const auto idx = static_cast<std::size_t>(t.order[r]);
            top.push_back({{"rank", r + 1},
                           {"score", t.scores[idx]},
                           {"wrist", t.wrist_ids[idx]}});
        }
        probes.push_back(std::move(p));
    }
    return j;
}

inline void write_report(const ExperimentReport& rep,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("report: cannot open for writing: " + path);
    out << report_json(rep).dump(2) << "\n";
    if (!out) throw DataError("report: write failed: " + path);
}

/// Minimal self-contained CMC plot: one polyline per curve plus a legend.
inline std::string render_cmc_svg(const ExperimentReport& rep) {
    static constexpr const char* kColors[kCurveCount] = {
        "#9ecae1", "#4292c6", "#fdae6b", "#e6550d",
        "#31a354", "#756bb1", "#000000"};
    const int w = 640, h = 420, ml = 50, mr = 150, mt = 20, mb = 40;
    const int pw = w - ml - mr, ph = h - mt - mb;
    const int m = rep.curves[0].max_rank();

    char buf[160];
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
           "height=\"420\" viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = mt + ph - ph * i / 5.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" "
                      "stroke=\"#dddddd\"/>\n",
                      ml, y, ml + pw, y);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%.1f\" font-size=\"12\" "
                      "text-anchor=\"end\">%.1f</text>\n",
                      ml - 6, y + 4, i / 5.0);
        svg += buf;
    }
    for (int s = 0; s < kCurveCount; ++s) {
        const auto& v = rep.curves[static_cast<std::size_t>(s)].values;
        std::string pts;
        for (int r = 1; r <= m; ++r) {
            const double x =
                m > 1 ? ml + pw * (r - 1.0) / (m - 1.0) : ml + pw / 2.0;
            const double y =
                mt + ph - ph * v[static_cast<std::size_t>(r) - 1];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
            pts += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<polyline fill=\"none\" stroke=\"%s\" "
                      "stroke-width=\"%d\" points=\"",
                      kColors[s], s == kCurveCount - 1 ? 3 : 2);
        svg += buf;
        svg += pts;
        svg += "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%d\" font-size=\"12\" "
                      "fill=\"%s\">%s</text>\n",
                      ml + pw + 12, mt + 16 + 18 * s, kColors[s],
                      kCurveNames[s]);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\" "
                  "text-anchor=\"middle\">rank</text>\n",
                  ml + pw / 2, h - 12);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"1\" font-size=\"12\" "
                  "transform=\"translate(14,%d) rotate(-90)\" "
                  "text-anchor=\"middle\">identification rate</text>\n",
                  0, mt + ph / 2);
    svg += buf;
    svg += "</svg>\n";
    return svg;
}

inline void write_cmc_svg(const ExperimentReport& rep,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("plot: cannot open for writing: " + path);
    out << render_cmc_svg(rep);
    if (!out) throw DataError("plot: write failed: " + path);
}

} // namespace wristmatch

#endif
