// wristmatch: batch front end over the wrist identification pipeline.
//
// Subcommands: synth, segment, roi, features, train, identify, evaluate.
// Exit codes: 0 ok, 2 usage, 3 data/protocol, 4 numeric failure. Logs go to
// stderr; results go to files (and identify's ranking to stdout). All path
// options resolve against the workspace (--workspace, else the
// WRISTMATCH_WORKSPACE environment variable, else "."); absolute paths pass
// through. The --config JSON schema is documented in README.md.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "wristmatch/cpd.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/experiment.hpp"
#include "wristmatch/features.hpp"
#include "wristmatch/gallery.hpp"
#include "wristmatch/image_io.hpp"
#include "wristmatch/manifest.hpp"
#include "wristmatch/metarec.hpp"
#include "wristmatch/roi_extract.hpp"
#include "wristmatch/segmenter.hpp"
#include "wristmatch/synthetic.hpp"
#include "wristmatch/wrist_template.hpp"

namespace fs = std::filesystem;
using namespace wristmatch;

namespace {

struct GlobalOpts {
    std::string workspace;
    std::string config_path;
    int jobs = 1;
};

std::string resolve(const GlobalOpts& g, const std::string& path) {
    return join_workspace(g.workspace, path);
}

void log_line(const std::string& msg) {
    std::fprintf(stderr, "wristmatch: %s\n", msg.c_str());
}

// --- run configuration ---------------------------------------------------

void check_config(const ExperimentConfig& cfg) {
    if (cfg.superpixel_k < 8)
        throw UsageError("config: superpixel_k must be at least 8");
    if (cfg.tree_count < 1)
        throw UsageError("config: tree_count must be at least 1");
    if (!(cfg.wrinkle_a >= 0.0 && cfg.wrinkle_a < 1.0))
        throw UsageError("config: wrinkle_a must lie in [0, 1)");
    if (cfg.pls_components < 1)
        throw UsageError("config: pls_components must be at least 1");
    if (!(cfg.svm_c > 0.0)) throw UsageError("config: svm_c must be positive");
    if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0))
        throw UsageError("config: tail_fraction must lie in (0, 1]");
}

ExperimentConfig config_from_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("config: cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("config: " + path + ": " + e.what());
    }
    if (!j.is_object())
        throw DataError("config: " + path + ": top level must be an object");
    static const std::set<std::string> known = {
        "superpixel_k", "tree_count", "max_skin_rows",   "wrinkle_a",
        "pls_components", "svm_c",    "tail_fraction",   "seed"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw UsageError("config: " + path + ": unknown key \"" + key +
                             "\"");
    ExperimentConfig cfg;
    try {
        cfg.superpixel_k = j.value("superpixel_k", cfg.superpixel_k);
        cfg.tree_count = j.value("tree_count", cfg.tree_count);
        cfg.max_skin_rows = j.value("max_skin_rows", cfg.max_skin_rows);
        cfg.wrinkle_a = j.value("wrinkle_a", cfg.wrinkle_a);
        cfg.pls_components = j.value("pls_components", cfg.pls_components);
        cfg.svm_c = j.value("svm_c", cfg.svm_c);
        cfg.tail_fraction = j.value("tail_fraction", cfg.tail_fraction);
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("config: " + path + ": " + e.what());
    }
    return cfg;
}

/// Pipeline parameters exposed on a subcommand. Flags beat the config file,
/// which beats the built-in defaults.
struct PipelineOpts {
    ExperimentConfig flags;
    CLI::Option* k = nullptr;
    CLI::Option* trees = nullptr;
    CLI::Option* rows = nullptr;
    CLI::Option* a = nullptr;
    CLI::Option* pls = nullptr;
    CLI::Option* c = nullptr;
    CLI::Option* tail = nullptr;
    CLI::Option* seed = nullptr;

    void attach(CLI::App* cmd) {
        k = cmd->add_option("--superpixel-k", flags.superpixel_k,
                            "SLIC superpixel budget per image [200]");
        trees = cmd->add_option("--trees", flags.tree_count,
                                "skin forest size [300]");
        rows = cmd->add_option(
            "--max-skin-rows", flags.max_skin_rows,
            "cap on skin training superpixels, <=0 disables [4000]");
        a = cmd->add_option("--wrinkle-a", flags.wrinkle_a,
                            "endpoint trim fraction for adjusted paths [0.2]");
        pls = cmd->add_option("--pls-components", flags.pls_components,
                              "PLS latent components [5]");
        c = cmd->add_option("--svm-c", flags.svm_c, "SVM C parameter [1.0]");
        tail = cmd->add_option("--tail", flags.tail_fraction,
                               "meta-recognition tail fraction [0.5]");
        seed = cmd->add_option("--seed", flags.seed,
                               "forest bootstrap seed [1]");
    }

    ExperimentConfig build(const GlobalOpts& g) const {
        ExperimentConfig cfg;
        if (!g.config_path.empty())
            cfg = config_from_json(resolve(g, g.config_path));
        if (k->count()) cfg.superpixel_k = flags.superpixel_k;
        if (trees->count()) cfg.tree_count = flags.tree_count;
        if (rows->count()) cfg.max_skin_rows = flags.max_skin_rows;
        if (a->count()) cfg.wrinkle_a = flags.wrinkle_a;
        if (pls->count()) cfg.pls_components = flags.pls_components;
        if (c->count()) cfg.svm_c = flags.svm_c;
        if (tail->count()) cfg.tail_fraction = flags.tail_fraction;
        if (seed->count()) cfg.seed = flags.seed;
        cfg.jobs = g.jobs;
        check_config(cfg);
        return cfg;
    }
};

// --- input enumeration ----------------------------------------------------

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool is_mask_sibling(const fs::path& p) {
    const std::string stem = p.stem().string();
    return stem.size() >= 5 && stem.substr(stem.size() - 5) == "_mask";
}

/// A plain input image with an output naming stem; flip mirrors manifest
/// records, file inputs never flip.
struct InputImage {
    std::string path; // already workspace-resolved
    std::string stem;
    bool flip = false;
};

std::vector<InputImage> list_inputs(const GlobalOpts& g,
                                    const std::string& in,
                                    const std::string& manifest_path) {
    std::vector<InputImage> out;
    if (!manifest_path.empty()) {
        const DatasetManifest man =
            load_manifest(resolve(g, manifest_path));
        for (const auto& rec : man.records)
            out.push_back({resolve(g, rec.path),
                           fs::path(rec.path).stem().string(), rec.flip});
        return out;
    }
    const fs::path root = resolve(g, in);
    if (fs::is_regular_file(root)) {
        out.push_back({root.string(), root.stem().string(), false});
        return out;
    }
    if (!fs::is_directory(root))
        throw DataError("no such file or directory: " + root.string());
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        if (!has_image_extension(p) || is_mask_sibling(p)) continue;
        out.push_back({p.string(), p.stem().string(), false});
    }
    std::sort(out.begin(), out.end(),
              [](const InputImage& x, const InputImage& y) {
                  return x.path < y.path;
              });
    if (out.empty())
        throw DataError("no images under " + root.string());
    return out;
}

RgbImage load_input(const InputImage& in) {
    RgbImage img = read_image(in.path);
    if (in.flip) img = flip_horizontal(img);
    return img;
}

// --- model bundle ----------------------------------------------------------

std::string skin_path_of(const std::string& gallery_path) {
    return gallery_path + ".skin";
}
std::string template_path_of(const std::string& gallery_path) {
    return gallery_path + ".template";
}

SkinClassifier obtain_skin(const GlobalOpts& g, const std::string& model_path,
                           const std::string& train_manifest,
                           const ExperimentConfig& cfg) {
    if (!train_manifest.empty()) {
        const DatasetManifest man =
            load_manifest(resolve(g, train_manifest));
        validate_manifest(man);
        const SkinClassifier skin = train_skin_from_records(
            g.workspace, man.subset(SetTag::kGallery), cfg);
        save_skin_classifier(skin, resolve(g, model_path));
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "trained skin classifier (%zu trees, oob %.3f) -> %s",
                      skin.trees.size(), skin.oob_accuracy,
                      model_path.c_str());
        log_line(buf);
        return skin;
    }
    const std::string full = resolve(g, model_path);
    if (!fs::exists(full))
        throw UsageError("skin model " + model_path +
                         " not found; pass --train-manifest to train one");
    return load_skin_classifier(full);
}

// --- subcommands ------------------------------------------------------------

struct SynthArgs {
    SynthOptions opts;
};

void run_synth(const GlobalOpts& g, const SynthArgs& args) {
    const DatasetManifest man = synth_dataset(g.workspace, args.opts);
    log_line("synth: wrote " + std::to_string(man.records.size()) +
             " images under " + resolve(g, args.opts.subdir));
    std::printf("%s\n", (args.opts.subdir + "/manifest.csv").c_str());
}

struct SegmentArgs {
    std::string in, manifest, model, train_manifest, out;
};

void run_segment(const GlobalOpts& g, const SegmentArgs& args,
                 const PipelineOpts& popts) {
    const ExperimentConfig cfg = popts.build(g);
    const SkinClassifier skin =
        obtain_skin(g, args.model, args.train_manifest, cfg);
    const auto inputs = list_inputs(g, args.in, args.manifest);
    const fs::path out_dir = resolve(g, args.out);
    fs::create_directories(out_dir);
    const SegmentOptions seg_opts{cfg.superpixel_k, 10.0};
    for (const auto& in : inputs) {
        detail::stage("segment: " + in.stem, [&] {
            const RgbImage img = load_input(in);
            const RgbImage working = resize_to_height(img, kWorkingHeight);
            const SkinMask mask = segment(working, skin, seg_opts);
            ImagePlane plane = mask.to_plane();
            plane = resize_bilinear(plane, img.width(), img.height());
            std::vector<std::uint8_t> bits(plane.data.size());
            std::size_t fg = 0;
            for (std::size_t i = 0; i < plane.data.size(); ++i) {
                bits[i] = plane.data[i] >= 0.5 ? 1 : 0;
                fg += bits[i];
            }
            const fs::path dst = out_dir / (in.stem + ".png");
            write_mask_png(dst.string(), bits, img.width(), img.height());
            log_line("segment: " + in.stem + " -> " + dst.string() + " (" +
                     std::to_string(fg) + " skin px)");
        });
    }
}

struct RoiArgs {
    std::string in, manifest, model, template_path, out;
};

void run_roi(const GlobalOpts& g, const RoiArgs& args,
             const PipelineOpts& popts) {
    const ExperimentConfig cfg = popts.build(g);
    const SkinClassifier skin = obtain_skin(g, args.model, "", cfg);
    const WristTemplate tpl = load_template(resolve(g, args.template_path));
    const auto inputs = list_inputs(g, args.in, args.manifest);
    const fs::path out_dir = resolve(g, args.out);
    fs::create_directories(out_dir);
    for (const auto& in : inputs) {
        detail::stage("roi: " + in.stem, [&] {
            const RgbImage working =
                resize_to_height(load_input(in), kWorkingHeight);
            const ImageAnalysis st = analyze_image(working, skin, cfg);
            const ImagePlane mask = st.mask.to_plane();
            const auto target = tpl.cloud();
            const KeyPointSet* kps[2] = {&st.plain, &st.adjusted};
            const RoiVariant variants[2] = {RoiVariant::kRoi1,
                                            RoiVariant::kRoi2};
            for (int v = 0; v < 2; ++v) {
                const AffineTransform a40 =
                    cpd_affine_register(keypoint_cloud(*kps[v]), target);
                const AlignedImage aligned =
                    warp_to_template(working, mask, a40);
                const RoiImage roi = extract_roi(aligned, tpl, variants[v]);
                const fs::path dst =
                    out_dir / (in.stem + "_roi" + std::to_string(v + 1) +
                               ".png");
                write_png(dst.string(), roi.rgb);
            }
            log_line("roi: " + in.stem + " -> " + in.stem + "_roi{1,2}.png");
        });
    }
}

struct FeaturesArgs {
    std::string in, out;
    bool csv = false;
};

void run_features(const GlobalOpts& g, const FeaturesArgs& args) {
    const auto inputs = list_inputs(g, args.in, "");
    const fs::path out_dir = resolve(g, args.out);
    fs::create_directories(out_dir);
    for (const auto& in : inputs) {
        detail::stage("features: " + in.stem, [&] {
            RoiImage roi;
            roi.rgb = read_image(in.path);
            if (roi.rgb.width() != kRoiWidth || roi.rgb.height() != kRoiHeight)
                throw DataError(in.path + ": expected a " +
                                std::to_string(kRoiWidth) + "x" +
                                std::to_string(kRoiHeight) +
                                " ROI crop, got " +
                                std::to_string(roi.rgb.width()) + "x" +
                                std::to_string(roi.rgb.height()));
            const std::string stem = in.stem;
            if (stem.size() >= 5 &&
                stem.substr(stem.size() - 5) == "_roi2")
                roi.variant = RoiVariant::kRoi2;
            const FeatureVector fv = extract_features(roi);
            save_features(fv, (out_dir / (stem + ".feat")).string());
            if (args.csv)
                export_feature_csv(fv, (out_dir / (stem + ".csv")).string());
            log_line("features: " + stem + ".feat (" +
                     std::to_string(fv.values.size()) + " values)");
        });
    }
}

struct TrainArgs {
    std::string manifest, out = "gallery.model", skin_model;
};

void run_train(const GlobalOpts& g, const TrainArgs& args,
               const PipelineOpts& popts) {
    const ExperimentConfig cfg = popts.build(g);
    const DatasetManifest man = load_manifest(resolve(g, args.manifest));
    detail::stage("manifest", [&] { validate_manifest(man); });
    const auto gallery_recs = man.subset(SetTag::kGallery);

    SkinClassifier skin;
    if (!args.skin_model.empty()) {
        skin = load_skin_classifier(resolve(g, args.skin_model));
        log_line("train: reusing skin model " + args.skin_model);
    } else {
        skin = train_skin_from_records(g.workspace, gallery_recs, cfg);
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "train: skin classifier ready (oob %.3f)",
                      skin.oob_accuracy);
        log_line(buf);
    }
    save_skin_classifier(skin, skin_path_of(resolve(g, args.out)));

    std::vector<ImageAnalysis> state;
    for (const auto* rec : gallery_recs)
        state.push_back(detail::stage("keypoints: " + rec->path, [&] {
            const RgbImage working = resize_to_height(
                load_record_image(g.workspace, *rec), kWorkingHeight);
            return analyze_image(working, skin, cfg);
        }));
    const WristTemplate tpl = detail::stage("template", [&] {
        std::vector<KeyPointSet> sets;
        for (const auto& st : state) sets.push_back(st.plain);
        return build_template(sets);
    });
    save_template(tpl, template_path_of(resolve(g, args.out)));
    log_line("train: template built from " +
             std::to_string(gallery_recs.size()) + " gallery images");

    std::vector<GallerySample> samples;
    for (std::size_t i = 0; i < gallery_recs.size(); ++i) {
        auto feats = detail::stage("features: " + gallery_recs[i]->path, [&] {
            const RgbImage working = resize_to_height(
                load_record_image(g.workspace, *gallery_recs[i]),
                kWorkingHeight);
            return image_descriptors(working, state[i], tpl);
        });
        for (int v = 0; v < 2; ++v) {
            GallerySample s;
            s.wrist_id = gallery_recs[i]->wrist_id;
            s.variant = v == 0 ? RoiVariant::kRoi1 : RoiVariant::kRoi2;
            s.features = std::move(feats[static_cast<std::size_t>(v)].values);
            samples.push_back(std::move(s));
        }
    }
    const GalleryModel model = detail::stage("gallery-training", [&] {
        return train_gallery(samples, cfg.pls_components, cfg.svm_c,
                             cfg.jobs);
    });
    save_gallery(model, resolve(g, args.out));
    log_line("train: " + std::to_string(model.wrist_ids.size()) +
             " wrists -> " + args.out + " (+.skin, +.template)");
}

struct IdentifyArgs {
    std::string gallery, manifest;
    std::vector<std::string> probes;
    int top = 10;
};

void run_identify(const GlobalOpts& g, const IdentifyArgs& args,
                  const PipelineOpts& popts) {
    const ExperimentConfig cfg = popts.build(g);
    const GalleryModel model = load_gallery(resolve(g, args.gallery));
    const SkinClassifier skin =
        load_skin_classifier(skin_path_of(resolve(g, args.gallery)));
    const WristTemplate tpl =
        load_template(template_path_of(resolve(g, args.gallery)));

    std::vector<InputImage> inputs;
    if (!args.manifest.empty()) {
        const DatasetManifest man = load_manifest(resolve(g, args.manifest));
        for (const auto* rec : man.subset(SetTag::kProbe))
            inputs.push_back({resolve(g, rec->path), rec->path, rec->flip});
    }
    for (const auto& p : args.probes)
        inputs.push_back({resolve(g, p), p, false});
    if (inputs.empty())
        throw UsageError("identify: no probes; pass image paths or --manifest");

    for (const auto& in : inputs) {
        detail::stage("identify: " + in.stem, [&] {
            const RgbImage working =
                resize_to_height(load_input(in), kWorkingHeight);
            const ImageAnalysis st = analyze_image(working, skin, cfg);
            const auto feats = image_descriptors(working, st, tpl);
            const auto tables =
                match_probe(model, feats[0].values, feats[1].values);
            const MetaDecision meta = meta_select(
                {tables[0], tables[1], tables[2], tables[3]},
                cfg.tail_fraction);
            std::printf("# probe: %s\n# chosen: %s\n", in.stem.c_str(),
                        system_name(static_cast<RecognitionSystem>(
                            meta.chosen)));
            const std::size_t n =
                std::min<std::size_t>(static_cast<std::size_t>(args.top),
                                      meta.table.wrist_ids.size());
            for (std::size_t r = 0; r < n; ++r) {
                const auto idx =
                    static_cast<std::size_t>(meta.table.order[r]);
                std::printf("%zu %s %.9g\n", r + 1,
                            meta.table.wrist_ids[idx].c_str(),
                            meta.table.scores[idx]);
            }
        });
    }
}

struct EvaluateArgs {
    std::string manifest, report = "report.json", svg = "cmc.svg";
    bool no_svg = false;
};

void run_evaluate(const GlobalOpts& g, const EvaluateArgs& args,
                  const PipelineOpts& popts) {
    const ExperimentConfig cfg = popts.build(g);
    const DatasetManifest man = load_manifest(resolve(g, args.manifest));
    const ExperimentReport rep = run_experiment(g.workspace, man, cfg);
    write_report(rep, resolve(g, args.report));
    log_line("evaluate: wrote " + args.report);
    if (!args.no_svg) {
        write_cmc_svg(rep, resolve(g, args.svg));
        log_line("evaluate: wrote " + args.svg);
    }
    for (int i = 0; i < kCurveCount; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "evaluate: %-7s rank-1 %.4f",
                      kCurveNames[i],
                      rep.curves[static_cast<std::size_t>(i)].rank1());
        log_line(buf);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wrist identification pipeline"};
    app.require_subcommand(1);

    GlobalOpts g;
    const char* env_ws = std::getenv("WRISTMATCH_WORKSPACE");
    g.workspace = env_ws && *env_ws ? env_ws : ".";
    g.jobs = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--workspace", g.workspace,
                   "base directory for all relative paths");
    app.add_option("--jobs", g.jobs, "worker thread bound")
        ->check(CLI::Range(1, 512));
    app.add_option("--config", g.config_path,
                   "JSON run configuration (see README.md)");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand(
        "synth", "generate a labeled synthetic wrist dataset");
    synth->add_option("--identities", synth_args.opts.identities,
                      "distinct wrists [10]");
    synth->add_option("--gallery-per-id", synth_args.opts.gallery_per_id,
                      "gallery images per wrist [4]");
    synth->add_option("--probe-per-id", synth_args.opts.probe_per_id,
                      "probe images per wrist [2]");
    synth->add_option("--difficulty", synth_args.opts.difficulty,
                      "perturbation strength in [0,1] [0.2]");
    synth->add_option("--seed", synth_args.opts.seed, "generator seed [1]");
    synth->add_option("--subdir", synth_args.opts.subdir,
                      "output directory under the workspace [synth]");

    SegmentArgs seg_args;
    PipelineOpts seg_popts;
    auto* seg = app.add_subcommand("segment",
                                   "write one skin mask PNG per image");
    auto* seg_in = seg->add_option("--in", seg_args.in,
                                   "image file or directory");
    auto* seg_man =
        seg->add_option("--manifest", seg_args.manifest, "dataset manifest");
    seg_in->excludes(seg_man);
    seg->add_option("--model", seg_args.model, "skin classifier file")
        ->required();
    seg->add_option("--train-manifest", seg_args.train_manifest,
                    "train the model from this manifest's gallery first");
    seg->add_option("--out", seg_args.out, "output directory")->required();
    seg_popts.attach(seg);

    RoiArgs roi_args;
    PipelineOpts roi_popts;
    auto* roi = app.add_subcommand(
        "roi", "align images and write both ROI crops per image");
    auto* roi_in =
        roi->add_option("--in", roi_args.in, "image file or directory");
    auto* roi_man =
        roi->add_option("--manifest", roi_args.manifest, "dataset manifest");
    roi_in->excludes(roi_man);
    roi->add_option("--model", roi_args.model, "skin classifier file")
        ->required();
    roi->add_option("--template", roi_args.template_path,
                    "wrist template file")
        ->required();
    roi->add_option("--out", roi_args.out, "output directory")->required();
    roi_popts.attach(roi);

    FeaturesArgs feat_args;
    auto* feat = app.add_subcommand(
        "features", "describe 128x80 ROI crops as .feat files");
    feat->add_option("--in", feat_args.in, "ROI file or directory")
        ->required();
    feat->add_option("--out", feat_args.out, "output directory")->required();
    feat->add_flag("--csv", feat_args.csv,
                   "also export comma-separated values");

    TrainArgs train_args;
    PipelineOpts train_popts;
    auto* train = app.add_subcommand(
        "train", "train the full matcher bundle from a manifest's gallery");
    train->add_option("--manifest", train_args.manifest, "dataset manifest")
        ->required();
    train->add_option("--out", train_args.out,
                      "gallery model path [gallery.model]");
    train->add_option("--skin-model", train_args.skin_model,
                      "reuse an existing skin classifier");
    train_popts.attach(train);

    IdentifyArgs id_args;
    PipelineOpts id_popts;
    auto* ident = app.add_subcommand(
        "identify", "rank gallery wrists for probe images");
    ident->add_option("--gallery", id_args.gallery,
                      "gallery model from `train`")
        ->required();
    ident->add_option("--manifest", id_args.manifest,
                      "take probes from this manifest");
    ident->add_option("--top", id_args.top, "ranked lines per probe [10]")
        ->check(CLI::Range(1, 100000));
    ident->add_option("probes", id_args.probes, "probe image paths");
    id_popts.attach(ident);

    EvaluateArgs eval_args;
    PipelineOpts eval_popts;
    auto* eval = app.add_subcommand(
        "evaluate", "run the identification experiment and write the report");
    eval->add_option("--manifest", eval_args.manifest, "dataset manifest")
        ->required();
    eval->add_option("--report", eval_args.report,
                     "JSON report path [report.json]");
    eval->add_option("--svg", eval_args.svg, "CMC plot path [cmc.svg]");
    eval->add_flag("--no-svg", eval_args.no_svg, "skip the CMC plot");
    eval_popts.attach(eval);

    synth->callback([&] { run_synth(g, synth_args); });
    seg->callback([&] { run_segment(g, seg_args, seg_popts); });
    roi->callback([&] { run_roi(g, roi_args, roi_popts); });
    feat->callback([&] { run_features(g, feat_args); });
    train->callback([&] { run_train(g, train_args, train_popts); });
    ident->callback([&] { run_identify(g, id_args, id_popts); });
    eval->callback([&] { run_evaluate(g, eval_args, eval_popts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "wristmatch: error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "wristmatch: error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "wristmatch: error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "wristmatch: error: %s\n", e.what());
        return 3;
    }
    return 0;
}
