#ifndef WRISTMATCH_FEATURES_HPP
#define WRISTMATCH_FEATURES_HPP

#include <cstdio>
#include <string>
#include <vector>

#include "wristmatch/binio.hpp"
#include "wristmatch/dsift.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/gabor.hpp"
#include "wristmatch/grids.hpp"
#include "wristmatch/image.hpp"
#include "wristmatch/lbp.hpp"
#include "wristmatch/roi_extract.hpp"

namespace wristmatch {

// Segment layout of one ROI descriptor. LBP histograms run over all three
// color channels; orientation and SIFT parts work on luma.
inline constexpr int kLbpChannelDim =
    kSmallGridBlocks * kRiu2Bins + kLargeGridBlocks * kU2Bins; // 4358
inline constexpr int kLbpFeatureDim = 3 * kLbpChannelDim;      // 13074
inline constexpr int kGaborFeatureDim =
    kTotalGridBlocks * kGaborOrientations; // 2112
inline constexpr int kDsiftFeatureDim = 1280;
inline constexpr int kFeatureDim =
    kLbpFeatureDim + kGaborFeatureDim + kDsiftFeatureDim; // 16466

struct FeatureVector {
    std::vector<double> values;
};

/// Shared filter bank for the fixed ROI size; built once per process.
inline const GaborBank& roi_gabor_bank() {
    static const GaborBank bank(kRoiWidth, kRoiHeight);
    return bank;
}

/// Full block-grid descriptor of one normalized ROI:
/// per-channel LBP histograms (uniform rotation-invariant at radius 1 on
/// the five fine grids, uniform at radius 2 on the coarse ones), then
/// Gabor orientation histograms, then dense SIFT. 16466 values.
inline FeatureVector extract_features(const RoiImage& roi) {
    if (roi.rgb.width() != kRoiWidth || roi.rgb.height() != kRoiHeight)
        throw UsageError("extract_features: image is not a normalized ROI");

    FeatureVector fv;
    fv.values.reserve(kFeatureDim);

    const int w = roi.rgb.width(), h = roi.rgb.height();
    std::vector<GridBlock> small_blocks, large_blocks;
    for (int g = 0; g < kSmallGridCount; ++g)
        for (const auto& b : grid_blocks(kGrids[g], w, h))
            small_blocks.push_back(b);
    for (int g = kSmallGridCount; g < kGridCount; ++g)
        for (const auto& b : grid_blocks(kGrids[g], w, h))
            large_blocks.push_back(b);

    for (const ImagePlane* ch : {&roi.rgb.r, &roi.rgb.g, &roi.rgb.b}) {
        const auto fine = lbp_riu2_hist(*ch, small_blocks);
        const auto coarse = lbp_u2_hist(*ch, large_blocks);
        fv.values.insert(fv.values.end(), fine.begin(), fine.end());
        fv.values.insert(fv.values.end(), coarse.begin(), coarse.end());
    }
    if (fv.values.size() != static_cast<std::size_t>(kLbpFeatureDim))
        throw NumericError("extract_features: texture segment length mismatch");

    const ImagePlane gray = luma(roi.rgb);
    const auto field = roi_gabor_bank().orientation_field(gray);
    const auto orient = gabor_histograms(field);
    if (orient.size() != static_cast<std::size_t>(kGaborFeatureDim))
        throw NumericError(
            "extract_features: orientation segment length mismatch");
    fv.values.insert(fv.values.end(), orient.begin(), orient.end());

    const auto sift = dense_sift(gray);
    if (sift.size() != static_cast<std::size_t>(kDsiftFeatureDim))
        throw NumericError("extract_features: sift segment length mismatch");
    fv.values.insert(fv.values.end(), sift.begin(), sift.end());

    if (fv.values.size() != static_cast<std::size_t>(kFeatureDim))
        throw NumericError("extract_features: descriptor length mismatch");
    return fv;
}

// Binary record: magic, format version, length, then float32 values.

inline void save_feature_vector(const FeatureVector& fv,
                                const std::string& path) {
    if (fv.values.size() != static_cast<std::size_t>(kFeatureDim))
        throw UsageError("save_feature_vector: wrong descriptor length");
    auto os = binio::open_out(path);
    binio::write_magic(os, "WMFEAT\x01\x00");
    binio::write_u32(os, 1);
    binio::write_u32(os, static_cast<std::uint32_t>(fv.values.size()));
    for (double v : fv.values)
        binio::write_f32(os, static_cast<float>(v));
    if (!os) throw DataError("save_feature_vector: write failed: " + path);
}

inline FeatureVector load_feature_vector(const std::string& path) {
    auto is = binio::open_in(path);
    binio::expect_magic(is, "WMFEAT\x01\x00", "feature vector file");
    const auto version = binio::read_u32(is);
    if (version != 1)
        throw DataError("feature vector file: unsupported version " +
                        std::to_string(version) + ": " + path);
    const auto n = binio::read_u32(is);
    if (n != static_cast<std::uint32_t>(kFeatureDim))
        throw DataError("feature vector file: unexpected length " +
                        std::to_string(n) + ": " + path);
    FeatureVector fv;
    fv.values.resize(n);
    for (auto& v : fv.values) v = binio::read_f32(is);
    if (!is) throw DataError("feature vector file: truncated: " + path);
    return fv;
}

/// Versioned binary descriptor container; doubles round-trip bit-exactly.
inline void save_features(const FeatureVector& fv, const std::string& path) {
    auto os = binio::open_out(path);
    binio::write_magic(os, "WMFEAT\x01\x00");
    binio::write_u32(os, 1); // format version
    binio::write_u64(os, fv.values.size());
    for (double v : fv.values) binio::write_f64(os, v);
    if (!os) throw DataError("save_features: write failed: " + path);
}

inline FeatureVector load_features(const std::string& path) {
    auto is = binio::open_in(path);
    binio::expect_magic(is, "WMFEAT\x01\x00", "feature vector");
    const std::uint32_t version = binio::read_u32(is);
    if (version != 1)
        throw DataError("load_features: unsupported version " +
                        std::to_string(version));
    FeatureVector fv;
    fv.values.resize(binio::read_u64(is));
    for (auto& v : fv.values) v = binio::read_f64(is);
    return fv;
}

/// One comma-separated line per value, for eyeballing descriptors.
inline void export_feature_csv(const FeatureVector& fv,
                               const std::string& path) {
    auto os = binio::open_out(path);
    char buf[64];
    for (std::size_t i = 0; i < fv.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", fv.values[i]);
        if (i) os.put(',');
        os << buf;
    }
    os.put('\n');
    if (!os) throw DataError("export_feature_csv: write failed: " + path);
}

} // namespace wristmatch

#endif
