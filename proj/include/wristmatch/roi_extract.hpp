#ifndef WRISTMATCH_ROI_EXTRACT_HPP
#define WRISTMATCH_ROI_EXTRACT_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "wristmatch/cpd.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/image.hpp"
#include "wristmatch/image_io.hpp"
#include "wristmatch/wrist_template.hpp"
#include "wristmatch/wrinkles.hpp"

namespace wristmatch {

inline constexpr int kRoiWidth = 128;
inline constexpr int kRoiHeight = 80;

enum class RoiVariant { kRoi1 = 1, kRoi2 = 2 };

inline const char* roi_suffix(RoiVariant v) {
    return v == RoiVariant::kRoi1 ? "_roi1.png" : "_roi2.png";
}

/// Template-aligned crop, normalized to 128x80.
struct RoiImage {
    RgbImage rgb;
    RoiVariant variant = RoiVariant::kRoi1;
};

/// Conjugate a transform between scaled frames: with S mapping a 40-frame
/// point to the full-resolution frame (the pixel-center correspondence of
/// bilinear resizing, p' = scale*p + (scale-1)/2), returns S o a o S^-1.
inline AffineTransform conjugate_to_scale(const AffineTransform& a,
                                          double scale) {
    AffineTransform s;
    s.linear = {scale, 0.0, 0.0, scale};
    s.translation = {(scale - 1.0) / 2.0, (scale - 1.0) / 2.0};
    return AffineTransform::compose(AffineTransform::compose(s, a),
                                    s.inverse());
}

struct AlignedImage {
    RgbImage rgb;
    ImagePlane mask;
};

/// Warp an image and its mask into the template frame at the image's own
/// scale (a 200-pixel-high input lands on a 200x320 canvas). `a40` maps the
/// image's 40-frame onto the template 40-frame; sampling is inverse bilinear
/// with everything outside the source mask set to zero.
inline AlignedImage warp_to_template(const RgbImage& img,
                                     const ImagePlane& mask,
                                     const AffineTransform& a40) {
    if (img.width() != mask.width || img.height() != mask.height)
        throw UsageError("warp_to_template: image/mask size mismatch");
    const double scale = img.height() / static_cast<double>(kTemplateHeight);
    const AffineTransform inv = conjugate_to_scale(a40, scale).inverse();

    const int out_h = static_cast<int>(std::lround(kTemplateHeight * scale));
    const int out_w = static_cast<int>(std::lround(kTemplateWidth * scale));
    AlignedImage out;
    out.rgb = RgbImage(out_w, out_h);
    out.mask = ImagePlane(out_w, out_h);
    for (int r = 0; r < out_h; ++r)
        for (int c = 0; c < out_w; ++c) {
            const auto q = inv.apply({static_cast<double>(r),
                                      static_cast<double>(c)});
            if (q[0] < 0.0 || q[0] > img.height() - 1.0 || q[1] < 0.0 ||
                q[1] > img.width() - 1.0)
                continue;
            if (sample_bilinear(mask, q[0], q[1]) < 0.5) continue;
            out.mask.at(r, c) = 1.0;
            out.rgb.r.at(r, c) = sample_bilinear(img.r, q[0], q[1]);
            out.rgb.g.at(r, c) = sample_bilinear(img.g, q[0], q[1]);
            out.rgb.b.at(r, c) = sample_bilinear(img.b, q[0], q[1]);
        }
    return out;
}

/// Crop the aligned image between the template wrinkle columns, keep the row
/// span whose rows are more than three-quarters foreground (strictly), and
/// resample to 128x80.
inline RoiImage extract_roi(const AlignedImage& aligned,
                            const WristTemplate& tpl, RoiVariant variant) {
    const double scale =
        aligned.rgb.height() / static_cast<double>(kTemplateHeight);
    const double shift = (scale - 1.0) / 2.0;
    double x0 = tpl.wrinkle_col(0) * scale + shift;
    double x1 = tpl.wrinkle_col(1) * scale + shift;
    if (x0 > x1) std::swap(x0, x1);
    const int c0 = std::clamp(static_cast<int>(std::lround(x0)), 0,
                              aligned.rgb.width() - 1);
    const int c1 = std::clamp(static_cast<int>(std::lround(x1)), 0,
                              aligned.rgb.width() - 1);
    if (c1 <= c0)
        throw NumericError("extract_roi: wrinkle columns do not span a region");

    const int span_w = c1 - c0 + 1;
    int r0 = -1, r1 = -1;
    for (int r = 0; r < aligned.rgb.height(); ++r) {
        int fg = 0;
        for (int c = c0; c <= c1; ++c)
            if (aligned.mask.at(r, c) >= 0.5) ++fg;
        if (fg * 4 > span_w * 3) { // strictly more than three quarters
            if (r0 < 0) r0 = r;
            r1 = r;
        }
    }
    if (r0 < 0)
        throw NumericError("extract_roi: no row is mostly foreground");

    RgbImage crop(span_w, r1 - r0 + 1);
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
            crop.r.at(r - r0, c - c0) = aligned.rgb.r.at(r, c);
            crop.g.at(r - r0, c - c0) = aligned.rgb.g.at(r, c);
            crop.b.at(r - r0, c - c0) = aligned.rgb.b.at(r, c);
        }
    RoiImage roi;
    roi.variant = variant;
    roi.rgb = {resize_bilinear(crop.r, kRoiWidth, kRoiHeight),
               resize_bilinear(crop.g, kRoiWidth, kRoiHeight),
               resize_bilinear(crop.b, kRoiWidth, kRoiHeight)};
    return roi;
}

inline void save_roi(const RoiImage& roi, const std::string& base_path) {
    write_png(base_path + roi_suffix(roi.variant), roi.rgb);
}

inline RoiImage load_roi(const std::string& base_path, RoiVariant variant) {
    RoiImage roi;
    roi.variant = variant;
    roi.rgb = read_image(base_path + roi_suffix(variant));
    if (roi.rgb.width() != kRoiWidth || roi.rgb.height() != kRoiHeight)
        throw DataError(base_path + roi_suffix(variant) +
                        ": unexpected ROI dimensions");
    return roi;
}

struct RoiPair {
    RoiImage roi1; // aligned with plain detected key points
    RoiImage roi2; // aligned with end-trimmed key points
    KeyPointSet keypoints1;
    KeyPointSet keypoints2;
};

/// Full per-image ROI pipeline: build the wrinkle graph once, locate key
/// points with and without path adjustment, register each set onto the
/// template with affine CPD, warp, and crop both ROI variants.
inline RoiPair extract_roi_pair(const RgbImage& img, const ImagePlane& mask,
                                const WristTemplate& tpl, double a = 0.2) {
    const GraphBuild gb = build_graph(img, mask);
    RoiPair out;
    out.keypoints1 = locate_keypoints(gb.graph, a, false);
    out.keypoints2 = locate_keypoints(gb.graph, a, true);

    const auto target = tpl.cloud();
    const KeyPointSet* kps[2] = {&out.keypoints1, &out.keypoints2};
    RoiImage* rois[2] = {&out.roi1, &out.roi2};
    const RoiVariant variants[2] = {RoiVariant::kRoi1, RoiVariant::kRoi2};
    for (int i = 0; i < 2; ++i) {
        const AffineTransform a40 =
            cpd_affine_register(keypoint_cloud(*kps[i]), target);
        const AlignedImage aligned = warp_to_template(img, mask, a40);
        *rois[i] = extract_roi(aligned, tpl, variants[i]);
    }
    return out;
}

} // namespace wristmatch

#endif
