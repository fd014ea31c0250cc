#ifndef WRISTMATCH_IMAGE_HPP
#define WRISTMATCH_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "wristmatch/errors.hpp"

namespace wristmatch {

/// Single-channel raster, row-major doubles. Image planes hold values in
/// [0, 1]; derived rasters (gradients, cost fields) use whatever range their
/// producer documents.
struct ImagePlane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ImagePlane() = default;
    ImagePlane(int w, int h, double fill = 0.0)
        : width(w), height(h),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double& at(int r, int c) {
        return data[static_cast<std::size_t>(r) * width + c];
    }
    double at(int r, int c) const {
        return data[static_cast<std::size_t>(r) * width + c];
    }

    /// Clamped access; replicates the border, matching the convolution policy.
    double at_clamped(int r, int c) const {
        r = std::clamp(r, 0, height - 1);
        c = std::clamp(c, 0, width - 1);
        return at(r, c);
    }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
};

/// Three-channel RGB raster, channels in [0, 1].
struct RgbImage {
    ImagePlane r, g, b;

    RgbImage() = default;
    RgbImage(int w, int h) : r(w, h), g(w, h), b(w, h) {}
    RgbImage(ImagePlane red, ImagePlane green, ImagePlane blue)
        : r(std::move(red)), g(std::move(green)), b(std::move(blue)) {}

    int width() const { return r.width; }
    int height() const { return r.height; }
    bool empty() const { return r.empty(); }
};

/// Bilinear sample with border replication. Sample coordinates are pixel
/// centers: (row, col) = (0, 0) is the center of the top-left pixel.
inline double sample_bilinear(const ImagePlane& p, double row, double col) {
    const int r0 = static_cast<int>(std::floor(row));
    const int c0 = static_cast<int>(std::floor(col));
    const double fr = row - r0;
    const double fc = col - c0;
    const double v00 = p.at_clamped(r0, c0);
    const double v01 = p.at_clamped(r0, c0 + 1);
    const double v10 = p.at_clamped(r0 + 1, c0);
    const double v11 = p.at_clamped(r0 + 1, c0 + 1);
    return v00 * (1 - fr) * (1 - fc) + v01 * (1 - fr) * fc +
           v10 * fr * (1 - fc) + v11 * fr * fc;
}

/// Bilinear resize to an exact target size. Identity sizes return a copy that
/// is bit-equal to the source (the sample grid degenerates to the original
/// pixel centers). Constant images stay constant: bilinear weights sum to 1.
inline ImagePlane resize_bilinear(const ImagePlane& src, int out_w, int out_h) {
    if (src.empty()) throw UsageError("resize_bilinear: empty input");
    if (out_w <= 0 || out_h <= 0)
        throw UsageError("resize_bilinear: nonpositive output size");
    ImagePlane out(out_w, out_h);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int r = 0; r < out_h; ++r) {
        const double srow = (r + 0.5) * sy - 0.5;
        for (int c = 0; c < out_w; ++c) {
            const double scol = (c + 0.5) * sx - 0.5;
            out.at(r, c) = sample_bilinear(src, srow, scol);
        }
    }
    return out;
}

/// Resize preserving aspect ratio: height becomes target_h, width is
/// round(width * target_h / height).
inline ImagePlane resize_to_height(const ImagePlane& src, int target_h) {
    if (src.empty()) throw UsageError("resize_to_height: empty input");
    if (target_h <= 0) throw UsageError("resize_to_height: nonpositive height");
    const int out_w = std::max(
        1, static_cast<int>(std::lround(static_cast<double>(src.width) *
                                        target_h / src.height)));
    return resize_bilinear(src, out_w, target_h);
}

inline RgbImage resize_to_height(const RgbImage& src, int target_h) {
    return {resize_to_height(src.r, target_h), resize_to_height(src.g, target_h),
            resize_to_height(src.b, target_h)};
}

inline RgbImage resize_bilinear(const RgbImage& src, int out_w, int out_h) {
    return {resize_bilinear(src.r, out_w, out_h),
            resize_bilinear(src.g, out_w, out_h),
            resize_bilinear(src.b, out_w, out_h)};
}

/// Dense 2D correlation with an odd-sized kernel and replicated borders.
/// kernel is row-major kh x kw; the anchor is the kernel center.
inline ImagePlane correlate(const ImagePlane& src, const std::vector<double>& kernel,
                            int kw, int kh) {
    if (kw <= 0 || kh <= 0 || kw % 2 == 0 || kh % 2 == 0)
        throw UsageError("correlate: kernel sides must be odd and positive");
    if (static_cast<std::size_t>(kw) * kh != kernel.size())
        throw UsageError("correlate: kernel size mismatch");
    const int rx = kw / 2;
    const int ry = kh / 2;
    ImagePlane out(src.width, src.height);
    for (int r = 0; r < src.height; ++r) {
        for (int c = 0; c < src.width; ++c) {
            double acc = 0.0;
            for (int dy = -ry; dy <= ry; ++dy)
                for (int dx = -rx; dx <= rx; ++dx)
                    acc += kernel[static_cast<std::size_t>(dy + ry) * kw +
                                  (dx + rx)] *
                           src.at_clamped(r + dy, c + dx);
            out.at(r, c) = acc;
        }
    }
    return out;
}

inline ImagePlane flip_horizontal(const ImagePlane& src) {
    ImagePlane out(src.width, src.height);
    for (int r = 0; r < src.height; ++r)
        for (int c = 0; c < src.width; ++c)
            out.at(r, c) = src.at(r, src.width - 1 - c);
    return out;
}

inline RgbImage flip_horizontal(const RgbImage& src) {
    return {flip_horizontal(src.r), flip_horizontal(src.g),
            flip_horizontal(src.b)};
}

/// BT.601 luma; the single gray plane used by gradient maps, the orientation
/// field and dense descriptors.
inline ImagePlane luma(const RgbImage& img) {
    ImagePlane out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] =
            0.299 * img.r.data[i] + 0.587 * img.g.data[i] + 0.114 * img.b.data[i];
    return out;
}

} // namespace wristmatch

#endif
