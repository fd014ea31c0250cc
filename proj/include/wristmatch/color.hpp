#ifndef WRISTMATCH_COLOR_HPP
#define WRISTMATCH_COLOR_HPP

#include <array>
#include <cmath>
#include <string>

#include "wristmatch/image.hpp"

namespace wristmatch {

/// The 18 color planes used by superpixel statistics: six 3-channel spaces.
/// Every plane is rescaled to [0, 1] by the fixed affine maps documented in
/// to_color_stack, so downstream statistics mix spaces on a common scale.
struct ColorStack {
    static constexpr int kPlaneCount = 18;
    std::array<ImagePlane, kPlaneCount> planes;

    int width() const { return planes[0].width; }
    int height() const { return planes[0].height; }

    /// Stable plane names, index-aligned with `planes`.
    static const std::array<std::string, kPlaneCount>& names() {
        static const std::array<std::string, kPlaneCount> n = {
            "rgb.r",   "rgb.g",   "rgb.b",   "hsv.h",   "hsv.s",   "hsv.v",
            "lab.l",   "lab.a",   "lab.b",   "ycbcr.y", "ycbcr.cb", "ycbcr.cr",
            "yiq.y",   "yiq.i",   "yiq.q",   "nrgb.r",  "nrgb.g",  "nrgb.b"};
        return n;
    }
};

namespace detail {

inline double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta
               ? std::cbrt(t)
               : t / (3 * delta * delta) + 4.0 / 29.0;
}

} // namespace detail

/// Build the 18-plane stack from an RGB image in [0, 1].
///
/// Plane scalings (all fixed, chosen so every sRGB input lands in [0, 1]):
///  - RGB: stored as-is.
///  - HSV: hue in degrees / 360, saturation and value as-is. Gray pixels
///    (max = min) take hue 0; black takes saturation 0.
///  - CIELAB (D65, sRGB gamma): L/100, (a+128)/255, (b+128)/255.
///  - YCbCr (BT.601 full range): Y as-is, Cb and Cr already offset to [0, 1].
///  - YIQ (NTSC): luma as-is, I and Q shifted by their extreme magnitudes
///    (0.595716, 0.522591) and divided by twice that.
///  - Normalized RGB: channel / (R+G+B); black maps to (1/3, 1/3, 1/3).
inline ColorStack to_color_stack(const RgbImage& img) {
    if (img.empty()) throw UsageError("to_color_stack: empty image");
    ColorStack s;
    for (auto& p : s.planes) p = ImagePlane(img.width(), img.height());

    constexpr double kIMax = 0.595716;
    constexpr double kQMax = 0.522591;
    for (std::size_t i = 0; i < img.r.size(); ++i) {
        const double r = img.r.data[i];
        const double g = img.g.data[i];
        const double b = img.b.data[i];

        s.planes[0].data[i] = r;
        s.planes[1].data[i] = g;
        s.planes[2].data[i] = b;

        // HSV
        const double mx = std::max({r, g, b});
        const double mn = std::min({r, g, b});
        const double d = mx - mn;
        double h = 0.0;
        if (d > 0.0) {
            if (mx == r)
                h = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
            else if (mx == g)
                h = 60.0 * ((b - r) / d + 2.0);
            else
                h = 60.0 * ((r - g) / d + 4.0);
        }
        s.planes[3].data[i] = h / 360.0;
        s.planes[4].data[i] = mx > 0.0 ? d / mx : 0.0;
        s.planes[5].data[i] = mx;

        // CIELAB via linear sRGB and XYZ(D65)
        const double rl = detail::srgb_to_linear(r);
        const double gl = detail::srgb_to_linear(g);
        const double bl = detail::srgb_to_linear(b);
        const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
        const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
        const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
        const double fx = detail::lab_f(x / 0.95047);
        const double fy = detail::lab_f(y);
        const double fz = detail::lab_f(z / 1.08883);
        const double lab_l = 116.0 * fy - 16.0;
        const double lab_a = 500.0 * (fx - fy);
        const double lab_b = 200.0 * (fy - fz);
        s.planes[6].data[i] = lab_l / 100.0;
        s.planes[7].data[i] = (lab_a + 128.0) / 255.0;
        s.planes[8].data[i] = (lab_b + 128.0) / 255.0;

        // YCbCr (BT.601, full range)
        const double y601 = 0.299 * r + 0.587 * g + 0.114 * b;
        s.planes[9].data[i] = y601;
        s.planes[10].data[i] = (b - y601) / 1.772 + 0.5;
        s.planes[11].data[i] = (r - y601) / 1.402 + 0.5;

        // YIQ (NTSC)
        const double yi = 0.595716 * r - 0.274453 * g - 0.321263 * b;
        const double yq = 0.211456 * r - 0.522591 * g + 0.311135 * b;
        s.planes[12].data[i] = y601;
        s.planes[13].data[i] = (yi + kIMax) / (2.0 * kIMax);
        s.planes[14].data[i] = (yq + kQMax) / (2.0 * kQMax);

        // Normalized RGB
        const double sum = r + g + b;
        if (sum > 0.0) {
            s.planes[15].data[i] = r / sum;
            s.planes[16].data[i] = g / sum;
            s.planes[17].data[i] = b / sum;
        } else {
            s.planes[15].data[i] = 1.0 / 3.0;
            s.planes[16].data[i] = 1.0 / 3.0;
            s.planes[17].data[i] = 1.0 / 3.0;
        }
    }
    return s;
}

/// Inverse of the HSV used in to_color_stack, for round-trip checks and
/// color synthesis. h in [0, 1) is degrees/360; s, v in [0, 1].
inline void hsv_to_rgb(double h, double s, double v, double& r, double& g,
                       double& b) {
    const double hh = h * 6.0;
    const int sector = static_cast<int>(std::floor(hh)) % 6;
    const double f = hh - std::floor(hh);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

} // namespace wristmatch

#endif
