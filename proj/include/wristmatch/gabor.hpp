#ifndef WRISTMATCH_GABOR_HPP
#define WRISTMATCH_GABOR_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/fft.hpp"
#include "wristmatch/grids.hpp"
#include "wristmatch/image.hpp"

namespace wristmatch {

inline constexpr int kGaborOrientations = 16;
inline constexpr int kGaborScales = 4;
inline constexpr double kGaborScaleSet[kGaborScales] = {0.2, 0.5, 0.7, 0.9};

/// Response magnitudes below this are indistinguishable from FFT round-off
/// on a flat patch (true responses on [0,1] images are orders larger), so
/// such pixels keep orientation label 0 instead of an arbitrary winner.
inline constexpr double kGaborResponseFloor = 1e-9;

/// Per-pixel dominant stripe orientation, one of 16 labels spaced pi/16.
struct OrientationField {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    int at(int r, int c) const {
        return labels[static_cast<std::size_t>(r) * width + c];
    }
};

/// Bank of 64 complex Gabor filters (16 orientations x 4 scales) bound to a
/// fixed image size. Construction precomputes every kernel's spectrum on a
/// power-of-two canvas with room for replicate padding, so applying the
/// bank is one forward FFT plus 64 pointwise products and inverses.
/// Immutable after construction; share one instance across threads.
class GaborBank {
  public:
    GaborBank(int width, int height) : w_(width), h_(height) {
        if (width <= 0 || height <= 0)
            throw UsageError("gabor bank: empty image size");
        // sigma_m in pixels (scale times a tenth of the ROI height band),
        // one sinusoid wavelength per Gaussian std: lambda = sigma / 0.56.
        for (int m = 0; m < kGaborScales; ++m) {
            sigma_[m] = kGaborScaleSet[m] * 10.0;
            radius_[m] = static_cast<int>(std::ceil(2.5 * sigma_[m]));
        }
        pad_ = radius_[kGaborScales - 1];
        cw_ = fft::next_pow2(static_cast<std::size_t>(w_ + 2 * pad_));
        ch_ = fft::next_pow2(static_cast<std::size_t>(h_ + 2 * pad_));

        kernels_.reserve(kGaborOrientations * kGaborScales);
        for (int k = 0; k < kGaborOrientations; ++k)
            for (int m = 0; m < kGaborScales; ++m)
                kernels_.push_back(kernel_spectrum(k, m));
    }

    int width() const { return w_; }
    int height() const { return h_; }

    /// Eq.-style orientation field: the label of the filter with the
    /// largest response magnitude, scanned orientation-major, strict
    /// improvement only. A flat image keeps every pixel at label 0.
    OrientationField orientation_field(const ImagePlane& gray) const {
        if (gray.width != w_ || gray.height != h_)
            throw UsageError("gabor bank: image size does not match the bank");

        std::vector<fft::cplx> image(cw_ * ch_, 0.0);
        for (std::size_t r = 0; r < static_cast<std::size_t>(h_ + 2 * pad_); ++r)
            for (std::size_t c = 0; c < static_cast<std::size_t>(w_ + 2 * pad_);
                 ++c) {
                const int sr = std::clamp(static_cast<int>(r) - pad_, 0, h_ - 1);
                const int sc = std::clamp(static_cast<int>(c) - pad_, 0, w_ - 1);
                image[r * cw_ + c] = gray.at(sr, sc);
            }
        fft::transform_2d(image, cw_, ch_, false);

        OrientationField field;
        field.width = w_;
        field.height = h_;
        field.labels.assign(static_cast<std::size_t>(w_) * h_, 0);
        std::vector<double> best(static_cast<std::size_t>(w_) * h_,
                                 kGaborResponseFloor);

        std::vector<fft::cplx> prod(cw_ * ch_);
        for (int k = 0; k < kGaborOrientations; ++k)
            for (int m = 0; m < kGaborScales; ++m) {
                const auto& spec =
                    kernels_[static_cast<std::size_t>(k * kGaborScales + m)];
                for (std::size_t i = 0; i < prod.size(); ++i)
                    prod[i] = image[i] * spec[i];
                fft::transform_2d(prod, cw_, ch_, true);
                for (int r = 0; r < h_; ++r)
                    for (int c = 0; c < w_; ++c) {
                        const std::size_t at =
                            static_cast<std::size_t>(r) * w_ + c;
                        const double mag = std::abs(
                            prod[(static_cast<std::size_t>(r) + pad_) * cw_ +
                                 (static_cast<std::size_t>(c) + pad_)]);
                        if (mag > best[at]) {
                            best[at] = mag;
                            field.labels[at] = k;
                        }
                    }
            }
        return field;
    }

  private:
    int w_, h_;
    double sigma_[kGaborScales];
    int radius_[kGaborScales];
    int pad_ = 0;
    std::size_t cw_ = 0, ch_ = 0;
    std::vector<std::vector<fft::cplx>> kernels_;

    /// Spectrum of one filter, centered at the canvas origin (wraparound
    /// taps), so spatial-domain responses line up with the padded image.
    /// The real (cosine) part is mean-subtracted, the odd imaginary part is
    /// zero-mean by symmetry; the whole kernel is L2-normalized to make
    /// magnitudes comparable across scales.
    std::vector<fft::cplx> kernel_spectrum(int k, int m) const {
        constexpr double kPi = 3.141592653589793238462643383279502884;
        constexpr double kGamma = 0.5; // spatial aspect ratio
        const double theta = k * kPi / kGaborOrientations;
        const double sigma = sigma_[m];
        const double lambda = sigma / 0.56;
        const int radius = radius_[m];
        const double ct = std::cos(theta), st = std::sin(theta);

        const int side = 2 * radius + 1;
        std::vector<fft::cplx> taps(static_cast<std::size_t>(side) * side);
        double mean_re = 0.0;
        for (int y = -radius; y <= radius; ++y)
            for (int x = -radius; x <= radius; ++x) {
                const double p = x * ct + y * st;  // along the stripes
                const double q = -x * st + y * ct; // across the stripes
                const double env = std::exp(
                    -(q * q + kGamma * kGamma * p * p) / (2.0 * sigma * sigma));
                const double phase = 2.0 * kPi * q / lambda;
                taps[static_cast<std::size_t>(y + radius) * side +
                     (x + radius)] = {env * std::cos(phase),
                                      env * std::sin(phase)};
                mean_re += env * std::cos(phase);
            }
        mean_re /= static_cast<double>(taps.size());
        double ss = 0.0;
        for (auto& t : taps) {
            t -= fft::cplx(mean_re, 0.0);
            ss += std::norm(t);
        }
        const double inv = 1.0 / std::sqrt(ss);
        std::vector<fft::cplx> canvas(cw_ * ch_, 0.0);
        for (int y = -radius; y <= radius; ++y)
            for (int x = -radius; x <= radius; ++x) {
                const std::size_t r = static_cast<std::size_t>(
                    (y + static_cast<int>(ch_)) % static_cast<int>(ch_));
                const std::size_t c = static_cast<std::size_t>(
                    (x + static_cast<int>(cw_)) % static_cast<int>(cw_));
                canvas[r * cw_ + c] =
                    taps[static_cast<std::size_t>(y + radius) * side +
                         (x + radius)] *
                    inv;
            }
        fft::transform_2d(canvas, cw_, ch_, false);
        return canvas;
    }
};

/// 16-bin orientation histograms over every block of all seven grids:
/// 132 blocks x 16 bins = 2112 counts.
inline std::vector<double> gabor_histograms(const OrientationField& field) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kTotalGridBlocks) *
                kGaborOrientations);
    for (const auto& spec : kGrids) {
        const auto blocks = grid_blocks(spec, field.width, field.height);
        for (const auto& b : blocks) {
            const std::size_t base = out.size();
            out.resize(base + kGaborOrientations, 0.0);
            for (int r = b.r0; r < b.r1; ++r)
                for (int c = b.c0; c < b.c1; ++c)
                    out[base + static_cast<std::size_t>(field.at(r, c))] += 1.0;
        }
    }
    return out;
}

} // namespace wristmatch

#endif
