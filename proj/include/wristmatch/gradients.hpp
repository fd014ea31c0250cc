#ifndef WRISTMATCH_GRADIENTS_HPP
#define WRISTMATCH_GRADIENTS_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wristmatch/image.hpp"

namespace wristmatch {

/// The 7 gradient maps fed to superpixel statistics, in fixed order:
/// sobel_x, sobel_y, prewitt_x, prewitt_y, laplacian, dog, log.
/// Values are raw (signed) filter responses; no rescaling is applied here.
struct GradientMapSet {
    static constexpr int kMapCount = 7;
    std::array<ImagePlane, kMapCount> maps;

    static const std::array<std::string, kMapCount>& names() {
        static const std::array<std::string, kMapCount> n = {
            "sobel_x", "sobel_y", "prewitt_x", "prewitt_y",
            "laplacian", "dog", "log"};
        return n;
    }
};

namespace detail {

/// Normalized 1D Gaussian, radius = ceil(3*sigma).
inline std::vector<double> gaussian_kernel_1d(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

inline ImagePlane gaussian_blur(const ImagePlane& src, double sigma) {
    const auto k = gaussian_kernel_1d(sigma);
    const int n = static_cast<int>(k.size());
    ImagePlane tmp = correlate(src, k, n, 1);
    return correlate(tmp, k, 1, n);
}

/// Sampled Laplacian-of-Gaussian, radius = ceil(3*sigma), adjusted to zero
/// mean so constant images give exactly zero response.
inline std::vector<double> log_kernel(double sigma, int& side) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    side = 2 * radius + 1;
    std::vector<double> k(static_cast<std::size_t>(side) * side);
    const double s2 = sigma * sigma;
    double mean = 0.0;
    for (int y = -radius; y <= radius; ++y)
        for (int x = -radius; x <= radius; ++x) {
            const double r2 = x * x + y * y;
            const double v = (r2 - 2.0 * s2) / (s2 * s2) * std::exp(-r2 / (2.0 * s2));
            k[static_cast<std::size_t>(y + radius) * side + (x + radius)] = v;
            mean += v;
        }
    mean /= static_cast<double>(k.size());
    for (double& v : k) v -= mean;
    return k;
}

} // namespace detail

inline ImagePlane sobel_x(const ImagePlane& gray) {
    static const std::vector<double> k = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
    return correlate(gray, k, 3, 3);
}

inline ImagePlane sobel_y(const ImagePlane& gray) {
    static const std::vector<double> k = {-1, -2, -1, 0, 0, 0, 1, 2, 1};
    return correlate(gray, k, 3, 3);
}

/// Compute all 7 maps from a gray plane. Conventions:
///  - Sobel x kernel rows are (-1 0 1; -2 0 2; -1 0 1) applied as correlation,
///    so a vertical step edge of height h answers with magnitude 4h at the
///    columns flanking the edge. Sobel y is its transpose.
///  - Prewitt uses unit weights.
///  - Laplacian is the 4-neighbor stencil (0 1 0; 1 -4 1; 0 1 0).
///  - DoG subtracts a sigma=2 Gaussian blur from a sigma=1 blur.
///  - LoG samples the analytic kernel at sigma=1.5.
/// All kernels have zero sum, so any constant image maps to all-zero in
/// every map. Borders replicate.
inline GradientMapSet gradient_maps(const ImagePlane& gray) {
    if (gray.empty()) throw UsageError("gradient_maps: empty input");
    GradientMapSet out;
    out.maps[0] = sobel_x(gray);
    out.maps[1] = sobel_y(gray);
    static const std::vector<double> prewitt_x_k = {-1, 0, 1, -1, 0, 1, -1, 0, 1};
    static const std::vector<double> prewitt_y_k = {-1, -1, -1, 0, 0, 0, 1, 1, 1};
    out.maps[2] = correlate(gray, prewitt_x_k, 3, 3);
    out.maps[3] = correlate(gray, prewitt_y_k, 3, 3);
    static const std::vector<double> lap_k = {0, 1, 0, 1, -4, 1, 0, 1, 0};
    out.maps[4] = correlate(gray, lap_k, 3, 3);

    const ImagePlane g1 = detail::gaussian_blur(gray, 1.0);
    const ImagePlane g2 = detail::gaussian_blur(gray, 2.0);
    ImagePlane dog(gray.width, gray.height);
    for (std::size_t i = 0; i < dog.size(); ++i)
        dog.data[i] = g1.data[i] - g2.data[i];
    out.maps[5] = std::move(dog);

    int side = 0;
    const auto logk = detail::log_kernel(1.5, side);
    out.maps[6] = correlate(gray, logk, side, side);
    return out;
}

} // namespace wristmatch

#endif
