#ifndef WRISTMATCH_FFT_HPP
#define WRISTMATCH_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "wristmatch/errors.hpp"

namespace wristmatch {
namespace fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform. invert=true applies the inverse
/// including the 1/n scale. Used only for fast large-kernel convolution; the
/// twiddle recurrence is plain double math, deterministic across runs.
inline void transform(std::vector<cplx>& a, bool invert) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw UsageError("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    constexpr double kPi = 3.141592653589793238462643383279502884;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (invert ? 1.0 : -1.0);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (invert)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// Row-major 2D transform over a w x h grid (both powers of two).
inline void transform_2d(std::vector<cplx>& a, std::size_t w, std::size_t h,
                         bool invert) {
    if (a.size() != w * h) throw UsageError("fft: grid size mismatch");
    std::vector<cplx> row(w), col(h);
    for (std::size_t r = 0; r < h; ++r) {
        std::copy(a.begin() + r * w, a.begin() + (r + 1) * w, row.begin());
        transform(row, invert);
        std::copy(row.begin(), row.end(), a.begin() + r * w);
    }
    for (std::size_t c = 0; c < w; ++c) {
        for (std::size_t r = 0; r < h; ++r) col[r] = a[r * w + c];
        transform(col, invert);
        for (std::size_t r = 0; r < h; ++r) a[r * w + c] = col[r];
    }
}

} // namespace fft
} // namespace wristmatch

#endif
