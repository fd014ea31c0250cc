#ifndef WRISTMATCH_WEIBULL_HPP
#define WRISTMATCH_WEIBULL_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "wristmatch/errors.hpp"

namespace wristmatch {

/// Two-parameter Weibull with an optional support shift: samples were
/// translated by -shift before fitting, so the CDF of a raw value x is
/// F(x - shift). shift stays 0 for fits on naturally positive data.
struct WeibullFit {
    double shape = 1.0; // b
    double scale = 1.0; // a
    double shift = 0.0;
    int sample_count = 0;
};

/// F(x) = 1 - exp(-((x - shift)/a)^b) for x >= shift, else 0.
inline double weibull_cdf(double x, const WeibullFit& fit) {
    const double z = x - fit.shift;
    if (z < 0.0) return 0.0;
    return 1.0 - std::exp(-std::pow(z / fit.scale, fit.shape));
}

/// Maximum-likelihood fit on strictly positive samples. The shape solves
/// the profile equation g(b) = S1/S0 - 1/b - mean(ln x) = 0 (S_k are
/// ln-weighted power sums) by Newton from b = 1; g is strictly increasing
/// (Cauchy-Schwarz), so the root is unique. Samples are normalized by
/// their maximum first, which keeps x^b bounded for any shape and makes
/// the scale equivariance fit(c x).a = c fit(x).a exact for powers of two.
inline WeibullFit weibull_fit(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw UsageError("weibull_fit: need at least 2 samples");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo <= 0.0)
        throw UsageError("weibull_fit: samples must be strictly positive");
    if (*lo == *hi)
        throw NumericError("weibull_fit: degenerate fit, all samples equal");

    const double top = *hi;
    std::vector<double> z(n), lz(n);
    double mean_lz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = samples[i] / top;
        lz[i] = std::log(z[i]);
        mean_lz += lz[i];
    }
    mean_lz /= static_cast<double>(n);

    double b = 1.0;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::pow(z[i], b);
            s0 += p;
            s1 += p * lz[i];
            s2 += p * lz[i] * lz[i];
        }
        const double g = s1 / s0 - 1.0 / b - mean_lz;
        const double dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (b * b);
        if (!(dg > 0.0))
            throw NumericError("weibull_fit: singular profile derivative");
        double next = b - g / dg;
        if (next <= 0.0) next = b / 2.0;
        const double delta = std::abs(next - b);
        b = next;
        if (delta < 1e-9) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericError("weibull_fit: shape iteration did not converge");

    double s0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s0 += std::pow(z[i], b);
    WeibullFit fit;
    fit.shape = b;
    fit.scale = std::pow(s0 / static_cast<double>(n), 1.0 / b) * top;
    fit.sample_count = static_cast<int>(n);
    return fit;
}

/// Fit for samples of arbitrary sign: translate them just past their
/// minimum (epsilon of one millionth of the range keeps the smallest
/// sample strictly positive), fit, and record the shift. Equal samples
/// leave no range to stand on and are rejected.
inline WeibullFit weibull_fit_shifted(const std::vector<double>& samples) {
    if (samples.size() < 2)
        throw UsageError("weibull_fit_shifted: need at least 2 samples");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    const double range = *hi - *lo;
    if (range <= 0.0)
        throw NumericError(
            "weibull_fit_shifted: degenerate fit, all samples equal");
    const double shift = *lo - 1e-6 * range;
    if (!(*lo - shift > 0.0))
        throw NumericError(
            "weibull_fit_shifted: sample spread vanishes under the shift");
    std::vector<double> moved(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        moved[i] = samples[i] - shift;
    WeibullFit fit = weibull_fit(moved);
    fit.shift = shift;
    return fit;
}

} // namespace wristmatch

#endif
