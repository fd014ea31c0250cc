#ifndef WRISTMATCH_CPD_HPP
#define WRISTMATCH_CPD_HPP

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "wristmatch/errors.hpp"

namespace wristmatch {

/// 2D affine map p -> L p + t with a nonsingular linear part. Points are
/// (row, col) pairs throughout.
struct AffineTransform {
    std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0}; // row-major 2x2
    std::array<double, 2> translation{0.0, 0.0};

    std::array<double, 2> apply(const std::array<double, 2>& p) const {
        return {linear[0] * p[0] + linear[1] * p[1] + translation[0],
                linear[2] * p[0] + linear[3] * p[1] + translation[1]};
    }

    double det() const { return linear[0] * linear[3] - linear[1] * linear[2]; }

    AffineTransform inverse() const {
        const double d = det();
        if (std::abs(d) <= 1e-9)
            throw NumericError("affine transform is singular");
        AffineTransform inv;
        inv.linear = {linear[3] / d, -linear[1] / d, -linear[2] / d,
                      linear[0] / d};
        inv.translation = {
            -(inv.linear[0] * translation[0] + inv.linear[1] * translation[1]),
            -(inv.linear[2] * translation[0] + inv.linear[3] * translation[1])};
        return inv;
    }

    /// outer(inner(p)).
    static AffineTransform compose(const AffineTransform& outer,
                                   const AffineTransform& inner) {
        AffineTransform out;
        out.linear = {
            outer.linear[0] * inner.linear[0] + outer.linear[1] * inner.linear[2],
            outer.linear[0] * inner.linear[1] + outer.linear[1] * inner.linear[3],
            outer.linear[2] * inner.linear[0] + outer.linear[3] * inner.linear[2],
            outer.linear[2] * inner.linear[1] + outer.linear[3] * inner.linear[3]};
        const auto t = outer.apply(inner.translation);
        out.translation = {t[0], t[1]};
        return out;
    }
};

struct CpdOptions {
    double outlier_weight = 0.1;
    int max_iterations = 150;
    double tolerance = 1e-6; // on the log-likelihood change
};

namespace detail {

struct Norm2d {
    std::array<double, 2> mean{0.0, 0.0};
    double scale = 1.0;
};

inline Norm2d normalize_points(std::vector<std::array<double, 2>>& pts) {
    Norm2d n;
    for (const auto& p : pts) {
        n.mean[0] += p[0];
        n.mean[1] += p[1];
    }
    n.mean[0] /= static_cast<double>(pts.size());
    n.mean[1] /= static_cast<double>(pts.size());
    double ss = 0.0;
    for (auto& p : pts) {
        p[0] -= n.mean[0];
        p[1] -= n.mean[1];
        ss += p[0] * p[0] + p[1] * p[1];
    }
    n.scale = std::sqrt(ss / static_cast<double>(pts.size()));
    if (!(n.scale > 0.0))
        throw NumericError("cpd: degenerate point set (all points coincide)");
    for (auto& p : pts) {
        p[0] /= n.scale;
        p[1] /= n.scale;
    }
    return n;
}

inline void require_spread(const std::vector<std::array<double, 2>>& pts,
                           const char* which) {
    // Covariance determinant of a normalized set vanishes iff collinear.
    double c00 = 0.0, c01 = 0.0, c11 = 0.0;
    for (const auto& p : pts) {
        c00 += p[0] * p[0];
        c01 += p[0] * p[1];
        c11 += p[1] * p[1];
    }
    const double n = static_cast<double>(pts.size());
    const double det = (c00 / n) * (c11 / n) - (c01 / n) * (c01 / n);
    if (det < 1e-12)
        throw NumericError(std::string("cpd: ") + which +
                           " points are collinear; affine fit is singular");
}

} // namespace detail

/// Affine coherent point drift: EM over a Gaussian mixture whose centroids
/// are the affinely transformed source points, with a uniform outlier
/// component (weight 0.1 by default). Iterates until the data
/// log-likelihood moves less than the tolerance or the iteration cap is
/// reached. Returns the source -> target map in the original coordinates.
inline AffineTransform cpd_affine_register(
    const std::vector<std::array<double, 2>>& source,
    const std::vector<std::array<double, 2>>& target,
    const CpdOptions& opts = {}) {
    if (source.size() < 3 || target.size() < 3)
        throw UsageError("cpd: need at least 3 points in each set");
    if (!(opts.outlier_weight >= 0.0 && opts.outlier_weight < 1.0))
        throw UsageError("cpd: outlier weight must be in [0, 1)");

    std::vector<std::array<double, 2>> x(target); // data, fixed
    std::vector<std::array<double, 2>> y(source); // moving centroids
    const detail::Norm2d nx = detail::normalize_points(x);
    const detail::Norm2d ny = detail::normalize_points(y);
    detail::require_spread(x, "target");
    detail::require_spread(y, "source");

    const std::size_t big_n = x.size();
    const std::size_t big_m = y.size();
    const double w = opts.outlier_weight;

    std::array<double, 4> lin{1.0, 0.0, 0.0, 1.0};
    std::array<double, 2> tr{0.0, 0.0};
    double sigma2 = 0.0;
    for (const auto& xn : x)
        for (const auto& ym : y) {
            const double d0 = xn[0] - ym[0], d1 = xn[1] - ym[1];
            sigma2 += d0 * d0 + d1 * d1;
        }
    sigma2 /= 2.0 * static_cast<double>(big_n) * static_cast<double>(big_m);

    std::vector<std::array<double, 2>> ty(big_m);
    std::vector<double> p(big_n * big_m); // responsibilities, n-major
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        for (std::size_t m = 0; m < big_m; ++m)
            ty[m] = {lin[0] * y[m][0] + lin[1] * y[m][1] + tr[0],
                     lin[2] * y[m][0] + lin[3] * y[m][1] + tr[1]};

        // E-step. c is the outlier mass folded into every denominator.
        const double two_pi_sigma2 = 2.0 * 3.14159265358979323846 * sigma2;
        const double c = two_pi_sigma2 * w * static_cast<double>(big_m) /
                         ((1.0 - w) * static_cast<double>(big_n));
        double ll = 0.0;
        for (std::size_t n = 0; n < big_n; ++n) {
            double denom = c;
            for (std::size_t m = 0; m < big_m; ++m) {
                const double d0 = x[n][0] - ty[m][0];
                const double d1 = x[n][1] - ty[m][1];
                const double e = std::exp(-(d0 * d0 + d1 * d1) / (2.0 * sigma2));
                p[n * big_m + m] = e;
                denom += e;
            }
            ll += std::log(denom) +
                  std::log((1.0 - w) / (static_cast<double>(big_m) * two_pi_sigma2));
            const double inv = 1.0 / denom;
            for (std::size_t m = 0; m < big_m; ++m) p[n * big_m + m] *= inv;
        }

        // M-step: weighted means, centered second moments, 2x2 solve.
        double np = 0.0;
        std::array<double, 2> mx{0.0, 0.0}, my{0.0, 0.0};
        std::vector<double> p1(big_m, 0.0); // column sums over n
        for (std::size_t n = 0; n < big_n; ++n) {
            double row = 0.0;
            for (std::size_t m = 0; m < big_m; ++m) {
                const double v = p[n * big_m + m];
                row += v;
                p1[m] += v;
                my[0] += v * y[m][0];
                my[1] += v * y[m][1];
            }
            np += row;
            mx[0] += row * x[n][0];
            mx[1] += row * x[n][1];
        }
        if (!(np > 0.0)) throw NumericError("cpd: vanished responsibilities");
        mx[0] /= np; mx[1] /= np;
        my[0] /= np; my[1] /= np;

        double a1_00 = 0.0, a1_01 = 0.0, a1_10 = 0.0, a1_11 = 0.0;
        double a2_00 = 0.0, a2_01 = 0.0, a2_11 = 0.0;
        double xhat_ss = 0.0;
        for (std::size_t m = 0; m < big_m; ++m) {
            const double y0 = y[m][0] - my[0], y1 = y[m][1] - my[1];
            a2_00 += p1[m] * y0 * y0;
            a2_01 += p1[m] * y0 * y1;
            a2_11 += p1[m] * y1 * y1;
        }
        for (std::size_t n = 0; n < big_n; ++n) {
            const double x0 = x[n][0] - mx[0], x1 = x[n][1] - mx[1];
            double rown = 0.0;
            double sy0 = 0.0, sy1 = 0.0;
            for (std::size_t m = 0; m < big_m; ++m) {
                const double v = p[n * big_m + m];
                rown += v;
                sy0 += v * (y[m][0] - my[0]);
                sy1 += v * (y[m][1] - my[1]);
            }
            a1_00 += x0 * sy0;
            a1_01 += x0 * sy1;
            a1_10 += x1 * sy0;
            a1_11 += x1 * sy1;
            xhat_ss += rown * (x0 * x0 + x1 * x1);
        }
        const double det2 = a2_00 * a2_11 - a2_01 * a2_01;
        if (std::abs(det2) < 1e-12)
            throw NumericError("cpd: singular system (collinear support)");
        lin[0] = (a1_00 * a2_11 - a1_01 * a2_01) / det2;
        lin[1] = (a1_01 * a2_00 - a1_00 * a2_01) / det2;
        lin[2] = (a1_10 * a2_11 - a1_11 * a2_01) / det2;
        lin[3] = (a1_11 * a2_00 - a1_10 * a2_01) / det2;
        tr[0] = mx[0] - (lin[0] * my[0] + lin[1] * my[1]);
        tr[1] = mx[1] - (lin[2] * my[0] + lin[3] * my[1]);

        const double tr_ab = a1_00 * lin[0] + a1_01 * lin[1] + a1_10 * lin[2] +
                             a1_11 * lin[3];
        sigma2 = (xhat_ss - tr_ab) / (2.0 * np);
        if (!(sigma2 > 1e-12)) sigma2 = 1e-12;

        if (std::abs(ll - prev_ll) < opts.tolerance) break;
        prev_ll = ll;
    }

    // Undo the per-set normalization: the returned map acts on raw points.
    AffineTransform out;
    const double s = nx.scale / ny.scale;
    out.linear = {lin[0] * s, lin[1] * s, lin[2] * s, lin[3] * s};
    out.translation = {
        nx.mean[0] + nx.scale * tr[0] -
            (out.linear[0] * ny.mean[0] + out.linear[1] * ny.mean[1]),
        nx.mean[1] + nx.scale * tr[1] -
            (out.linear[2] * ny.mean[0] + out.linear[3] * ny.mean[1])};
    if (std::abs(out.det()) <= 1e-9)
        throw NumericError("cpd: recovered transform is singular");
    return out;
}

} // namespace wristmatch

#endif
