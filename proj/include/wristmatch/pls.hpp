#ifndef WRISTMATCH_PLS_HPP
#define WRISTMATCH_PLS_HPP

#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/matrix.hpp"

namespace wristmatch {

inline constexpr int kPlsComponents = 5;

/// One-vs-all regression classifier. Centering and scaling are folded so
/// that a raw feature vector scores as beta . (x - x_mean) + y_mean.
struct PlsModel {
    std::vector<double> beta;
    std::vector<double> x_mean;
    std::vector<double> x_scale;
    double y_mean = 0.0;
    int components = 0;
};

/// NIPALS working set, exposed for inspection: score and loading columns
/// per component plus the final residuals of the scaled problem.
struct PlsTrainingState {
    Matrix t, u, p;        // n x k, n x k, d x k
    std::vector<double> q; // k
    Matrix e;              // residual X (scaled units)
    std::vector<double> f; // residual y (scaled units)
};

inline double pls_score(const PlsModel& m, const std::vector<double>& x) {
    if (x.size() != m.beta.size())
        throw UsageError("pls_score: feature length does not match the model");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        s += m.beta[j] * (x[j] - m.x_mean[j]);
    return s + m.y_mean;
}

/// PLS1 regression via NIPALS. Both sides are mean-centered and scaled by
/// their population standard deviation first (zero-variance columns keep
/// unit scale so the layout never changes); components whose remaining
/// X'y covariance vanishes are truncated with a warning. The coefficient
/// fold-back beta = W (P'W)^-1 q is exact because P'W is unit upper
/// triangular for NIPALS weights.
inline PlsModel pls_train(const Matrix& X, const std::vector<double>& y,
                          int k = kPlsComponents,
                          PlsTrainingState* state = nullptr) {
    const std::size_t n = X.rows, d = X.cols;
    if (n < 2 || d == 0) throw UsageError("pls_train: need at least 2 samples");
    if (y.size() != n) throw UsageError("pls_train: label count mismatch");
    if (k < 1) throw UsageError("pls_train: need at least 1 component");

    PlsModel model;
    model.x_mean.assign(d, 0.0);
    model.x_scale.assign(d, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) model.x_mean[j] += X.at(i, j);
    for (std::size_t j = 0; j < d; ++j) model.x_mean[j] /= static_cast<double>(n);

    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    model.y_mean = y_mean;

    double y_var = 0.0;
    for (double v : y) y_var += (v - y_mean) * (v - y_mean);
    y_var /= static_cast<double>(n);
    if (y_var <= 0.0)
        throw DataError("pls_train: labels are all one class");
    const double y_scale = std::sqrt(y_var);

    Matrix e(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = X.at(i, j) - model.x_mean[j];
            var += c * c;
        }
        var /= static_cast<double>(n);
        // a column that is constant up to rounding keeps unit scale and a
        // zero centered value, otherwise folding 1/x_scale into beta would
        // blow the rounding noise up to O(1) coefficients
        const double mj = model.x_mean[j];
        if (var <= 1e-24 * (mj * mj + 1.0)) continue;
        model.x_scale[j] = std::sqrt(var);
        for (std::size_t i = 0; i < n; ++i)
            e.at(i, j) = (X.at(i, j) - model.x_mean[j]) / model.x_scale[j];
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = (y[i] - y_mean) / y_scale;

    // per component: weights w, scores t, loadings p and q
    std::vector<std::vector<double>> ws, ts, ps;
    std::vector<std::vector<double>> us;
    std::vector<double> qs;

    for (int comp = 0; comp < k; ++comp) {
        // inner NIPALS loop; with a single response it settles immediately,
        // the loop guards the general contract
        std::vector<double> u = f;
        std::vector<double> w(d, 0.0), w_prev;
        std::vector<double> t(n, 0.0);
        double q = 0.0;
        bool degenerate = false;
        for (int it = 0; it < 500; ++it) {
            double norm = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += e.at(i, j) * u[i];
                w[j] = s;
                norm += s * s;
            }
            norm = std::sqrt(norm);
            if (norm < 1e-12) {
                degenerate = true;
                break;
            }
            for (auto& v : w) v /= norm;

            double tt = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += e.at(i, j) * w[j];
                t[i] = s;
                tt += s * s;
            }
            if (tt < 1e-24) {
                degenerate = true;
                break;
            }
            double qf = 0.0;
            for (std::size_t i = 0; i < n; ++i) qf += f[i] * t[i];
            q = qf / tt;

            double delta = 0.0;
            if (!w_prev.empty())
                for (std::size_t j = 0; j < d; ++j)
                    delta = std::max(delta, std::abs(w[j] - w_prev[j]));
            if (!w_prev.empty() && delta < 1e-10) break;
            w_prev = w;
            for (std::size_t i = 0; i < n; ++i) u[i] = f[i] * q;
        }
        if (degenerate) {
            std::cerr << "pls_train: no covariance left, truncating to "
                      << comp << " of " << k << " components\n";
            break;
        }

        double tt = 0.0;
        for (double v : t) tt += v * v;
        std::vector<double> p(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += e.at(i, j) * t[i];
            p[j] = s / tt;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) e.at(i, j) -= t[i] * p[j];
        for (std::size_t i = 0; i < n; ++i) f[i] -= t[i] * q;

        ws.push_back(w);
        ts.push_back(t);
        us.push_back(u);
        ps.push_back(p);
        qs.push_back(q);
    }
    const int got = static_cast<int>(qs.size());
    if (got == 0) throw NumericError("pls_train: features carry no signal");
    model.components = got;

    // beta_scaled = W (P'W)^-1 q, with P'W unit upper triangular
    Matrix pw(static_cast<std::size_t>(got), static_cast<std::size_t>(got));
    for (int a = 0; a < got; ++a)
        for (int b = 0; b < got; ++b) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                s += ps[static_cast<std::size_t>(a)][j] *
                     ws[static_cast<std::size_t>(b)][j];
            pw.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = s;
        }
    // solve (P'W) g = q by back substitution
    std::vector<double> g(static_cast<std::size_t>(got));
    for (int a = got - 1; a >= 0; --a) {
        double s = qs[static_cast<std::size_t>(a)];
        for (int b = a + 1; b < got; ++b)
            s -= pw.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) *
                 g[static_cast<std::size_t>(b)];
        const double diag =
            pw.at(static_cast<std::size_t>(a), static_cast<std::size_t>(a));
        if (std::abs(diag) < 1e-12)
            throw NumericError("pls_train: singular loading system");
        g[static_cast<std::size_t>(a)] = s / diag;
    }
    model.beta.assign(d, 0.0);
    for (int a = 0; a < got; ++a)
        for (std::size_t j = 0; j < d; ++j)
            model.beta[j] += ws[static_cast<std::size_t>(a)][j] *
                             g[static_cast<std::size_t>(a)];
    // undo the scaling: scaled features x_s = (x - mean) / x_scale and
    // scaled response y_s = (y - mean) / y_scale
    for (std::size_t j = 0; j < d; ++j)
        model.beta[j] *= y_scale / model.x_scale[j];

    if (state) {
        state->t = Matrix(n, static_cast<std::size_t>(got));
        state->u = Matrix(n, static_cast<std::size_t>(got));
        state->p = Matrix(d, static_cast<std::size_t>(got));
        state->q = qs;
        for (int a = 0; a < got; ++a)
            for (std::size_t i = 0; i < n; ++i) {
                state->t.at(i, static_cast<std::size_t>(a)) =
                    ts[static_cast<std::size_t>(a)][i];
                state->u.at(i, static_cast<std::size_t>(a)) =
                    us[static_cast<std::size_t>(a)][i];
            }
        for (int a = 0; a < got; ++a)
            for (std::size_t j = 0; j < d; ++j)
                state->p.at(j, static_cast<std::size_t>(a)) =
                    ps[static_cast<std::size_t>(a)][j];
        state->e = std::move(e);
        state->f = std::move(f);
    }
    return model;
}

} // namespace wristmatch

#endif
