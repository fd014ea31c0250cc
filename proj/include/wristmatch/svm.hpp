#ifndef WRISTMATCH_SVM_HPP
#define WRISTMATCH_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/matrix.hpp"

namespace wristmatch {

inline constexpr double kSvmC = 1.0;

/// Linear decision function w . x + b for one-vs-all gallery matching.
struct SvmModel {
    std::vector<double> weight;
    double bias = 0.0;
    double c = kSvmC;
};

inline double svm_score(const SvmModel& m, const std::vector<double>& x) {
    if (x.size() != m.weight.size())
        throw UsageError("svm_score: feature length does not match the model");
    double s = m.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += m.weight[j] * x[j];
    return s;
}

/// L2-regularized hinge-loss SVM trained by dual coordinate descent
/// (Hsieh et al. 2008), cyclic order, so training is deterministic. The
/// bias rides along as an extra always-one feature inside the regularizer,
/// which keeps every coordinate update closed-form.
inline SvmModel svm_train(const Matrix& X, const std::vector<double>& y,
                          double c = kSvmC) {
    const std::size_t n = X.rows, d = X.cols;
    if (n < 2 || d == 0) throw UsageError("svm_train: need at least 2 samples");
    if (y.size() != n) throw UsageError("svm_train: label count mismatch");
    if (!(c > 0.0)) throw UsageError("svm_train: C must be positive");
    bool pos = false, neg = false;
    for (double v : y) {
        if (v > 0.0) pos = true;
        else neg = true;
    }
    if (!pos || !neg) throw DataError("svm_train: labels are all one class");

    // diag(Q) with the augmented bias feature; always >= 1
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0;
        const double* xi = X.row(i);
        for (std::size_t j = 0; j < d; ++j) s += xi[j] * xi[j];
        qd[i] = s;
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    constexpr int kEpochs = 200;
    for (int epoch = 0; epoch < kEpochs; ++epoch) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = X.row(i);
            double f = b;
            for (std::size_t j = 0; j < d; ++j) f += w[j] * xi[j];
            const double grad = y[i] * f - 1.0;
            double pg = grad;
            if (alpha[i] <= 0.0) pg = std::min(grad, 0.0);
            else if (alpha[i] >= c) pg = std::max(grad, 0.0);
            worst = std::max(worst, std::abs(pg));
            if (pg == 0.0) continue;
            const double next = std::clamp(alpha[i] - grad / qd[i], 0.0, c);
            const double step = (next - alpha[i]) * y[i];
            if (step == 0.0) continue;
            alpha[i] = next;
            for (std::size_t j = 0; j < d; ++j) w[j] += step * xi[j];
            b += step;
        }
        if (worst < 1e-12) break;
    }

    SvmModel model;
    model.weight = std::move(w);
    model.bias = b;
    model.c = c;
    return model;
}

} // namespace wristmatch

#endif
