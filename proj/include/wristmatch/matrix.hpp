#ifndef WRISTMATCH_MATRIX_HPP
#define WRISTMATCH_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "wristmatch/errors.hpp"

namespace wristmatch {

/// Dense row-major matrix of doubles; the exchange type between feature
/// extraction and the classifiers.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

} // namespace wristmatch

#endif
