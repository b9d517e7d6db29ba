#pragma once

#include <cstddef>
#include <vector>

namespace pollinet {

/// Dense row-major matrix of doubles. Communities stay small enough (a few
/// thousand species) that dense storage is fine.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

}  // namespace pollinet
