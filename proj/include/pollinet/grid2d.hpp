#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pollinet {

/// Values tabulated on a uniform grid over [0,1]^2, evaluated by bilinear
/// interpolation. Used for tabulated graphons, harvest intensities and
/// competition kernels; interpolation keeps them continuous.
class Grid2d {
  public:
    Grid2d() = default;

    /// `values` is row-major with `rows` x `cols` entries; node (i, j) sits at
    /// (i/(rows-1), j/(cols-1)). Needs at least 2 nodes per axis.
    Grid2d(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (rows_ < 2 || cols_ < 2) throw std::invalid_argument("Grid2d: need at least a 2x2 grid");
        if (values_.size() != rows_ * cols_) throw std::invalid_argument("Grid2d: values size mismatch");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    /// Bilinear interpolation at (x, y) in [0,1]^2 (clamped).
    double operator()(double x, double y) const {
        x = std::clamp(x, 0.0, 1.0);
        y = std::clamp(y, 0.0, 1.0);
        const double fx = x * static_cast<double>(rows_ - 1);
        const double fy = y * static_cast<double>(cols_ - 1);
        std::size_t i = std::min(static_cast<std::size_t>(fx), rows_ - 2);
        std::size_t j = std::min(static_cast<std::size_t>(fy), cols_ - 2);
        const double tx = fx - static_cast<double>(i);
        const double ty = fy - static_cast<double>(j);
        const double v00 = at(i, j), v01 = at(i, j + 1), v10 = at(i + 1, j), v11 = at(i + 1, j + 1);
        return (1 - tx) * ((1 - ty) * v00 + ty * v01) + tx * ((1 - ty) * v10 + ty * v11);
    }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> values_;
};

}  // namespace pollinet
