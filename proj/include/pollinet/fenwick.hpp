#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace pollinet {

/// Fenwick tree over nonnegative weights with O(log n) point update and
/// inverse-CDF descent. Backs the within-class event selection of the
/// stochastic simulator.
class FenwickTree {
  public:
    FenwickTree() = default;
    explicit FenwickTree(std::size_t n) { assign(n); }

    std::size_t size() const { return values_.size(); }

    void assign(std::size_t n) {
        tree_.assign(n + 1, 0.0);
        values_.assign(n, 0.0);
        total_ = 0.0;
        highest_pow2_ = 1;
        while ((highest_pow2_ << 1) < tree_.size()) highest_pow2_ <<= 1;
    }

    double value(std::size_t i) const { return values_[i]; }
    double total() const { return total_; }

    /// Set leaf i to v (v >= 0).
    void set(std::size_t i, double v) {
        const double delta = v - values_[i];
        if (delta == 0.0) return;
        values_[i] = v;
        total_ += delta;
        for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
    }

    /// Leaf selected by mass r in [0, total). Assumes total() > 0; clamps
    /// against floating-point overshoot.
    std::size_t select(double r) const {
        std::size_t pos = 0;
        for (std::size_t step = highest_pow2_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= r) {
                r -= tree_[next];
                pos = next;
            }
        }
        return pos < values_.size() ? pos : values_.size() - 1;
    }

    /// select(), then step to a strictly positive leaf if floating-point
    /// overshoot landed on a zero one.
    std::size_t select_positive(double r) const {
        std::size_t pos = select(r);
        if (values_[pos] > 0.0) return pos;
        for (std::size_t d = 1; d < values_.size(); ++d) {
            if (pos >= d && values_[pos - d] > 0.0) return pos - d;
            if (pos + d < values_.size() && values_[pos + d] > 0.0) return pos + d;
        }
        return pos;
    }

  private:
    std::vector<double> tree_;    // 1-based internal nodes
    std::vector<double> values_;  // raw leaves
    double total_ = 0.0;
    std::size_t highest_pow2_ = 1;
};

}  // namespace pollinet
