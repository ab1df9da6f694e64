#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "randers/errors.hpp"
#include "randers/linalg.hpp"

namespace randers {

enum class Variance { Upper, Lower };

/// Dense 3^rank array of components with per-slot variance.  Values are
/// stored row-major: the last slot varies fastest.
///
/// A grid may declare pairwise slot symmetries; they are checked on
/// construction to a relative tolerance of 1e-10 of the largest component.
class TensorGrid {
 public:
  static constexpr int kDim = 3;
  static constexpr double kSymmetryTolerance = 1e-10;

  TensorGrid(std::vector<Variance> variance, std::vector<double> values,
             std::vector<std::pair<int, int>> symmetric_slots = {})
      : variance_(std::move(variance)), values_(std::move(values)), symmetric_(std::move(symmetric_slots)) {
    std::size_t n = 1;
    for (std::size_t r = 0; r < variance_.size(); ++r) n *= kDim;
    if (values_.size() != n) throw IndexError("TensorGrid: value count does not match rank");
    for (auto [a, b] : symmetric_) {
      if (a < 0 || b < 0 || a >= rank() || b >= rank() || a == b) {
        throw IndexError("TensorGrid: bad symmetry slots");
      }
      const double defect = symmetry_defect(a, b);
      if (defect > kSymmetryTolerance * std::max(1e-300, max_abs())) {
        throw DomainError("TensorGrid: declared symmetry in slots " + std::to_string(a) + "," +
                          std::to_string(b) + " violated (defect " + std::to_string(defect) + ")");
      }
    }
  }

  static TensorGrid from_matrix(Variance first, Variance second, const Mat3& m,
                                std::vector<std::pair<int, int>> symmetric_slots = {}) {
    std::vector<double> v;
    v.reserve(9);
    for (const auto& row : m) v.insert(v.end(), row.begin(), row.end());
    return TensorGrid({first, second}, std::move(v), std::move(symmetric_slots));
  }

  int rank() const { return static_cast<int>(variance_.size()); }
  Variance variance(int slot) const { return variance_.at(slot); }
  const std::vector<Variance>& variances() const { return variance_; }
  const std::vector<std::pair<int, int>>& symmetries() const { return symmetric_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(std::initializer_list<int> idx) const { return values_[flat(idx)]; }

  Mat3 matrix() const {
    if (rank() != 2) throw IndexError("TensorGrid::matrix on a grid of rank != 2");
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = values_[i * 3 + j];
    return m;
  }

  double max_abs() const {
    double m = 0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  /// max |T(..a..b..) - T(..b..a..)| over all components.
  double symmetry_defect(int a, int b) const {
    double defect = 0;
    std::vector<int> idx(rank());
    for (std::size_t f = 0; f < values_.size(); ++f) {
      unflatten(f, idx);
      std::swap(idx[a], idx[b]);
      defect = std::max(defect, std::abs(values_[f] - values_[flat(idx)]));
    }
    return defect;
  }

 private:
  template <class Range>
  std::size_t flat(const Range& idx) const {
    if (static_cast<int>(std::size(idx)) != rank()) throw IndexError("TensorGrid: wrong index count");
    std::size_t f = 0;
    for (int i : idx) {
      if (i < 0 || i >= kDim) throw IndexError("TensorGrid: index out of range");
      f = f * kDim + i;
    }
    return f;
  }

  void unflatten(std::size_t f, std::vector<int>& idx) const {
    for (int r = rank() - 1; r >= 0; --r) {
      idx[r] = static_cast<int>(f % kDim);
      f /= kDim;
    }
  }

  std::vector<Variance> variance_;
  std::vector<double> values_;
  std::vector<std::pair<int, int>> symmetric_;
};

}  // namespace randers
