#pragma once

// Truncated multivariate Taylor jets.
//
// A Jet of `dims` variables and order N stores the Taylor coefficients
// c_m = (d^m f)(x0) / m! of a scalar function for every multi-index m with
// |m| <= N.  Coefficients live in a dense array whose enumeration is fixed:
//
//   * graded: all monomials of degree d precede those of degree d + 1;
//   * within one degree, exponent vectors are ordered lexicographically
//     descending, e.g. for dims = 2, degree 2: (2,0), (1,1), (0,2).
//
// Because the enumeration is graded, the layout of order N - 1 is a prefix of
// the layout of order N.  Truncation is therefore a resize, and derivative
// jets (which lose one order) share indices with their parent.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "randers/errors.hpp"

namespace randers {

inline constexpr int kMaxJetDims = 6;
inline constexpr int kMaxJetOrder = 12;

class MultiIndex {
 public:
  MultiIndex() = default;

  MultiIndex(std::initializer_list<int> exponents) {
    if (exponents.size() > static_cast<std::size_t>(kMaxJetDims)) {
      throw IndexError("MultiIndex: too many variables");
    }
    for (int e : exponents) {
      if (e < 0) throw IndexError("MultiIndex: negative exponent");
      exps_[dims_++] = e;
    }
  }

  /// Zero multi-index over `dims` variables.
  static MultiIndex zero(int dims) {
    MultiIndex m;
    if (dims < 0 || dims > kMaxJetDims) throw IndexError("MultiIndex: bad dims");
    m.dims_ = dims;
    return m;
  }

  /// power * e_k over `dims` variables.
  static MultiIndex unit(int dims, int k, int power = 1) {
    MultiIndex m = zero(dims);
    if (k < 0 || k >= dims) throw IndexError("MultiIndex: slot out of range");
    m.exps_[k] = power;
    return m;
  }

  int dims() const { return dims_; }
  int operator[](int k) const { return k < dims_ ? exps_[k] : 0; }

  int degree() const {
    int d = 0;
    for (int k = 0; k < dims_; ++k) d += exps_[k];
    return d;
  }

  /// Product of factorials m_1! m_2! ... m_n!.
  double factorial_product() const {
    double f = 1.0;
    for (int k = 0; k < dims_; ++k) {
      for (int j = 2; j <= exps_[k]; ++j) f *= j;
    }
    return f;
  }

  MultiIndex& add(int k, int amount = 1) {
    if (k < 0 || k >= kMaxJetDims) throw IndexError("MultiIndex: slot out of range");
    if (k >= dims_) dims_ = k + 1;
    exps_[k] += amount;
    if (exps_[k] < 0) throw IndexError("MultiIndex: negative exponent");
    return *this;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    const int n = std::max(a.dims_, b.dims_);
    for (int k = 0; k < n; ++k) {
      if (a[k] != b[k]) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int k = 0; k < dims_; ++k) {
      if (k) s += ",";
      s += std::to_string(exps_[k]);
    }
    return s + ")";
  }

 private:
  std::array<int, kMaxJetDims> exps_{};
  int dims_ = 0;
};

/// Enumeration tables for one (dims, order) pair.  Instances are created once
/// per pair, cached for the lifetime of the process and never mutated.
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs, rhs, out;
  };

  static const JetLayout& get(int dims, int order) {
    if (dims < 1 || dims > kMaxJetDims) throw IndexError("JetLayout: dims must be in [1, 6]");
    if (order < 0 || order > kMaxJetOrder) throw IndexError("JetLayout: order out of range");
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dims, order}];
    if (!slot) slot.reset(new JetLayout(dims, order));
    return *slot;
  }

  int dims() const { return dims_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size(); }

  /// Number of monomials of total degree <= d (prefix length).
  std::size_t size_through(int d) const {
    if (d < 0) return 0;
    return by_degree_[std::min(d, order_) + 1];
  }

  const MultiIndex& exponent(std::size_t i) const { return exps_.at(i); }

  std::size_t index_of(const MultiIndex& m) const {
    if (m.dims() > dims_) throw IndexError("multi-index has more variables than the jet");
    if (m.degree() > order_) {
      throw InsufficientOrderError("multi-index " + m.to_string() + " exceeds jet order " +
                                   std::to_string(order_));
    }
    auto it = lookup_.find(encode(m));
    return it->second;
  }

  std::span<const Product> products() const { return products_; }

  /// Index of exponent(i) + e_k; defined for i < size_through(order - 1).
  std::uint32_t shifted(std::size_t i, int k) const { return shifted_[i * dims_ + k]; }

 private:
  JetLayout(int dims, int order) : dims_(dims), order_(order) {
    by_degree_.push_back(0);
    for (int d = 0; d <= order; ++d) {
      MultiIndex m = MultiIndex::zero(dims);
      enumerate(m, 0, d);
      by_degree_.push_back(exps_.size());
    }
    for (std::size_t i = 0; i < exps_.size(); ++i) lookup_[encode(exps_[i])] = i;

    for (std::size_t i = 0; i < exps_.size(); ++i) {
      const int di = exps_[i].degree();
      for (std::size_t j = 0; j < size_through(order - di); ++j) {
        MultiIndex sum = exps_[i];
        for (int k = 0; k < dims; ++k) sum.add(k, exps_[j][k]);
        products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             static_cast<std::uint32_t>(lookup_.at(encode(sum)))});
      }
    }

    const std::size_t n_lower = size_through(order - 1);
    shifted_.resize(n_lower * dims);
    for (std::size_t i = 0; i < n_lower; ++i) {
      for (int k = 0; k < dims; ++k) {
        MultiIndex up = exps_[i];
        up.add(k);
        shifted_[i * dims + k] = static_cast<std::uint32_t>(lookup_.at(encode(up)));
      }
    }
  }

  // Exponent vectors of degree `remaining` in slots >= k, largest first.
  void enumerate(MultiIndex& m, int k, int remaining) {
    if (k == dims_ - 1) {
      MultiIndex leaf = m;
      leaf.add(k, remaining);
      exps_.push_back(leaf);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      MultiIndex next = m;
      next.add(k, e);
      enumerate(next, k + 1, remaining - e);
    }
  }

  std::uint64_t encode(const MultiIndex& m) const {
    std::uint64_t code = 0;
    for (int k = 0; k < dims_; ++k) code = code * (kMaxJetOrder + 1) + m[k];
    return code;
  }

  int dims_;
  int order_;
  std::vector<MultiIndex> exps_;
  std::vector<std::size_t> by_degree_;
  std::map<std::uint64_t, std::size_t> lookup_;
  std::vector<Product> products_;
  std::vector<std::uint32_t> shifted_;
};

template <class Real>
class BasicJet {
 public:
  using value_type = Real;

  /// Constant zero jet of one variable and order zero.
  BasicJet() : BasicJet(Real(0), 1, 0) {}

  BasicJet(Real value, int dims, int order)
      : layout_(&JetLayout::get(dims, order)), c_(layout_->size(), 0.0) {
    c_[0] = value;
  }

  static BasicJet constant(Real value, int dims, int order) { return BasicJet(value, dims, order); }

  /// Taylor expansion of the coordinate function x_index about `value`.
  static BasicJet variable(int index, Real value, int dims, int order) {
    if (index < 0 || index >= dims) {
      throw IndexError("jet variable slot " + std::to_string(index) + " out of range for " +
                       std::to_string(dims) + " variables");
    }
    if (order < 1) throw InsufficientOrderError("a coordinate jet needs order >= 1");
    BasicJet j(value, dims, order);
    j.c_[j.layout_->index_of(MultiIndex::unit(dims, index))] = 1.0;
    return j;
  }

  static BasicJet from_coeffs(int dims, int order, std::vector<Real> coeffs) {
    BasicJet j(0.0, dims, order);
    if (coeffs.size() != j.c_.size()) throw IndexError("BasicJet::from_coeffs: wrong coefficient count");
    j.c_ = std::move(coeffs);
    return j;
  }

  int dims() const { return layout_->dims(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }

  Real value() const { return c_[0]; }
  std::span<const Real> coeffs() const { return c_; }

  /// Taylor coefficient (not the derivative) at multi-index m.
  Real coeff(const MultiIndex& m) const { return c_[layout_->index_of(m)]; }

  BasicJet truncated(int order) const {
    if (order > this->order()) {
      throw InsufficientOrderError("cannot truncate a jet of order " + std::to_string(this->order()) +
                                   " to order " + std::to_string(order));
    }
    BasicJet j(0.0, dims(), order);
    std::copy_n(c_.begin(), j.c_.size(), j.c_.begin());
    return j;
  }

  BasicJet operator-() const {
    BasicJet r = *this;
    for (Real& x : r.c_) x = -x;
    return r;
  }

  BasicJet& operator+=(const BasicJet& b) {
    check_compatible(b);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
    return *this;
  }
  BasicJet& operator-=(const BasicJet& b) {
    check_compatible(b);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
    return *this;
  }
  BasicJet& operator+=(Real s) {
    c_[0] += s;
    return *this;
  }
  BasicJet& operator-=(Real s) {
    c_[0] -= s;
    return *this;
  }
  BasicJet& operator*=(Real s) {
    for (Real& x : c_) x *= s;
    return *this;
  }
  BasicJet& operator/=(Real s) {
    if (s == 0) throw SingularValueError("jet divided by zero scalar");
    for (Real& x : c_) x /= s;
    return *this;
  }
  BasicJet& operator*=(const BasicJet& b) {
    *this = *this * b;
    return *this;
  }
  BasicJet& operator/=(const BasicJet& b) {
    *this = *this / b;
    return *this;
  }

  friend BasicJet operator+(BasicJet a, const BasicJet& b) { return a += b; }
  friend BasicJet operator-(BasicJet a, const BasicJet& b) { return a -= b; }
  friend BasicJet operator+(BasicJet a, Real s) { return a += s; }
  friend BasicJet operator+(Real s, BasicJet a) { return a += s; }
  friend BasicJet operator-(BasicJet a, Real s) { return a -= s; }
  friend BasicJet operator-(Real s, const BasicJet& a) { return (-a) += s; }
  friend BasicJet operator*(BasicJet a, Real s) { return a *= s; }
  friend BasicJet operator*(Real s, BasicJet a) { return a *= s; }
  friend BasicJet operator/(BasicJet a, Real s) { return a /= s; }

  friend BasicJet operator*(const BasicJet& a, const BasicJet& b) {
    a.check_compatible(b);
    BasicJet r(*a.layout_);
    const Real* pa = a.c_.data();
    const Real* pb = b.c_.data();
    Real* pr = r.c_.data();
    for (const auto& p : a.layout_->products()) pr[p.out] += pa[p.lhs] * pb[p.rhs];
    return r;
  }

  friend BasicJet operator/(const BasicJet& a, const BasicJet& b) { return a * reciprocal(b); }
  friend BasicJet operator/(Real s, const BasicJet& b) { return reciprocal(b) *= s; }

  /// 1 / a, from the geometric series in the non-constant part.
  friend BasicJet reciprocal(const BasicJet& a) {
    const Real a0 = a.value();
    using std::isfinite;
    if (a0 == 0 || !isfinite(a0)) {
      throw SingularValueError("division by a jet with zero constant term");
    }
    // 1/(a0 (1 + t)) = (1/a0) sum_n (-t)^n
    const int n = a.order();
    std::vector<Real> series(n + 1);
    const Real inv = Real(1) / a0;
    Real term = inv;
    for (int k = 0; k <= n; ++k) {
      series[k] = k % 2 ? Real(-term) : term;
      term *= inv;
    }
    return a.compose(series);
  }

  /// sqrt(a), binomial series about the constant term.
  friend BasicJet sqrt(const BasicJet& a) {
    const Real a0 = a.value();
    using std::sqrt;
    if (!(a0 > 0)) throw DomainError("sqrt of a jet with non-positive constant term");
    // sqrt(a0 + t) = sum_k binom(1/2, k) a0^(1/2 - k) t^k
    const int n = a.order();
    std::vector<Real> series(n + 1);
    Real binom = 1;
    Real term = sqrt(a0);
    const Real inv = Real(1) / a0;
    for (int k = 0; k <= n; ++k) {
      series[k] = binom * term;
      term *= inv;
      binom *= (Real(1) / 2 - k) / (k + 1);
    }
    return a.compose(series);
  }

 private:
  explicit BasicJet(const JetLayout& layout) : layout_(&layout), c_(layout.size(), 0.0) {}

  // f(a) for f with Taylor coefficients `series` about a.value().
  BasicJet compose(const std::vector<Real>& series) const {
    BasicJet t = *this;
    t.c_[0] = 0.0;
    BasicJet r(*layout_);
    r.c_[0] = series.back();
    for (int k = static_cast<int>(series.size()) - 2; k >= 0; --k) {
      r = r * t;
      r.c_[0] += series[k];
    }
    return r;
  }

  void check_compatible(const BasicJet& b) const {
    if (layout_ != b.layout_) {
      throw IndexError("jet arithmetic on mismatched layouts (dims " + std::to_string(dims()) + "/" +
                       std::to_string(b.dims()) + ", order " + std::to_string(order()) + "/" +
                       std::to_string(b.order()) + ")");
    }
  }

  /// Partial derivative d/dx_k of the jet's Taylor polynomial; order drops by one.
  friend BasicJet derivative(const BasicJet& a, int k) {
    if (k < 0 || k >= a.dims()) throw IndexError("derivative slot out of range");
    if (a.order() < 1) throw InsufficientOrderError("cannot differentiate an order-0 jet");
    BasicJet r(JetLayout::get(a.dims(), a.order() - 1));
    const JetLayout& src = a.layout();
    for (std::size_t i = 0; i < r.c_.size(); ++i) {
      const int e = src.exponent(i)[k];
      r.c_[i] = (e + 1) * a.c_[src.shifted(i, k)];
    }
    return r;
  }

  const JetLayout* layout_;
  std::vector<Real> c_;
};

/// Successive partial derivatives in the listed slots.
template <class Real>
BasicJet<Real> derivative(const BasicJet<Real>& a, std::initializer_list<int> slots) {
  BasicJet<Real> r = a;
  for (int k : slots) r = derivative(r, k);
  return r;
}

using Jet = BasicJet<double>;

inline Jet jet_variable(int index, double value, int dims, int order) {
  return Jet::variable(index, value, dims, order);
}

/// Mixed partial derivative d^m f at the base point: coeff[m] * m!.
template <class Real>
Real extract_partial(const BasicJet<Real>& a, const MultiIndex& m) {
  return a.coeff(m) * Real(m.factorial_product());
}

}  // namespace randers
