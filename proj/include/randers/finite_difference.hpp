#pragma once

// Central finite-difference estimates of mixed partial derivatives.  This is
// the independent oracle the jet engine is tested against; nothing in the
// main pipeline calls it.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "randers/errors.hpp"
#include "randers/jet.hpp"

namespace randers {

namespace detail {

// O(h^2) central stencils for d^n/dx^n, n = 0..4, on offsets -2..2.
inline constexpr std::array<std::array<double, 5>, 5> kCentralStencils = {{
    {0.0, 0.0, 1.0, 0.0, 0.0},
    {0.0, -0.5, 0.0, 0.5, 0.0},
    {0.0, 1.0, -2.0, 1.0, 0.0},
    {-0.5, 1.0, 0.0, -1.0, 0.5},
    {1.0, -4.0, 6.0, -4.0, 1.0},
}};

}  // namespace detail

inline constexpr int kMaxFiniteDifferenceOrder = 4;

/// Default oracle step: 1e-3 * max(1, |x_k|) per variable.
template <class Real>
std::vector<Real> default_fd_steps(std::span<const Real> at) {
  std::vector<Real> h(at.size());
  for (std::size_t k = 0; k < at.size(); ++k) {
    h[k] = Real(1e-3) * std::max(Real(1), Real(std::abs(at[k])));
  }
  return h;
}

/// Central-difference estimate of the m-th mixed partial of f at `at`,
/// with per-variable steps.  Error is O(h^2).  Real may be double or
/// long double; f must accept std::span<const Real>.
template <class Real, class Field>
Real fd_partial(Field&& f, std::span<const Real> at, const MultiIndex& m, std::span<const Real> h) {
  const int n = static_cast<int>(at.size());
  if (m.degree() > kMaxFiniteDifferenceOrder) {
    throw InsufficientOrderError("finite-difference stencils are provided through total order 4");
  }
  if (m.dims() > n || h.size() != at.size()) throw IndexError("fd_partial: dimension mismatch");
  for (int k = 0; k < n; ++k) {
    if (!(h[k] > 0)) throw DomainError("fd_partial: step must be positive");
  }

  std::vector<int> active;
  for (int k = 0; k < n; ++k) {
    if (m[k] > 0) active.push_back(k);
  }
  std::vector<Real> point(at.begin(), at.end());
  if (active.empty()) return f(std::span<const Real>(point));

  // Tensor product of 1D stencils over the active variables.
  Real sum = 0;
  std::vector<int> offset(active.size(), -2);
  while (true) {
    Real weight = 1;
    for (std::size_t a = 0; a < active.size(); ++a) {
      weight *= Real(detail::kCentralStencils[m[active[a]]][offset[a] + 2]);
    }
    if (weight != 0) {
      for (std::size_t a = 0; a < active.size(); ++a) {
        const int k = active[a];
        point[k] = at[k] + offset[a] * h[k];
      }
      sum += weight * f(std::span<const Real>(point));
    }
    std::size_t a = 0;
    while (a < active.size() && ++offset[a] > 2) offset[a++] = -2;
    if (a == active.size()) break;
  }
  Real scale = 1;
  for (int k : active) {
    for (int p = 0; p < m[k]; ++p) scale *= h[k];
  }
  return sum / scale;
}

/// Same with one step size for every variable.
template <class Real, class Field>
Real fd_partial(Field&& f, std::span<const Real> at, const MultiIndex& m, Real h) {
  std::vector<Real> steps(at.size(), h);
  return fd_partial<Real>(std::forward<Field>(f), at, m, std::span<const Real>(steps));
}

}  // namespace randers
