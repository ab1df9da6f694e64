#pragma once

// Independent float128 finite-difference oracles.

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

#include "randers/finite_difference.hpp"
#include "randers/quad.hpp"
#include "randers/randers_engine.hpp"

namespace testing_support {

using randers::Quad;

inline constexpr double kBerwaldFdStep = 1e-5;

/// G^i at a 6-state x = (p, y) in float128, from L = F^2/2 by
/// G_j = (L_{y^j x^k} y^k - L_{x^j}) / 2 and a cofactor inverse of g_ij.
inline Quad spray_component_quad(const randers::MetricSpec& spec, int i, std::span<const Quad> x) {
  using QJ = randers::BasicJet<Quad>;
  using randers::MultiIndex;
  constexpr int D = randers::kStateDims;
  std::array<QJ, 3> X, V;
  for (int k = 0; k < 3; ++k) {
    X[k] = QJ::variable(k, x[k], D, 2);
    V[k] = QJ::variable(3 + k, x[3 + k], D, 2);
  }
  const QJ F = randers::finsler_F<QJ>(X, V, spec);
  const QJ L = Quad(0.5) * (F * F);
  Quad g[3][3], Gc[3];
  for (int a = 0; a < 3; ++a) {
    Quad acc = -randers::extract_partial(L, MultiIndex::unit(D, a));
    for (int b = 0; b < 3; ++b) {
      MultiIndex yy = MultiIndex::unit(D, 3 + a);
      yy.add(3 + b);
      g[a][b] = randers::extract_partial(L, yy);
      MultiIndex yx = MultiIndex::unit(D, 3 + a);
      yx.add(b);
      acc += randers::extract_partial(L, yx) * x[3 + b];
    }
    Gc[a] = Quad(0.5) * acc;
  }
  const Quad det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                   g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                   g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
  Quad out = 0;
  for (int j = 0; j < 3; ++j) {
    const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
    out += (g[j1][i1] * g[j2][i2] - g[j1][i2] * g[j2][i1]) / det * Gc[j];
  }
  return out;
}

/// K^i_k from Berwald's formula with every derivative of G^i taken by
/// central differences of spray_component_quad.
inline randers::Mat3 berwald_fd(const randers::MetricSpec& spec, const randers::ChartPoint& p,
                                const randers::TangentCoords& y) {
  using randers::MultiIndex;
  const auto st = randers::detail::state_values(p, y);
  const std::vector<Quad> at(st.begin(), st.end());
  std::vector<Quad> h;
  for (double x : st) h.push_back(Quad(kBerwaldFdStep * std::max(1.0, std::abs(x))));
  auto d = [&](int i, std::initializer_list<int> slots) {
    MultiIndex m = MultiIndex::zero(randers::kStateDims);
    for (int k : slots) m.add(k);
    return randers::fd_partial<Quad>([&](std::span<const Quad> x) { return spray_component_quad(spec, i, x); },
                                     std::span<const Quad>(at), m, std::span<const Quad>(h));
  };
  Quad G0[3], Gy[3][3], Gx[3][3];
  for (int i = 0; i < 3; ++i) {
    G0[i] = spray_component_quad(spec, i, std::span<const Quad>(at));
    for (int k = 0; k < 3; ++k) {
      Gy[i][k] = d(i, {3 + k});
      Gx[i][k] = d(i, {k});
    }
  }
  randers::Mat3 K{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Quad acc = 2 * Gx[i][k];
      for (int j = 0; j < 3; ++j) {
        acc -= at[3 + j] * d(i, {j, 3 + k});
        acc -= Gy[i][j] * Gy[j][k];
        acc += 2 * G0[j] * d(i, {3 + j, 3 + k});
      }
      K[i][k] = static_cast<double>(acc);
    }
  return K;
}

}  // namespace testing_support
