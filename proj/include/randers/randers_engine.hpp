#pragma once

// Coordinate-level Finsler pipeline on jets in the six state variables
// (x, y, z, u, v, w):
//
//   L = F^2 / 2
//   G_i = (L_{y^i x^j} y^j - L_{x^i}) / 2,   G^i = g^ij G_j,  g_ij = L_{y^i y^j}
//   K^i_k = 2 (G^i)_{x^k} - y^j (G^i)_{x^j y^k} - (G^i)_{y^j} (G^j)_{y^k}
//           + 2 G^j (G^i)_{y^j y^k}
//
// Every derivative drops one jet order.  Minimum orders per operation:
// g 2, G 2, K^i_k 4, W^i_k 5, D^i_jkl 6.  The dimension is fixed at n = 3.

#include <array>
#include <cmath>
#include <string>

#include "randers/errors.hpp"
#include "randers/jet.hpp"
#include "randers/linalg.hpp"
#include "randers/s3_model.hpp"
#include "randers/tensor_grid.hpp"

namespace randers {

inline constexpr int kStateDims = 6;
inline constexpr int kDefaultJetOrder = 6;

inline constexpr int kMinOrderMetric = 2;
inline constexpr int kMinOrderSpray = 2;
inline constexpr int kMinOrderBerwald = 4;
inline constexpr int kMinOrderWeyl = 5;
inline constexpr int kMinOrderDouglas = 6;

template <class Real>
using JetVec3T = std::array<BasicJet<Real>, 3>;
template <class Real>
using JetMat3T = std::array<JetVec3T<Real>, 3>;
template <class Real>
using RealMat3T = std::array<std::array<Real, 3>, 3>;

using JetVec3 = JetVec3T<double>;
using JetMat3 = JetMat3T<double>;

namespace detail {

inline void require_order(int have, int need, const char* what) {
  if (have < need) {
    throw InsufficientOrderError(std::string(what) + " needs jet order >= " + std::to_string(need) + ", got " +
                                 std::to_string(have));
  }
}

inline void require_nonzero(const TangentCoords& y) {
  if (y.is_zero()) throw DomainError("the zero tangent vector is excluded (TM minus the zero section)");
}

/// Coordinate jet of state slot k; a plain constant at order 0.
template <class Real>
BasicJet<Real> state_coordinate(int k, double value, int order) {
  using J = BasicJet<Real>;
  return order == 0 ? J::constant(Real(value), kStateDims, 0) : J::variable(k, Real(value), kStateDims, order);
}

inline std::array<double, 6> state_values(const ChartPoint& p, const TangentCoords& y) {
  return {p.x, p.y, p.z, y.u, y.v, y.w};
}

template <class Real>
std::array<JetVec3T<Real>, 2> state_jets(const ChartPoint& p, const TangentCoords& y, int order) {
  const auto s = state_values(p, y);
  std::array<JetVec3T<Real>, 2> out;
  for (int i = 0; i < 3; ++i) {
    out[0][i] = state_coordinate<Real>(i, s[i], order);
    out[1][i] = state_coordinate<Real>(3 + i, s[3 + i], order);
  }
  return out;
}

template <class Real>
JetMat3T<Real> inverse(const JetMat3T<Real>& a) {
  JetMat3T<Real> cof;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      cof[i][j] = a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1];
    }
  const BasicJet<Real> det = a[0][0] * cof[0][0] + a[0][1] * cof[0][1] + a[0][2] * cof[0][2];
  const BasicJet<Real> inv_det = reciprocal(det);
  JetMat3T<Real> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = cof[j][i] * inv_det;
  return out;
}

}  // namespace detail

/// Jets of the Finsler function and its Lagrangian about (p, y).
template <class Real = double>
struct FinslerField {
  MetricSpec spec;

  BasicJet<Real> F(const ChartPoint& p, const TangentCoords& y, int order) const {
    detail::require_nonzero(y);
    const auto [x, v] = detail::state_jets<Real>(p, y, order);
    return finsler_F<BasicJet<Real>>(x, v, spec);
  }

  BasicJet<Real> L(const ChartPoint& p, const TangentCoords& y, int order) const {
    const BasicJet<Real> f = F(p, y, order);
    return Real(0.5) * (f * f);
  }
};

FinslerField(MetricSpec) -> FinslerField<double>;

/// How g^ij enters G^i = g^ij G_j.  The closed form avoids inverting the
/// coordinate metric, which is ill-conditioned far from the chart origin.
enum class InverseRoute { ClosedForm, Numeric };

namespace detail {

/// g^ij = rho a^ij + rho^2 phi lt^i lt^j - rho^2 (lt^i b^j + lt^j b^i) as jets,
/// rho = alpha/F, phi = (beta + alpha ||b||^2)/F, lt^i = y^i/alpha.
template <class Real>
JetMat3T<Real> closed_form_inverse_jets(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                                        int order) {
  using J = BasicJet<Real>;
  const auto [X, V] = state_jets<Real>(p, y, order);
  const auto parts = randers_parts<J>(X, V, spec);
  const JetMat3T<Real> ainv = riemannian_metric_inv<J>(X, spec);
  const JetVec3T<Real> b = drift_form<J>(X, spec);
  const Real nb2 = Real(spec.K - 1.0) / Real(spec.K) * Real(spec.drift_scale) * Real(spec.drift_scale);
  const J inv_F = reciprocal(parts.alpha + parts.beta);
  const J rho = parts.alpha * inv_F;
  const J rho2 = rho * rho;
  const J rho2phi = rho2 * ((parts.beta + nb2 * parts.alpha) * inv_F);
  const J inv_alpha = reciprocal(parts.alpha);
  JetVec3T<Real> lt, bup;
  for (int i = 0; i < 3; ++i) {
    lt[i] = V[i] * inv_alpha;
    bup[i] = ainv[i][0] * b[0] + ainv[i][1] * b[1] + ainv[i][2] * b[2];
  }
  JetMat3T<Real> g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      g[i][j] = rho * ainv[i][j] + rho2phi * (lt[i] * lt[j]) - rho2 * (lt[i] * bup[j] + lt[j] * bup[i]);
      if (j != i) g[j][i] = g[i][j];
    }
  return g;
}

}  // namespace detail

/// Spray coefficients G^i as jets of order (order - 2) about (p, y).
template <class Real = double>
struct SprayDataT {
  MetricSpec spec;
  ChartPoint p;
  TangentCoords y;
  int order = 0;  // jet order of G
  JetVec3T<Real> G;

  Vec3 values() const {
    return {static_cast<double>(G[0].value()), static_cast<double>(G[1].value()),
            static_cast<double>(G[2].value())};
  }
};

using SprayData = SprayDataT<double>;

template <class Real = double>
SprayDataT<Real> spray_coeffs(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y, int order,
                              InverseRoute route = InverseRoute::ClosedForm) {
  using J = BasicJet<Real>;
  detail::require_order(order, kMinOrderSpray, "spray_coeffs");
  detail::require_nonzero(y);
  const int m = order - 2;
  const J L = FinslerField<Real>{spec}.L(p, y, order);

  JetVec3T<Real> Ly;
  for (int i = 0; i < 3; ++i) Ly[i] = derivative(L, 3 + i);
  JetMat3T<Real> g;
  JetVec3T<Real> Gcov;
  for (int i = 0; i < 3; ++i) {
    J acc = -derivative(L, i).truncated(m);
    for (int j = 0; j < 3; ++j) {
      acc += derivative(Ly[i], j) * detail::state_coordinate<Real>(3 + j, y.vec()[j], m);
      if (route == InverseRoute::Numeric) g[i][j] = derivative(Ly[i], 3 + j);
    }
    Gcov[i] = Real(0.5) * acc;
  }
  const JetMat3T<Real> ginv = route == InverseRoute::Numeric
                                  ? detail::inverse<Real>(g)
                                  : detail::closed_form_inverse_jets<Real>(spec, p, y, m);
  SprayDataT<Real> out{spec, p, y, m, {}};
  for (int i = 0; i < 3; ++i) {
    J acc = ginv[i][0] * Gcov[0];
    acc += ginv[i][1] * Gcov[1];
    acc += ginv[i][2] * Gcov[2];
    out.G[i] = std::move(acc);
  }
  return out;
}

/// Spray coefficient values only (order-2 jets), as used by the geodesic ODE.
inline Vec3 spray_values(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y) {
  return spray_coeffs(spec, p, y, kMinOrderSpray).values();
}

/// g_ij = (F^2/2)_{y^i y^j}.
inline TensorGrid fundamental_tensor(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y) {
  const Jet L = FinslerField{spec}.L(p, y, kMinOrderMetric);
  Mat3 g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      MultiIndex m = MultiIndex::zero(kStateDims);
      m.add(3 + i).add(3 + j);
      g[i][j] = extract_partial(L, m);
    }
  return TensorGrid::from_matrix(Variance::Lower, Variance::Lower, g, {{0, 1}});
}

/// g_ij = (F/alpha)(a_ij - lt_i lt_j) + l_i l_j, lt_i = a_ij y^j / alpha, l_i = lt_i + b_i.
inline Mat3 fundamental_tensor_closed(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y) {
  detail::require_nonzero(y);
  const Mat3 a = riemannian_metric(p, spec);
  const Vec3 b = drift_form(p, spec);
  const Vec3 yv = y.vec();
  const Vec3 ay = matvec(a, yv);
  const double alpha = std::sqrt(dot(yv, ay));
  const double F = alpha + dot(b, yv);
  Vec3 lt{}, l{};
  for (int i = 0; i < 3; ++i) {
    lt[i] = ay[i] / alpha;
    l[i] = lt[i] + b[i];
  }
  Mat3 g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = F / alpha * (a[i][j] - lt[i] * lt[j]) + l[i] * l[j];
  return g;
}

/// Closed-form inverse
///   g^ij = (alpha/F) a^ij + (alpha/F)^2 ((beta + alpha ||b||^2)/F) lt^i lt^j
///          - (alpha/F)^2 (lt^i b^j + lt^j b^i),  lt^i = y^i / alpha.
inline TensorGrid fundamental_inverse(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y) {
  detail::require_nonzero(y);
  const JetMat3 g = detail::closed_form_inverse_jets<double>(spec, p, y, 0);
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = g[i][j].value();
  return TensorGrid::from_matrix(Variance::Upper, Variance::Upper, out, {{0, 1}});
}

/// Berwald's formula as jets of order (order - 4); entry [i][k] is K^i_k.
template <class Real>
JetMat3T<Real> berwald_jets(const SprayDataT<Real>& s) {
  using J = BasicJet<Real>;
  detail::require_order(s.order, 2, "Berwald's formula (spray jet order)");
  const int m = s.order - 2;
  JetMat3T<Real> Gx, Gy;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Gx[i][k] = derivative(s.G[i], k);
      Gy[i][k] = derivative(s.G[i], 3 + k);
    }
  JetVec3T<Real> Y, Gm;
  for (int j = 0; j < 3; ++j) {
    Y[j] = detail::state_coordinate<Real>(3 + j, s.y.vec()[j], m);
    Gm[j] = s.G[j].truncated(m);
  }
  JetMat3T<Real> K;
  for (int i = 0; i < 3; ++i) {
    // Gyy[j][k] = (G^i)_{y^j y^k}
    JetMat3T<Real> Gyy;
    for (int j = 0; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        Gyy[j][k] = derivative(Gy[i][j], 3 + k);
        if (k != j) Gyy[k][j] = Gyy[j][k];
      }
    for (int k = 0; k < 3; ++k) {
      J acc = Real(2) * Gx[i][k].truncated(m);
      for (int j = 0; j < 3; ++j) {
        acc -= Y[j] * derivative(Gy[i][k], j);
        acc -= Gy[i][j].truncated(m) * Gy[j][k].truncated(m);
        acc += Real(2) * (Gm[j] * Gyy[j][k]);
      }
      K[i][k] = std::move(acc);
    }
  }
  return K;
}

template <class Real>
RealMat3T<Real> jet_values(const JetMat3T<Real>& m) {
  RealMat3T<Real> out{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out[i][k] = m[i][k].value();
  return out;
}

template <class Real>
Mat3 to_double(const RealMat3T<Real>& m) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out[i][k] = static_cast<double>(m[i][k]);
  return out;
}

/// K^i_k (upper, lower).
inline TensorGrid berwald_spray_curvature(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                                          int order = kMinOrderBerwald) {
  detail::require_order(order, kMinOrderBerwald, "berwald_spray_curvature");
  const SprayData s = spray_coeffs(spec, p, y, order);
  return TensorGrid::from_matrix(Variance::Upper, Variance::Lower, jet_values(berwald_jets(s)));
}

/// K tau^i_k = K (F^2 delta^i_k - y^i F F_{y^k}) in coordinates.
template <class Real = double>
RealMat3T<Real> tau_coordinates(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y) {
  const BasicJet<Real> F = FinslerField<Real>{spec}.F(p, y, 1);
  const Real f = F.value();
  const Vec3 yv = y.vec();
  RealMat3T<Real> t{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const Real Fk = extract_partial(F, MultiIndex::unit(kStateDims, 3 + k));
      t[i][k] = Real(spec.K) * (f * f * Real(i == k ? 1 : 0) - Real(yv[i]) * f * Fk);
    }
  return t;
}

inline constexpr double kQuotDenominatorFloor = 1e-9;

struct CurvatureResidual {
  double F = 0;
  Mat3 kay{};         // K^i_k
  Mat3 ktau{};        // K tau^i_k
  Mat3 dif{};         // raw difference
  Mat3 normalized{};  // |dif| / (K F^2 + |K^i_k|)
  Mat3 quot{};        // K^i_k / (K tau^i_k), NaN where undefined
  std::array<std::array<bool, 3>, 3> quot_defined{};
  double max_normalized = 0;
  double max_quot_deviation = 0;  // over defined entries
};

/// Residual of the constant-curvature criterion K^i_k = K tau^i_k.  Real
/// selects the working precision of the whole computation; the residuals are
/// formed before rounding to double.
template <class Real = double>
CurvatureResidual constant_curvature_residual(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                                              int order = kMinOrderBerwald) {
  using std::abs;
  detail::require_order(order, kMinOrderBerwald, "constant_curvature_residual");
  const RealMat3T<Real> kay = jet_values(berwald_jets(spray_coeffs<Real>(spec, p, y, order)));
  const RealMat3T<Real> ktau = tau_coordinates<Real>(spec, p, y);
  const BasicJet<Real> Fj = FinslerField<Real>{spec}.F(p, y, 0);
  const Real kf2 = Real(spec.K) * Fj.value() * Fj.value();
  CurvatureResidual r;
  r.F = static_cast<double>(Fj.value());
  r.kay = to_double(kay);
  r.ktau = to_double(ktau);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const Real dif = kay[i][k] - ktau[i][k];
      r.dif[i][k] = static_cast<double>(dif);
      r.normalized[i][k] = static_cast<double>(abs(dif) / (kf2 + abs(kay[i][k])));
      r.max_normalized = std::max(r.max_normalized, r.normalized[i][k]);
      r.quot_defined[i][k] = abs(ktau[i][k]) > Real(kQuotDenominatorFloor) * kf2;
      if (r.quot_defined[i][k]) {
        const Real q = kay[i][k] / ktau[i][k];
        r.quot[i][k] = static_cast<double>(q);
        r.max_quot_deviation = std::max(r.max_quot_deviation, static_cast<double>(abs(q - Real(1))));
      } else {
        r.quot[i][k] = std::nan("");
      }
    }
  return r;
}

inline constexpr double kFlagDegeneracy = 1e-12;

/// K(y, V) = V^i K_ik V^k / (g(y,y) g(V,V) - g(y,V)^2), K_ik = g_ij K^j_k.
inline double flag_curvature(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                             const TangentCoords& V, int order = kMinOrderBerwald) {
  const Mat3 g = fundamental_tensor(spec, p, y).matrix();
  const Vec3 yv = y.vec(), Vv = V.vec();
  const double gyy = quadratic_form(g, yv, yv);
  const double gVV = quadratic_form(g, Vv, Vv);
  const double gyV = quadratic_form(g, yv, Vv);
  const double denom = gyy * gVV - gyV * gyV;
  if (!(denom > kFlagDegeneracy * gyy * gVV)) {
    throw DegenerateFlagError("flag is degenerate: V is (numerically) parallel to y");
  }
  const Mat3 Kcov = matmul(g, berwald_spray_curvature(spec, p, y, order).matrix());
  return quadratic_form(Kcov, Vv, Vv) / denom;
}

/// Reduced projective Weyl tensor
///   W^i_k = K^i_k - Kf delta^i_k - y^i {(K^j_k)_{y^j} - (Kf)_{y^k}} / (n+1),
///   Kf = K^i_i / (n-1).
template <class Real = double>
TensorGrid weyl_reduced(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                        int order = kMinOrderWeyl) {
  detail::require_order(order, kMinOrderWeyl, "weyl_reduced");
  const JetMat3T<Real> K = berwald_jets(spray_coeffs<Real>(spec, p, y, order));
  const BasicJet<Real> Kf = Real(0.5) * (K[0][0] + K[1][1] + K[2][2]);
  const Vec3 yv = y.vec();
  Mat3 W{};
  for (int k = 0; k < 3; ++k) {
    Real div = -extract_partial(Kf, MultiIndex::unit(kStateDims, 3 + k));
    for (int j = 0; j < 3; ++j) div += extract_partial(K[j][k], MultiIndex::unit(kStateDims, 3 + j));
    for (int i = 0; i < 3; ++i) {
      const Real trace = i == k ? Kf.value() : Real(0);
      W[i][k] = static_cast<double>(K[i][k].value() - trace - Real(0.25) * Real(yv[i]) * div);
    }
  }
  return TensorGrid::from_matrix(Variance::Upper, Variance::Lower, W);
}

/// Douglas tensor
///   D^i_jkl = (G^i)_{y^j y^k y^l}
///             - {delta^i_j (G^h)_{y^h y^k y^l} + delta^i_k (G^h)_{y^h y^l y^j}
///                + delta^i_l (G^h)_{y^h y^j y^k}} / (n+1)
///             - y^i (G^h)_{y^h y^j y^k y^l} / (n+1).
template <class Real = double>
TensorGrid douglas(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                   int order = kMinOrderDouglas) {
  detail::require_order(order, kMinOrderDouglas, "douglas");
  const SprayDataT<Real> s = spray_coeffs<Real>(spec, p, y, order);
  auto dG = [&s](int i, std::initializer_list<int> slots) {
    MultiIndex m = MultiIndex::zero(kStateDims);
    for (int k : slots) m.add(3 + k);
    return extract_partial(s.G[i], m);
  };
  const Vec3 yv = y.vec();
  Real S[3][3] = {};     // sum_h (G^h)_{y^h y^k y^l}
  Real Q[3][3][3] = {};  // sum_h (G^h)_{y^h y^j y^k y^l}
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int h = 0; h < 3; ++h) {
        S[k][l] += dG(h, {h, k, l});
        for (int j = 0; j < 3; ++j) Q[j][k][l] += dG(h, {h, j, k, l});
      }
  std::vector<double> D(81);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          Real trace = 0;
          if (i == j) trace += S[k][l];
          if (i == k) trace += S[l][j];
          if (i == l) trace += S[j][k];
          D[((i * 3 + j) * 3 + k) * 3 + l] =
              static_cast<double>(dG(i, {j, k, l}) - Real(0.25) * trace - Real(0.25) * Real(yv[i]) * Q[j][k][l]);
        }
  return TensorGrid({Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower}, std::move(D),
                    {{1, 2}, {2, 3}, {1, 3}});
}

/// Components of any grid in the orthonormal frame: upper slots contract with
/// v^p_i, lower slots with u_r^k.
inline TensorGrid frame_components(const TensorGrid& T, const ChartPoint& p, const MetricSpec& spec) {
  const Vielbein vb = vielbein(p, spec);
  std::vector<double> cur = T.values();
  const int rank = T.rank();
  for (int slot = 0; slot < rank; ++slot) {
    std::vector<double> next(cur.size(), 0.0);
    std::size_t stride = 1;
    for (int r = slot + 1; r < rank; ++r) stride *= 3;
    for (std::size_t f = 0; f < cur.size(); ++f) {
      const int a = static_cast<int>((f / stride) % 3);
      const std::size_t base = f - a * stride;
      double s = 0;
      for (int b = 0; b < 3; ++b) {
        const double m = T.variance(slot) == Variance::Upper ? vb.v[a][b] : vb.u[b][a];
        s += m * cur[base + b * stride];
      }
      next[f] = s;
    }
    cur = std::move(next);
  }
  return TensorGrid(T.variances(), std::move(cur));
}

/// T^p_r = v^p_i T^i_k u_r^k for a mixed rank-2 grid.
inline TensorGrid frame_transform(const TensorGrid& T, const ChartPoint& p, const MetricSpec& spec) {
  if (T.rank() != 2 || T.variance(0) != Variance::Upper || T.variance(1) != Variance::Lower) {
    throw VarianceError("frame_transform expects a rank-2 grid with (upper, lower) variance");
  }
  const Vielbein vb = vielbein(p, spec);
  return TensorGrid::from_matrix(Variance::Upper, Variance::Lower, matmul(matmul(vb.v, T.matrix()), vb.u));
}

/// Inverse of frame_transform: T^i_k = u_p^i T^p_r v^r_k.
inline TensorGrid coordinate_transform(const TensorGrid& T, const ChartPoint& p, const MetricSpec& spec) {
  if (T.rank() != 2 || T.variance(0) != Variance::Upper || T.variance(1) != Variance::Lower) {
    throw VarianceError("coordinate_transform expects a rank-2 grid with (upper, lower) variance");
  }
  const Vielbein vb = vielbein(p, spec);
  return TensorGrid::from_matrix(Variance::Upper, Variance::Lower, matmul(matmul(vb.u, T.matrix()), vb.v));
}

/// max |W^p_r| / F^2 in the frame (position- and scale-free).
template <class Real = double>
double weyl_normalized(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                       int order = kMinOrderWeyl) {
  const double F = finsler_F(p, y, spec);
  return frame_components(weyl_reduced<Real>(spec, p, y, order), p, spec).max_abs() / (F * F);
}

/// max |D^p_qrs| * F in the frame; D is homogeneous of degree -1 in y.
template <class Real = double>
double douglas_normalized(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y,
                          int order = kMinOrderDouglas) {
  const double F = finsler_F(p, y, spec);
  return frame_components(douglas<Real>(spec, p, y, order), p, spec).max_abs() * F;
}

}  // namespace randers
