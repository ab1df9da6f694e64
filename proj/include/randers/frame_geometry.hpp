#pragma once

// Closed-form frame-side geometry of the Berger metric on S^3 and of its
// Randers perturbation, as explicit functions of (K, s, frame vector).
// No automatic differentiation is used here, so every quantity in this
// header is an independent check on the coordinate pipeline.
//
// Index conventions (all 0-based in code, 1-based in names):
//   connection c[q][p][r]   omega_q^p = c[q][p][r] omega^r
//   curvature  R[q][p][r][s]  = R_q^p_rs in the orthonormal frame, with
//              d omega_q^p - omega_q^s ^ omega_s^p = 1/2 R_q^p_rs omega^r ^ omega^s.
// With this convention the Riemannian spray curvature is
//   Ktilde^p_r = y^q R[q][p][r][s] y^s
// and R_1212 = -eps^2; the sign is the one that reproduces the tabulated
// Ktilde matrix, and no overall sign flip is applied anywhere.

#include <array>
#include <cmath>
#include <string>

#include "randers/errors.hpp"
#include "randers/linalg.hpp"
#include "randers/s3_model.hpp"

namespace randers::frame {

using Tensor3 = std::array<std::array<std::array<double, 3>, 3>, 3>;
using Tensor4 = std::array<Tensor3, 3>;

struct FrameConnection {
  Tensor3 c{};
};

struct FrameCurvature {
  Tensor4 R{};
};

struct KillingDerivatives {
  Vec3 b{};
  Mat3 b1{};     // b_{p|q}
  Tensor3 b2{};  // b_{p|q|r}
};

struct YSReport {
  double K = 0, lambda = 0, epsilon = 0;
  double killing_residual = 0;
  double norm_value = 0;  // ||b||
  double second_derivative_residual = 0;
  double curvature_residual = 0;
  std::array<int, 4> worst_curvature_slot{};  // 0-based (q, p, r, s)
  bool killing_pass = false;
  bool norm_pass = false;
  bool second_derivative_pass = false;
  bool curvature_pass = false;
  bool all_pass() const { return killing_pass && norm_pass && second_derivative_pass && curvature_pass; }
  bool riemannian() const { return lambda == 0.0; }
};

inline constexpr double kYSTolerance = 1e-12;

/// Levi-Civita connection forms of the Berger metric with fibre dilation eps.
inline FrameConnection connection_forms(double eps) {
  if (!(eps > 0.0)) throw DomainError("connection_forms: dilation must be positive");
  FrameConnection w;
  auto& c = w.c;
  c[0][1][2] = -eps;           // omega_1^2 = -eps omega^3
  c[0][2][1] = eps;            // omega_1^3 = +eps omega^2
  c[1][0][2] = eps;            // omega_2^1 = +eps omega^3
  c[1][2][0] = eps - 2 / eps;  // omega_2^3 = (eps - 2/eps) omega^1
  c[2][0][1] = -eps;           // omega_3^1 = -eps omega^2
  c[2][1][0] = 2 / eps - eps;  // omega_3^2 = (2/eps - eps) omega^1
  return w;
}

/// Riemann tensor table, extended from its independent components by
/// R_qpsr = -R_qprs, R_pqrs = -R_qprs and R_rsqp = R_qprs.
inline FrameCurvature riemann_frame(double eps) {
  if (!(eps > 0.0)) throw DomainError("riemann_frame: dilation must be positive");
  FrameCurvature out;
  auto& R = out.R;
  const double e2 = eps * eps;
  auto put = [&R](int q, int p, int r, int s, double val) {
    for (auto [a, b, sab] : {std::array{q, p, 1}, std::array{p, q, -1}}) {
      for (auto [c, d, scd] : {std::array{r, s, 1}, std::array{s, r, -1}}) {
        R[a][b][c][d] = sab * scd * val;
        R[c][d][a][b] = sab * scd * val;
      }
    }
  };
  put(0, 1, 0, 1, -e2);
  put(0, 2, 0, 2, -e2);
  put(1, 2, 1, 2, 3 * e2 - 4);
  return out;
}

/// Covariant derivatives of b = lambda Theta1 = (lambda/eps) omega^1, from
///   b_{p|q}   = (db_p - b_s omega_p^s)(e_q)
///   b_{p|q|r} = (db_{p|q} - b_{s|q} omega_p^s - b_{p|s} omega_q^s)(e_r)
/// with constant frame components (so the d-terms vanish).
inline KillingDerivatives killing_cov_deriv(double lambda, double eps) {
  const FrameConnection w = connection_forms(eps);
  KillingDerivatives k;
  k.b = {lambda / eps, 0.0, 0.0};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0;
      for (int t = 0; t < 3; ++t) s -= k.b[t] * w.c[p][t][q];
      k.b1[p][q] = s;
    }
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r) {
        double s = 0;
        for (int t = 0; t < 3; ++t) s -= k.b1[t][q] * w.c[p][t][r] + k.b1[p][t] * w.c[q][t][r];
        k.b2[p][q][r] = s;
      }
  return k;
}

/// T_pqr = K (a_pr b_q - a_qr b_p) in the orthonormal frame.
inline Tensor3 ys_T(double K, const Vec3& b) {
  Tensor3 T{};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r) T[p][q][r] = K * ((p == r) * b[q] - (q == r) * b[p]);
  return T;
}

/// The curvature the fourth criterion requires, indexed (q, p, r, s).
inline Tensor4 ys_script_T(double K, const Vec3& b, const Mat3& b1) {
  const double nb2 = dot(b, b);
  auto a = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  Tensor4 T{};
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) {
          T[q][p][r][s] = -K * (1 - nb2) * a(q, r) * a(p, s) - K * (a(q, r) * b[p] * b[s] + a(p, s) * b[q] * b[r]) +
                          b1[q][r] * b1[p][s] + K * (1 - nb2) * a(q, s) * a(p, r) +
                          K * (a(q, s) * b[p] * b[r] + a(p, r) * b[q] * b[s]) - b1[q][s] * b1[p][r] +
                          2 * b1[q][p] * b1[r][s];
        }
  return T;
}

/// Residuals of the four criteria for the pair (Berger metric with dilation
/// eps, drift lambda Theta1) against target curvature K.
inline YSReport ys_criteria_check(double K, double lambda, double eps) {
  if (!(eps > 0.0) || !(K > 0.0)) throw DomainError("ys_criteria_check: K and eps must be positive");
  YSReport rep;
  rep.K = K;
  rep.lambda = lambda;
  rep.epsilon = eps;
  const KillingDerivatives kd = killing_cov_deriv(lambda, eps);
  const FrameCurvature Rt = riemann_frame(eps);

  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      rep.killing_residual = std::max(rep.killing_residual, std::abs(kd.b1[p][q] + kd.b1[q][p]));
  rep.norm_value = std::sqrt(dot(kd.b, kd.b));

  const Tensor3 T = ys_T(K, kd.b);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r)
        rep.second_derivative_residual =
            std::max(rep.second_derivative_residual, std::abs(kd.b2[p][q][r] - T[p][q][r]));

  const Tensor4 ST = ys_script_T(K, kd.b, kd.b1);
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) {
          const double d = std::abs(Rt.R[q][p][r][s] - ST[q][p][r][s]);
          if (d > rep.curvature_residual) {
            rep.curvature_residual = d;
            rep.worst_curvature_slot = {q, p, r, s};
          }
        }

  rep.killing_pass = rep.killing_residual < kYSTolerance;
  // Frame components are constant, so the norm is constant; it must be < 1.
  rep.norm_pass = rep.norm_value < 1.0;
  rep.second_derivative_pass = rep.second_derivative_residual < kYSTolerance;
  rep.curvature_pass = rep.curvature_residual < kYSTolerance;
  return rep;
}

struct YSSolution {
  double epsilon;
  double lambda;
};

/// eps = sqrt(K), lambda = s sqrt(K - 1).
inline YSSolution solve_ys(double K, int sign) {
  if (!(K >= 1.0)) {
    throw DomainError("no real Yasuda-Shimada solution for K < 1 (lambda^2 = K - 1 < 0)");
  }
  if (sign != 1 && sign != -1) throw DomainError("drift sign must be +1 or -1");
  return {std::sqrt(K), sign * std::sqrt(K - 1.0)};
}

/// Spray curvature of the Berger metric, Ktilde^p_r, as the printed matrix.
inline Mat3 riemann_spray_frame(const FrameVector& y, double K) {
  const double u = y.u, v = y.v, w = y.w;
  return {{{K * (v * v + w * w), -K * u * v, -K * u * w},
           {-K * u * v, K * u * u + (4 - 3 * K) * w * w, (3 * K - 4) * v * w},
           {-K * u * w, (3 * K - 4) * v * w, K * u * u + (4 - 3 * K) * v * v}}};
}

/// Same quantity by contracting the curvature table: y^q R_q^p_rs y^s.
inline Mat3 riemann_spray_frame_contracted(const FrameVector& yf, double K) {
  const FrameCurvature Rt = riemann_frame(std::sqrt(K));
  const Vec3 y = yf.vec();
  Mat3 out{};
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < 3; ++r)
      for (int q = 0; q < 3; ++q)
        for (int s = 0; s < 3; ++s) out[p][r] += y[q] * Rt.R[q][p][r][s] * y[s];
  return out;
}

/// zeta^p = G^p - Gtilde^p in the frame.
inline Vec3 zeta_frame(const FrameVector& y, double K, int sign) {
  if (y.is_zero()) throw DomainError("zeta_frame: zero frame vector");
  const double k = sign * std::sqrt(K - 1.0);
  const double a = y.alpha();
  return {0.0, -k * y.w * a, k * y.v * a};
}

struct ZetaPartials {
  Mat3 d1{};     // d1[p][q] = d zeta^p / d y^q
  Tensor3 d2{};  // d2[p][q][r] = d^2 zeta^p / d y^q d y^r
};

/// Tabulated first and second y-partials of zeta.
inline ZetaPartials zeta_partials(const FrameVector& y, double K, int sign) {
  if (y.is_zero()) throw DomainError("zeta_partials: zero frame vector");
  const double u = y.u, v = y.v, w = y.w;
  const double a = y.alpha();
  const double k = sign * std::sqrt(K - 1.0);
  const double dia = k / a;
  const double star = k / (a * a * a);
  ZetaPartials z;
  z.d1[1] = {-dia * (u * w), -dia * (v * w), -dia * (u * u + v * v + 2 * w * w)};
  z.d1[2] = {dia * (u * v), dia * (u * u + 2 * v * v + w * w), dia * (v * w)};

  auto sym = [&z](int p, int q, int r, double val) {
    z.d2[p][q][r] = val;
    z.d2[p][r][q] = val;
  };
  // zeta^2
  sym(1, 0, 0, -star * w * (v * v + w * w));
  sym(1, 0, 1, star * (u * v * w));
  sym(1, 0, 2, -star * u * (u * u + v * v));
  sym(1, 1, 1, -star * w * (u * u + w * w));
  sym(1, 1, 2, -star * v * (u * u + v * v));
  sym(1, 2, 2, -star * w * (3 * u * u + 3 * v * v + 2 * w * w));
  // zeta^3
  sym(2, 0, 0, star * v * (v * v + w * w));
  sym(2, 0, 1, star * u * (u * u + w * w));
  sym(2, 0, 2, -star * (u * v * w));
  sym(2, 1, 1, star * v * (3 * u * u + 2 * v * v + 3 * w * w));
  sym(2, 1, 2, star * w * (u * u + w * w));
  sym(2, 2, 2, star * v * (u * u + v * v));
  return z;
}

struct ZetaHorizontal {
  Mat3 hcov{};   // hcov[p][r] = zeta^p_{|r}
  Tensor3 d1{};  // d1[p][r][t] = d(zeta^p_{|r}) / d y^t
};

/// Tabulated horizontal covariant derivatives of zeta and their y-partials.
inline ZetaHorizontal zeta_hcov(const FrameVector& y, double K, int sign) {
  if (y.is_zero()) throw DomainError("zeta_hcov: zero frame vector");
  const double u = y.u, v = y.v, w = y.w;
  const double a = y.alpha();
  const double k = sign * std::sqrt(K - 1.0) * std::sqrt(K);
  const double heart = a * k;
  const double club = k / a;
  ZetaHorizontal z;
  z.hcov[0] = {0.0, -heart * v, -heart * w};
  z.hcov[1] = {0.0, heart * u, 0.0};
  z.hcov[2] = {0.0, 0.0, heart * u};

  const Vec3 diag = {club * (2 * u * u + v * v + w * w), club * (u * v), club * (u * w)};
  z.d1[1][1] = diag;
  z.d1[2][2] = diag;
  z.d1[0][1] = {-club * (u * v), -club * (u * u + 2 * v * v + w * w), -club * (v * w)};
  z.d1[0][2] = {-club * (u * w), -club * (v * w), -club * (u * u + v * v + 2 * w * w)};
  return z;
}

/// zeta^p_{|r} = {zeta^s omega_s^p - (zeta^p)_{y^t} y^s omega_s^t}(e_r), from
/// the connection table and the zeta partials rather than the printed table.
inline Mat3 zeta_hcov_from_connection(const FrameVector& yf, double K, int sign) {
  const FrameConnection w = connection_forms(std::sqrt(K));
  const Vec3 z = zeta_frame(yf, K, sign);
  const ZetaPartials dz = zeta_partials(yf, K, sign);
  const Vec3 y = yf.vec();
  Mat3 out{};
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < 3; ++r) {
      double s = 0;
      for (int t = 0; t < 3; ++t) s += z[t] * w.c[t][p][r];
      for (int t = 0; t < 3; ++t)
        for (int q = 0; q < 3; ++q) s -= dz.d1[p][t] * y[q] * w.c[q][t][r];
      out[p][r] = s;
    }
  return out;
}

/// Printed closed forms of E^p_r.
inline Mat3 E_correction_table(const FrameVector& y, double K, int sign) {
  if (y.is_zero()) throw DomainError("E_correction: zero frame vector");
  const double u = y.u, v = y.v, w = y.w;
  const double club = sign * std::sqrt(K - 1.0) * std::sqrt(K) / y.alpha();
  const double k1 = K - 1.0;
  return {{{club * u * (v * v + w * w), -club * v * (u * u), -club * w * (u * u)},
           {-club * v * (2 * u * u + v * v + w * w) - k1 * u * v,
            club * u * (2 * u * u + v * v + 2 * w * w) + k1 * (u * u + 4 * w * w), -club * u * v * w - 4 * k1 * v * w},
           {-club * w * (2 * u * u + v * v + w * w) - k1 * u * w, -club * u * v * w - 4 * k1 * v * w,
            club * u * (2 * u * u + 2 * v * v + w * w) + k1 * (u * u + 4 * v * v)}}};
}

/// E^p_r = 2 zeta^p_{|r} - y^q (zeta^p_{|q})_{y^r} - (zeta^p)_{y^q} (zeta^q)_{y^r}
///         + 2 zeta^q (zeta^p)_{y^q y^r}, assembled from the derivative tables.
inline Mat3 E_correction_assembled(const FrameVector& yf, double K, int sign) {
  const Vec3 z = zeta_frame(yf, K, sign);
  const ZetaPartials dz = zeta_partials(yf, K, sign);
  const ZetaHorizontal hz = zeta_hcov(yf, K, sign);
  const Vec3 y = yf.vec();
  Mat3 E{};
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < 3; ++r) {
      double s = 2 * hz.hcov[p][r];
      for (int q = 0; q < 3; ++q) {
        s -= y[q] * hz.d1[p][q][r];
        s -= dz.d1[p][q] * dz.d1[q][r];
        s += 2 * z[q] * dz.d2[p][q][r];
      }
      E[p][r] = s;
    }
  return E;
}

inline constexpr double kECorrectionConsistency = 1e-10;

/// E^p_r; both routes are computed and must agree.
inline Mat3 E_correction(const FrameVector& y, double K, int sign) {
  const Mat3 printed = E_correction_table(y, K, sign);
  const Mat3 assembled = E_correction_assembled(y, K, sign);
  const double scale = std::max(1.0, K * y.alpha() * y.alpha());
  const double defect = max_abs_diff(printed, assembled);
  if (defect > kECorrectionConsistency * scale) {
    throw Error("E_correction: printed and assembled forms disagree by " + std::to_string(defect));
  }
  return printed;
}

/// K tau^p_r = K F^2 (delta^p_r - (y^p/F) F_{y^r}), printed matrix.
inline Mat3 tau_frame(const FrameVector& y, double K, int sign) {
  if (y.is_zero()) throw DomainError("tau_frame: zero frame vector");
  const double u = y.u, v = y.v, w = y.w;
  const double a = y.alpha();
  const double bn = sign * std::sqrt((K - 1.0) / K);
  const double F = a + bn * u;
  const double Fa = F / a;
  return {{{Fa * K * (v * v + w * w), -Fa * K * u * v, -Fa * K * u * w},
           {-Fa * K * u * v - F * K * v * bn, F * K * (F - v * v / a), -Fa * K * v * w},
           {-Fa * K * u * w - F * K * w * bn, -Fa * K * v * w, F * K * (F - w * w / a)}}};
}

/// K tau from its definition, with F_u = u/alpha + s sqrt((K-1)/K), F_v = v/alpha, F_w = w/alpha.
inline Mat3 tau_frame_definition(const FrameVector& yf, double K, int sign) {
  const double a = yf.alpha();
  const double bn = sign * std::sqrt((K - 1.0) / K);
  const double F = a + bn * yf.u;
  const Vec3 y = yf.vec();
  const Vec3 dF = {yf.u / a + bn, yf.v / a, yf.w / a};
  Mat3 t{};
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < 3; ++r) t[p][r] = K * (F * F * (p == r) - y[p] * F * dF[r]);
  return t;
}

/// The frame-side spray curvature Ktilde + E.
inline Mat3 spray_curvature_frame(const FrameVector& y, double K, int sign) {
  const Mat3 kt = riemann_spray_frame(y, K);
  const Mat3 e = E_correction(y, K, sign);
  Mat3 out{};
  for (int p = 0; p < 3; ++p)
    for (int r = 0; r < 3; ++r) out[p][r] = kt[p][r] + e[p][r];
  return out;
}

}  // namespace randers::frame
