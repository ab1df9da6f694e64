#pragma once

// Constant-flag-curvature Randers metrics on S^3 in gnomonic coordinates.
//
// A point of the hemisphere with ambient first coordinate of sign c is
// written (x, y, z), with ambient position (c, x, y, z) / sqrt(den) and
// den = 1 + x^2 + y^2 + z^2.  The Riemannian part is the Berger metric
//   a = K Theta1^2 + Theta2^2 + Theta3^2
// built from the right-invariant coframe, and the drift is
//   b = s * sqrt(K - 1) * Theta1,
// where s = +-1 is the drift sign, independent of the hemisphere c.

#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "randers/errors.hpp"
#include "randers/jet.hpp"
#include "randers/linalg.hpp"

namespace randers {

template <class T>
struct scalar_of {
  using type = T;
};
template <class R>
struct scalar_of<BasicJet<R>> {
  using type = R;
};
template <class T>
using scalar_of_t = typename scalar_of<T>::type;

/// Selects one member of the metric family.
struct MetricSpec {
  double K = 2.0;
  int sign = +1;        // drift sign s
  int hemisphere = +1;  // c: +1 right, -1 left
  /// Multiplies the drift 1-form.  1 for the family itself; 0 gives the
  /// underlying Riemannian metric; other values are off-family controls.
  double drift_scale = 1.0;

  static MetricSpec make(double K, int sign = +1, int hemisphere = +1) {
    MetricSpec s{K, sign, hemisphere, 1.0};
    s.validate();
    return s;
  }

  void validate() const {
    if (!(K >= 1.0) || !std::isfinite(K)) {
      throw DomainError("flag curvature K must be >= 1 (got " + std::to_string(K) + ")");
    }
    if (sign != 1 && sign != -1) throw DomainError("drift sign must be +1 or -1");
    if (hemisphere != 1 && hemisphere != -1) throw DomainError("hemisphere must be +1 or -1");
  }

  /// Fibre dilation of the Berger metric.
  double epsilon() const { return std::sqrt(K); }
  /// Signed drift multiple: b = lambda * Theta1.
  double lambda() const { return drift_scale * sign * std::sqrt(K - 1.0); }

  /// lambda evaluated in a wider scalar type.
  template <class R>
  R lambda_as() const {
    using std::sqrt;
    return R(drift_scale * sign) * sqrt(R(K) - R(1));
  }
  bool is_riemannian() const { return lambda() == 0.0; }

  MetricSpec without_drift() const {
    MetricSpec s = *this;
    s.drift_scale = 0.0;
    return s;
  }
  MetricSpec with_drift_scale(double scale) const {
    MetricSpec s = *this;
    s.drift_scale = scale;
    return s;
  }
  MetricSpec reversed() const {
    MetricSpec s = *this;
    s.sign = -sign;
    return s;
  }

  /// "key = value" lines; keys K, sign, hemisphere (drift_scale only when != 1).
  std::string to_config() const {
    std::ostringstream os;
    os.precision(17);
    os << "K = " << K << "\n";
    os << "sign = " << (sign > 0 ? "+" : "-") << "\n";
    os << "hemisphere = " << (hemisphere > 0 ? "right" : "left") << "\n";
    if (drift_scale != 1.0) os << "drift_scale = " << drift_scale << "\n";
    return os.str();
  }

  static MetricSpec from_config(const std::string& text) {
    MetricSpec s;
    bool have_k = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      const std::string key = trim(line.substr(0, eq));
      if (key.empty() && eq == std::string::npos) continue;
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string value = trim(line.substr(eq + 1));
      if (key == "K") {
        s.K = parse_real(value, lineno);
        have_k = true;
      } else if (key == "sign") {
        s.sign = parse_sign(value);
      } else if (key == "hemisphere") {
        s.hemisphere = parse_hemisphere(value);
      } else if (key == "drift_scale") {
        s.drift_scale = parse_real(value, lineno);
      } else {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    }
    if (!have_k) throw ConfigError("metric config is missing K");
    s.validate();
    return s;
  }

  static int parse_sign(const std::string& v) {
    if (v == "+" || v == "+1" || v == "1") return +1;
    if (v == "-" || v == "-1") return -1;
    throw ConfigError("sign must be + or - (got '" + v + "')");
  }

  static int parse_hemisphere(const std::string& v) {
    if (v == "right" || v == "+1" || v == "1" || v == "+") return +1;
    if (v == "left" || v == "-1" || v == "-") return -1;
    throw ConfigError("hemisphere must be right or left (got '" + v + "')");
  }

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double parse_real(const std::string& v, int lineno) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0') {
      throw ConfigError("line " + std::to_string(lineno) + ": not a number: '" + v + "'");
    }
    return x;
  }
};

struct ChartPoint {
  double x = 0, y = 0, z = 0;
  Vec3 vec() const { return {x, y, z}; }
  double den() const { return 1.0 + x * x + y * y + z * z; }
};

/// Velocity components on d/dx, d/dy, d/dz.
struct TangentCoords {
  double u = 0, v = 0, w = 0;
  Vec3 vec() const { return {u, v, w}; }
  bool is_zero() const { return u == 0.0 && v == 0.0 && w == 0.0; }
};

/// Velocity components in the a-orthonormal frame {e1, e2, e3}.
struct FrameVector {
  double u = 0, v = 0, w = 0;
  Vec3 vec() const { return {u, v, w}; }
  double alpha() const { return std::sqrt(u * u + v * v + w * w); }
  bool is_zero() const { return u == 0.0 && v == 0.0 && w == 0.0; }
};

/// Rows are the components of Theta1, Theta2, Theta3 on dx, dy, dz.
inline Mat3 theta_coframe(const ChartPoint& p, int c) {
  const double d = p.den();
  return {{{c / d, -p.z / d, p.y / d}, {p.z / d, c / d, -p.x / d}, {-p.y / d, p.x / d, c / d}}};
}

/// v: rows omega^p = v^p_i dx^i; u = v^{-1}, columns e_p = u_p^i d_i.
struct Vielbein {
  Mat3 v;
  Mat3 u;
};

inline Vielbein vielbein(const ChartPoint& p, const MetricSpec& spec) {
  Mat3 v = theta_coframe(p, spec.hemisphere);
  for (double& x : v[0]) x *= spec.epsilon();
  return {v, inverse(v)};
}

/// a_ij = K Theta1_i Theta1_j + Theta2_i Theta2_j + Theta3_i Theta3_j.
inline Mat3 riemannian_metric(const ChartPoint& p, const MetricSpec& spec) {
  const Mat3 t = theta_coframe(p, spec.hemisphere);
  Mat3 a{};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      a[i][j] = spec.K * t[0][i] * t[0][j] + t[1][i] * t[1][j] + t[2][i] * t[2][j];
      a[j][i] = a[i][j];
    }
  return a;
}

/// Closed-form inverse a^ij, generic over double and Jet.
template <class T>
std::array<std::array<T, 3>, 3> riemannian_metric_inv(const std::array<T, 3>& pos, const MetricSpec& spec) {
  const T& x = pos[0];
  const T& y = pos[1];
  const T& z = pos[2];
  const double K = spec.K;
  const double c = spec.hemisphere;
  const T x2 = x * x, y2 = y * y, z2 = z * z;
  const T a11 = (x2 + 1.0) * (x2 + K * z2 + K * y2 + 1.0);
  const T a12 = x2 * x * y + K * (x * y2 * y) + x * y - c * (z * x2) - c * z + (K * c) * (z * x2) + (K * c) * z +
                K * (y * z2 * x);
  const T a13 = K * (y2 * z * x) + x2 * x * z + K * (x * z2 * z) + x * z - (K * c) * (y * x2) - (K * c) * y +
                c * (y * x2) + c * y;
  const T a22 = y2 * x2 + K * x2 + (2.0 * (K - 1) * c) * (x * y * z) + K * (y2 * y2) + z2 + K + K * (y2 * z2) +
                (2 * K) * y2;
  const T a23 = x2 * z * y + ((K - 1) * c) * (z2 * x) - ((K - 1) * c) * (x * y2) + K * (y2 * y * z) +
                K * (y * z2 * z) - z * y + (2 * K) * (y * z);
  const T a33 = z2 * x2 + K * x2 - (2.0 * (K - 1) * c) * (x * y * z) + K * (y2 * z2) + K * (z2 * z2) +
                (2 * K) * z2 + K + y2;
  return {{{a11 / K, a12 / K, a13 / K}, {a12 / K, a22 / K, a23 / K}, {a13 / K, a23 / K, a33 / K}}};
}

inline Mat3 riemannian_metric_inv(const ChartPoint& p, const MetricSpec& spec) {
  return riemannian_metric_inv<double>(p.vec(), spec);
}

/// Covector b_i = lambda * Theta1_i = lambda (c, -z, y) / den, generic over double and Jet.
template <class T>
std::array<T, 3> drift_form(const std::array<T, 3>& pos, const MetricSpec& spec) {
  const T inv_den = 1.0 / (1.0 + pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]);
  const auto l = spec.lambda_as<scalar_of_t<T>>();
  return {(l * spec.hemisphere) * inv_den, -(l * pos[2]) * inv_den, (l * pos[1]) * inv_den};
}

inline Vec3 drift_form(const ChartPoint& p, const MetricSpec& spec) {
  const Mat3 t = theta_coframe(p, spec.hemisphere);
  const double l = spec.lambda();
  return {l * t[0][0], l * t[0][1], l * t[0][2]};
}

/// Riemannian norm sqrt(b_i a^ij b_j).
inline double drift_norm(const ChartPoint& p, const MetricSpec& spec) {
  const Vec3 b = drift_form(p, spec);
  return std::sqrt(quadratic_form(riemannian_metric_inv(p, spec), b, b));
}

/// alpha and beta of F = alpha + beta, generic over double and Jet.
template <class T>
struct RandersParts {
  T alpha;
  T beta;
};

template <class T>
RandersParts<T> randers_parts(const std::array<T, 3>& x, const std::array<T, 3>& y, const MetricSpec& spec) {
  using std::sqrt;
  const double c = spec.hemisphere;
  const T& X = x[0];
  const T& Y = x[1];
  const T& Z = x[2];
  const T& u = y[0];
  const T& v = y[1];
  const T& w = y[2];
  const T den = 1.0 + X * X + Y * Y + Z * Z;
  const T P = c * u - Z * v + Y * w;
  const T Q = Z * u + c * v - X * w;
  const T R = -(Y * u) + X * v + c * w;
  const T inv_den = 1.0 / den;
  T alpha = sqrt(spec.K * (P * P) + Q * Q + R * R) * inv_den;
  T beta = (spec.lambda_as<scalar_of_t<T>>() * P) * inv_den;
  return {std::move(alpha), std::move(beta)};
}

template <class T>
T finsler_F(const std::array<T, 3>& x, const std::array<T, 3>& y, const MetricSpec& spec) {
  auto parts = randers_parts(x, y, spec);
  return parts.alpha + parts.beta;
}

inline double finsler_F(const ChartPoint& p, const TangentCoords& y, const MetricSpec& spec) {
  if (y.is_zero()) throw DomainError("Finsler function evaluated on the zero vector");
  return finsler_F<double>(p.vec(), y.vec(), spec);
}

inline FrameVector to_frame(const ChartPoint& p, const TangentCoords& y, const MetricSpec& spec) {
  const Vec3 f = matvec(vielbein(p, spec).v, y.vec());
  return {f[0], f[1], f[2]};
}

inline TangentCoords from_frame(const ChartPoint& p, const FrameVector& yf, const MetricSpec& spec) {
  const Vec3 t = matvec(vielbein(p, spec).u, yf.vec());
  return {t[0], t[1], t[2]};
}

/// Frame description: F = |y|_frame + s sqrt((K-1)/K) y^1.
inline double finsler_F_frame(const FrameVector& yf, const MetricSpec& spec) {
  if (yf.is_zero()) throw DomainError("Finsler function evaluated on the zero vector");
  return yf.alpha() + spec.lambda() / spec.epsilon() * yf.u;
}

/// Ambient position in R^4 of a chart point.
inline std::array<double, 4> to_ambient(const ChartPoint& p, int c) {
  const double r = std::sqrt(p.den());
  return {c / r, p.x / r, p.y / r, p.z / r};
}

/// Chart point and hemisphere of an ambient point off the equator.
inline std::pair<ChartPoint, int> from_ambient(const std::array<double, 4>& X) {
  if (X[0] == 0.0) throw DomainError("point on the equator has no gnomonic chart");
  const int c = X[0] > 0 ? 1 : -1;
  const double s = c / X[0];
  return {{X[1] * s, X[2] * s, X[3] * s}, c};
}

/// The antipodal map X -> -X preserves Theta^p, so it is an isometry of
/// every metric in the family.  In charts it reads (c; p, y) -> (-c; -p, -y).
inline std::pair<ChartPoint, TangentCoords> antipodal(const ChartPoint& p, const TangentCoords& y) {
  return {{-p.x, -p.y, -p.z}, {-y.u, -y.v, -y.w}};
}

}  // namespace randers
