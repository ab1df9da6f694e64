#pragma once

// Seeded random composite expressions in three variables, evaluable on any
// scalar (double, float128, jets), for the finite-difference oracle.

#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "randers/finite_difference.hpp"
#include "randers/jet.hpp"
#include "randers/quad.hpp"

namespace testing_support {

inline constexpr int kExpressionCount = 50;
inline constexpr int kExpressionOrder = 4;
inline constexpr double kOracleStep = 1e-5;

enum class Op { Var, Const, Add, Sub, Mul, Div, Sqrt };

struct Node {
  Op op = Op::Const;
  int var = 0;
  double c = 0;
  std::unique_ptr<Node> a, b;
};

class Expression {
 public:
  explicit Expression(std::unique_ptr<Node> root) : root_(std::move(root)) {}

  template <class T>
  T eval(const std::array<T, 3>& x) const {
    return eval_node<T>(*root_, x);
  }

 private:
  // Denominators and radicands are c + e^2 with c >= 0.5, so every tree is
  // analytic on all of R^3.
  template <class T>
  static T eval_node(const Node& n, const std::array<T, 3>& x) {
    using std::sqrt;
    switch (n.op) {
      case Op::Var:
        return x[n.var];
      case Op::Const:
        return x[0] * 0.0 + n.c;
      case Op::Add:
        return eval_node<T>(*n.a, x) + eval_node<T>(*n.b, x);
      case Op::Sub:
        return eval_node<T>(*n.a, x) - eval_node<T>(*n.b, x);
      case Op::Mul:
        return eval_node<T>(*n.a, x) * eval_node<T>(*n.b, x);
      case Op::Div: {
        const T d = eval_node<T>(*n.b, x);
        return eval_node<T>(*n.a, x) / (d * d + n.c);
      }
      case Op::Sqrt: {
        const T e = eval_node<T>(*n.a, x);
        return sqrt(e * e + n.c);
      }
    }
    return x[0];
  }

  std::unique_ptr<Node> root_;
};

inline std::unique_ptr<Node> grow(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> U(-1.5, 1.5), C(0.5, 2.0);
  auto n = std::make_unique<Node>();
  const int pick = depth <= 0 ? static_cast<int>(rng() % 2) : 2 + static_cast<int>(rng() % 5);
  switch (pick) {
    case 0:
      n->op = Op::Var;
      n->var = static_cast<int>(rng() % 3);
      break;
    case 1:
      n->op = Op::Const;
      n->c = U(rng);
      break;
    default:
      n->op = static_cast<Op>(pick);
      n->a = grow(rng, depth - 1);
      if (n->op != Op::Sqrt) n->b = grow(rng, depth - 1);
      if (n->op == Op::Div || n->op == Op::Sqrt) n->c = C(rng);
  }
  return n;
}

/// Tree t: the root cycles through the five composite operations over
/// random subtrees of depth 3 and 2.
inline Expression make_expression(int t) {
  std::mt19937_64 rng(0x5eed0000ULL + static_cast<unsigned>(t));
  auto root = std::make_unique<Node>();
  root->op = static_cast<Op>(2 + t % 5);
  root->a = grow(rng, 3);
  if (root->op != Op::Sqrt) root->b = grow(rng, 2);
  if (root->op == Op::Div || root->op == Op::Sqrt) root->c = 1.0;
  return Expression(std::move(root));
}

inline std::array<double, 3> expression_point(int t) {
  std::mt19937_64 rng(0xba5e0000ULL + static_cast<unsigned>(t));
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  return {U(rng), U(rng), U(rng)};
}

struct ExpressionComparison {
  bool pass = true;
  double worst_excess = 0;  // max over partials of |jet - fd| / allowed
  std::string worst_index;
  double worst_jet = 0, worst_fd = 0;
  int partials = 0;
};

/// Every mixed partial of total order 1..4 of tree t, jets against the
/// float128 central-difference oracle with step kOracleStep * max(1, |x_k|),
/// allowed error max(rel |jet|, abs).
inline ExpressionComparison compare_expression(int t, double rel = 1e-5, double abs = 1e-7) {
  using randers::Jet;
  using randers::MultiIndex;
  const Expression e = make_expression(t);
  const auto at = expression_point(t);
  const Jet j = e.eval<Jet>({randers::jet_variable(0, at[0], 3, kExpressionOrder),
                             randers::jet_variable(1, at[1], 3, kExpressionOrder),
                             randers::jet_variable(2, at[2], 3, kExpressionOrder)});
  using randers::Quad;
  const std::vector<Quad> base(at.begin(), at.end());
  std::vector<Quad> h;
  for (double x : at) h.push_back(Quad(kOracleStep * std::max(1.0, std::abs(x))));
  auto f = [&e](std::span<const Quad> x) { return e.eval<Quad>({x[0], x[1], x[2]}); };
  ExpressionComparison out;
  for (int a = 0; a <= kExpressionOrder; ++a)
    for (int b = 0; a + b <= kExpressionOrder; ++b)
      for (int c = 0; a + b + c <= kExpressionOrder; ++c) {
        if (a + b + c == 0) continue;
        const MultiIndex m{a, b, c};
        const double jet = randers::extract_partial(j, m);
        const double fd = static_cast<double>(randers::fd_partial<Quad>(
            f, std::span<const Quad>(base), m, std::span<const Quad>(h)));
        const double allowed = std::max(rel * std::abs(jet), abs);
        const double excess = std::abs(jet - fd) / allowed;
        ++out.partials;
        if (excess > out.worst_excess) {
          out.worst_excess = excess;
          out.worst_index = m.to_string();
          out.worst_jet = jet;
          out.worst_fd = fd;
        }
      }
  out.pass = out.worst_excess <= 1.0;
  return out;
}

}  // namespace testing_support
