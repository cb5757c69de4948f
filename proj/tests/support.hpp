#pragma once

// Hand-rolled generators shared by the property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nilkill/expr.hpp"
#include "nilkill/jet.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::vector<double> point(int n, double lo, double hi) {
    std::vector<double> p(n);
    for (auto& x : p) x = uniform(lo, hi);
    return p;
  }

  /// A jet with every coefficient drawn from [lo, hi].
  nilkill::Jet jet(int dim, int order, double lo = -2.0, double hi = 2.0) {
    nilkill::Jet j(nilkill::MultiIndexTable::get(dim, order));
    for (auto& c : j.coefficients()) c = uniform(lo, hi);
    return j;
  }

  /// Random polynomial over the named variables: sums of products of small integer powers.
  nilkill::ScalarExpr polynomial(const std::vector<std::string>& vars, int depth) {
    using nilkill::ScalarExpr;
    using Kind = ScalarExpr::Kind;
    if (depth <= 0 || integer(0, 3) == 0) {
      // Parsed literals are never negative; signs live in Neg nodes.
      if (coin()) return ScalarExpr::number(std::round(uniform(0.0, 3.0) * 4.0) / 4.0);
      return ScalarExpr::ident(vars[integer(0, static_cast<int>(vars.size()) - 1)]);
    }
    switch (integer(0, 4)) {
      case 0: return ScalarExpr::binary(Kind::Add, polynomial(vars, depth - 1), polynomial(vars, depth - 1));
      case 1: return ScalarExpr::binary(Kind::Sub, polynomial(vars, depth - 1), polynomial(vars, depth - 1));
      case 2: return ScalarExpr::binary(Kind::Mul, polynomial(vars, depth - 1), polynomial(vars, depth - 1));
      case 3: return ScalarExpr::pow(polynomial(vars, depth - 1), integer(0, 3));
      default: return ScalarExpr::neg(polynomial(vars, depth - 1));
    }
  }

  /// Random smooth expression, including division, negative powers and elementary functions,
  /// built so that every node stays finite on points in [0.5, 1.5]^n.
  nilkill::ScalarExpr smooth(const std::vector<std::string>& vars, int depth) {
    using nilkill::Function;
    using nilkill::ScalarExpr;
    using Kind = ScalarExpr::Kind;
    if (depth <= 0 || integer(0, 4) == 0) {
      if (coin()) return ScalarExpr::number(std::round(uniform(0.5, 2.0) * 4.0) / 4.0);
      return ScalarExpr::ident(vars[integer(0, static_cast<int>(vars.size()) - 1)]);
    }
    // Positive-valued building block: 1 + x^2 style denominators and log/sqrt arguments.
    const auto positive = [&](int d) {
      return ScalarExpr::binary(Kind::Add, ScalarExpr::number(1.0), ScalarExpr::pow(smooth(vars, d), 2));
    };
    switch (integer(0, 7)) {
      case 0: return ScalarExpr::binary(Kind::Add, smooth(vars, depth - 1), smooth(vars, depth - 1));
      case 1: return ScalarExpr::binary(Kind::Sub, smooth(vars, depth - 1), smooth(vars, depth - 1));
      case 2: return ScalarExpr::binary(Kind::Mul, smooth(vars, depth - 1), smooth(vars, depth - 1));
      case 3: return ScalarExpr::binary(Kind::Div, smooth(vars, depth - 1), positive(depth - 1));
      case 4: return ScalarExpr::pow(positive(depth - 1), integer(-2, 2));
      case 5: return ScalarExpr::call(coin() ? Function::Sin : Function::Cos, smooth(vars, depth - 1));
      case 6: return ScalarExpr::call(coin() ? Function::Log : Function::Sqrt, positive(depth - 1));
      default:
        return ScalarExpr::call(Function::Exp,
                                ScalarExpr::binary(Kind::Mul, ScalarExpr::number(0.25), smooth(vars, depth - 1)));
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing
