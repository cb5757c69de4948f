#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilkill/jet.hpp"

namespace nilkill {

using ParamMap = std::map<std::string, double>;

enum class Function { Sin, Cos, Exp, Log, Sqrt };

/// Immutable expression tree. Identifiers are unresolved until bound against
/// a chart's coordinates and a parameter map (see BoundExpr).
class ScalarExpr {
 public:
  enum class Kind { Number, Ident, Add, Sub, Mul, Div, Neg, Pow, Func };

  struct Node {
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string name;
    int exponent = 0;
    Function function = Function::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  ScalarExpr() = default;
  explicit ScalarExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  static ScalarExpr number(double value);
  static ScalarExpr ident(std::string name);
  static ScalarExpr binary(Kind kind, const ScalarExpr& lhs, const ScalarExpr& rhs);
  static ScalarExpr neg(const ScalarExpr& operand);
  static ScalarExpr pow(const ScalarExpr& base, int exponent);
  static ScalarExpr call(Function function, const ScalarExpr& argument);

  bool empty() const noexcept { return !root_; }
  const Node& root() const { return *root_; }

  /// Structural equality.
  friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);

 private:
  std::shared_ptr<const Node> root_;
};

/// Parses the expression grammar. Throws ParseError.
ScalarExpr parse(std::string_view source);

/// Fully parenthesised text that parses back to a structurally equal tree.
std::string print(const ScalarExpr& expr);

/// Every identifier appearing in the tree.
std::set<std::string> identifiers(const ScalarExpr& expr);

std::string_view function_name(Function f);

/// An expression resolved against coordinate slots and parameter values,
/// compiled to a small stack program. Immutable; evaluation is pure.
class BoundExpr {
 public:
  /// Throws BindError for identifiers that are neither coordinates nor parameters.
  /// Coordinates shadow parameters of the same name.
  BoundExpr(const ScalarExpr& expr, std::span<const std::string> coordinates,
            const ParamMap& params);

  double eval(std::span<const double> args) const;
  Jet eval(std::span<const Jet> args) const;

  std::size_t arity() const noexcept { return arity_; }

  struct Instr {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Func } op;
    double value = 0.0;
    int index = 0;
    Function function = Function::Sin;
  };

 private:
  std::vector<Instr> program_;
  std::size_t arity_;
};

/// Convenience: bind by name and evaluate over jet-valued coordinates.
Jet eval_jet(const ScalarExpr& expr, const std::map<std::string, Jet>& assignment,
             const ParamMap& params);

}  // namespace nilkill
