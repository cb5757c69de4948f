#include "nilkill/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

#include "nilkill/error.hpp"

namespace nilkill {

namespace {

using Node = ScalarExpr::Node;
using Kind = ScalarExpr::Kind;

std::optional<Function> lookup_function(std::string_view name) {
  if (name == "sin") return Function::Sin;
  if (name == "cos") return Function::Cos;
  if (name == "exp") return Function::Exp;
  if (name == "log") return Function::Log;
  if (name == "sqrt") return Function::Sqrt;
  return std::nullopt;
}

struct Token {
  enum class Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } type;
  std::size_t offset;
  std::string_view text;
};

std::string describe(const Token& t) {
  if (t.type == Token::Type::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Token::Type::End, src_.size(), {}};
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Token::Type::Ident, start, src_.substr(start, pos_ - start)};
    }
    ++pos_;
    const auto text = src_.substr(start, 1);
    switch (c) {
      case '+': return {Token::Type::Plus, start, text};
      case '-': return {Token::Type::Minus, start, text};
      case '*': return {Token::Type::Star, start, text};
      case '/': return {Token::Type::Slash, start, text};
      case '^': return {Token::Type::Caret, start, text};
      case '(': return {Token::Type::LParen, start, text};
      case ')': return {Token::Type::RParen, start, text};
      default: break;
    }
    throw ParseError(start, "a number, identifier, operator or parenthesis",
                     "'" + std::string(text) + "'");
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(start, "a digit", "'.'");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        const std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'"
                                                     : std::string("end of input");
        throw ParseError(pos_ < src_.size() ? pos_ : mark, "exponent digits", found);
      }
    }
    return {Token::Type::Number, start, src_.substr(start, pos_ - start)};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  ScalarExpr parse_all() {
    ScalarExpr e = expr();
    if (tok_.type != Token::Type::End)
      throw ParseError(tok_.offset, "an operator or end of input", describe(tok_));
    return e;
  }

 private:
  void advance() { tok_ = lexer_.next(); }

  ScalarExpr expr() {
    ScalarExpr lhs = term();
    while (tok_.type == Token::Type::Plus || tok_.type == Token::Type::Minus) {
      const Kind k = tok_.type == Token::Type::Plus ? Kind::Add : Kind::Sub;
      advance();
      lhs = ScalarExpr::binary(k, lhs, term());
    }
    return lhs;
  }

  ScalarExpr term() {
    ScalarExpr lhs = factor();
    while (tok_.type == Token::Type::Star || tok_.type == Token::Type::Slash) {
      const Kind k = tok_.type == Token::Type::Star ? Kind::Mul : Kind::Div;
      advance();
      lhs = ScalarExpr::binary(k, lhs, factor());
    }
    return lhs;
  }

  ScalarExpr factor() {
    if (tok_.type == Token::Type::Minus) {
      advance();
      return ScalarExpr::neg(factor());
    }
    return power();
  }

  ScalarExpr power() {
    ScalarExpr base = atom();
    if (tok_.type != Token::Type::Caret) return base;
    advance();
    bool negative = false;
    if (tok_.type == Token::Type::Minus) {
      negative = true;
      advance();
    }
    const bool integral =
        tok_.type == Token::Type::Number &&
        std::all_of(tok_.text.begin(), tok_.text.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (!integral) throw ParseError(tok_.offset, "an integer exponent", describe(tok_));
    int value = 0;
    const auto res = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), value);
    if (res.ec != std::errc{}) throw ParseError(tok_.offset, "an integer exponent", describe(tok_));
    advance();
    return ScalarExpr::pow(base, negative ? -value : value);
  }

  ScalarExpr atom() {
    switch (tok_.type) {
      case Token::Type::Number: {
        double value = 0.0;
        const std::string text(tok_.text);
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
          throw ParseError(tok_.offset, "a representable number", describe(tok_));
        advance();
        return ScalarExpr::number(value);
      }
      case Token::Type::Ident: {
        const Token name = tok_;
        advance();
        const auto fn = lookup_function(name.text);
        if (tok_.type == Token::Type::LParen) {
          if (!fn)
            throw ParseError(name.offset, "one of sin, cos, exp, log, sqrt", describe(name));
          advance();
          ScalarExpr arg = expr();
          expect_rparen();
          return ScalarExpr::call(*fn, arg);
        }
        if (fn) throw ParseError(tok_.offset, "'(' after function name", describe(tok_));
        return ScalarExpr::ident(std::string(name.text));
      }
      case Token::Type::LParen: {
        advance();
        ScalarExpr inner = expr();
        expect_rparen();
        return inner;
      }
      default:
        throw ParseError(tok_.offset, "a number, identifier or '('", describe(tok_));
    }
  }

  void expect_rparen() {
    if (tok_.type != Token::Type::RParen) throw ParseError(tok_.offset, "')'", describe(tok_));
    advance();
  }

  Lexer lexer_;
  Token tok_{Token::Type::End, 0, {}};
};

bool nodes_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Number: return a->number == b->number;
    case Kind::Ident: return a->name == b->name;
    case Kind::Pow: return a->exponent == b->exponent && nodes_equal(a->lhs.get(), b->lhs.get());
    case Kind::Func:
      return a->function == b->function && nodes_equal(a->lhs.get(), b->lhs.get());
    case Kind::Neg: return nodes_equal(a->lhs.get(), b->lhs.get());
    default:
      return nodes_equal(a->lhs.get(), b->lhs.get()) && nodes_equal(a->rhs.get(), b->rhs.get());
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number:
      if (std::signbit(n.number)) {
        out += "(-" + format_number(-n.number) + ")";
      } else {
        out += format_number(n.number);
      }
      return;
    case Kind::Ident: out += n.name; return;
    case Kind::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case Kind::Pow: {
      const bool wrap = n.lhs->kind == Kind::Pow;
      if (wrap) out += "(";
      print_node(*n.lhs, out);
      if (wrap) out += ")";
      out += "^" + std::to_string(n.exponent);
      return;
    }
    case Kind::Func:
      out += function_name(n.function);
      out += "(";
      print_node(*n.lhs, out);
      out += ")";
      return;
    default: {
      const char* op = n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - "
                       : n.kind == Kind::Mul ? " * " : " / ";
      out += "(";
      print_node(*n.lhs, out);
      out += op;
      print_node(*n.rhs, out);
      out += ")";
      return;
    }
  }
}

void collect(const Node& n, std::set<std::string>& out) {
  if (n.kind == Kind::Ident) out.insert(n.name);
  if (n.lhs) collect(*n.lhs, out);
  if (n.rhs) collect(*n.rhs, out);
}

using Instr = BoundExpr::Instr;

void compile(const Node& n, std::span<const std::string> coordinates, const ParamMap& params,
             std::vector<Instr>& program) {
  switch (n.kind) {
    case Kind::Number: program.push_back({Instr::Op::Const, n.number}); return;
    case Kind::Ident: {
      const auto it = std::find(coordinates.begin(), coordinates.end(), n.name);
      if (it != coordinates.end()) {
        program.push_back({Instr::Op::Var, 0.0, static_cast<int>(it - coordinates.begin())});
        return;
      }
      const auto p = params.find(n.name);
      if (p == params.end())
        throw BindError("identifier '" + n.name + "' is neither a coordinate nor a parameter");
      program.push_back({Instr::Op::Const, p->second});
      return;
    }
    case Kind::Neg:
      compile(*n.lhs, coordinates, params, program);
      program.push_back({Instr::Op::Neg});
      return;
    case Kind::Pow:
      compile(*n.lhs, coordinates, params, program);
      program.push_back({Instr::Op::Pow, 0.0, n.exponent});
      return;
    case Kind::Func:
      compile(*n.lhs, coordinates, params, program);
      program.push_back({Instr::Op::Func, 0.0, 0, n.function});
      return;
    default: {
      compile(*n.lhs, coordinates, params, program);
      compile(*n.rhs, coordinates, params, program);
      const auto op = n.kind == Kind::Add ? Instr::Op::Add : n.kind == Kind::Sub ? Instr::Op::Sub
                      : n.kind == Kind::Mul ? Instr::Op::Mul : Instr::Op::Div;
      program.push_back({op});
      return;
    }
  }
}

// Scalar kernels sharing error semantics with the jet versions.
double reciprocal(double x) {
  if (x == 0.0) throw SingularPointError("division by zero");
  return 1.0 / x;
}
double pow(double x, int e) {
  if (e < 0) return std::pow(reciprocal(x), -e);
  return std::pow(x, e);
}
double exp(double x) { return std::exp(x); }
double log(double x) {
  if (!(x > 0.0)) throw DomainError("log of a nonpositive value");
  return std::log(x);
}
double sqrt(double x) {
  if (!(x > 0.0)) throw DomainError("sqrt of a nonpositive value");
  return std::sqrt(x);
}
double sin(double x) { return std::sin(x); }
double cos(double x) { return std::cos(x); }

template <typename T, typename MakeConst>
T run(const std::vector<Instr>& program, std::span<const T> args, MakeConst make_const) {
  std::vector<T> stack;
  stack.reserve(8);
  for (const auto& in : program) {
    switch (in.op) {
      case Instr::Op::Const: stack.push_back(make_const(in.value)); break;
      case Instr::Op::Var: stack.push_back(args[in.index]); break;
      case Instr::Op::Neg: stack.back() = -stack.back(); break;
      case Instr::Op::Pow: stack.back() = pow(stack.back(), in.index); break;
      case Instr::Op::Func: {
        T& x = stack.back();
        switch (in.function) {
          case Function::Sin: x = sin(x); break;
          case Function::Cos: x = cos(x); break;
          case Function::Exp: x = exp(x); break;
          case Function::Log: x = log(x); break;
          case Function::Sqrt: x = sqrt(x); break;
        }
        break;
      }
      default: {
        T rhs = std::move(stack.back());
        stack.pop_back();
        T& lhs = stack.back();
        switch (in.op) {
          case Instr::Op::Add: lhs = lhs + rhs; break;
          case Instr::Op::Sub: lhs = lhs - rhs; break;
          case Instr::Op::Mul: lhs = lhs * rhs; break;
          default: lhs = lhs * reciprocal(rhs); break;
        }
      }
    }
  }
  return std::move(stack.back());
}

}  // namespace

// --- ScalarExpr --------------------------------------------------------------

ScalarExpr ScalarExpr::number(double value) {
  Node n;
  n.number = value;
  return ScalarExpr(std::make_shared<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::ident(std::string name) {
  Node n;
  n.kind = Kind::Ident;
  n.name = std::move(name);
  return ScalarExpr(std::make_shared<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::binary(Kind kind, const ScalarExpr& lhs, const ScalarExpr& rhs) {
  Node n;
  n.kind = kind;
  n.lhs = lhs.root_;
  n.rhs = rhs.root_;
  return ScalarExpr(std::make_shared<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::neg(const ScalarExpr& operand) {
  Node n;
  n.kind = Kind::Neg;
  n.lhs = operand.root_;
  return ScalarExpr(std::make_shared<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::pow(const ScalarExpr& base, int exponent) {
  Node n;
  n.kind = Kind::Pow;
  n.exponent = exponent;
  n.lhs = base.root_;
  return ScalarExpr(std::make_shared<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::call(Function function, const ScalarExpr& argument) {
  Node n;
  n.kind = Kind::Func;
  n.function = function;
  n.lhs = argument.root_;
  return ScalarExpr(std::make_shared<const Node>(std::move(n)));
}

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
  return nodes_equal(a.root_.get(), b.root_.get());
}

std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

ScalarExpr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string print(const ScalarExpr& expr) {
  std::string out;
  if (!expr.empty()) print_node(expr.root(), out);
  return out;
}

std::set<std::string> identifiers(const ScalarExpr& expr) {
  std::set<std::string> out;
  if (!expr.empty()) collect(expr.root(), out);
  return out;
}

// --- BoundExpr -----------------------------------------------------------------

BoundExpr::BoundExpr(const ScalarExpr& expr, std::span<const std::string> coordinates,
                     const ParamMap& params)
    : arity_(coordinates.size()) {
  if (expr.empty()) throw BindError("empty expression");
  compile(expr.root(), coordinates, params, program_);
}

double BoundExpr::eval(std::span<const double> args) const {
  if (args.size() != arity_) throw std::invalid_argument("argument count mismatch");
  return run<double>(program_, args, [](double v) { return v; });
}

Jet BoundExpr::eval(std::span<const Jet> args) const {
  if (args.size() != arity_ || args.empty())
    throw std::invalid_argument("argument count mismatch");
  const auto& table = args.front().table();
  for (const auto& a : args)
    if (a.table() != table) throw std::invalid_argument("input jets differ in dimension/order");
  return run<Jet>(program_, args, [&](double v) { return Jet(table, v); });
}

Jet eval_jet(const ScalarExpr& expr, const std::map<std::string, Jet>& assignment,
             const ParamMap& params) {
  std::vector<std::string> names;
  std::vector<Jet> args;
  for (const auto& [name, jet] : assignment) {
    names.push_back(name);
    args.push_back(jet);
  }
  return BoundExpr(expr, names, params).eval(std::span<const Jet>(args));
}

}  // namespace nilkill
