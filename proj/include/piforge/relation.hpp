#pragma once

// Relation expressions over dimensioned variables: parsing, printing,
// dimensional type checking and evaluation.
//
//   or_expr  := and_expr ("or" and_expr)*
//   and_expr := not_expr ("and" not_expr)*
//   not_expr := "not" not_expr | cmp_expr
//   cmp_expr := add_expr (("=" | "==" | "!=" | "<" | "<=" | ">" | ">=") add_expr)?
//   add_expr := mul_expr (("+" | "-") mul_expr)*
//   mul_expr := unary (("*" | "/") unary)*
//   unary    := "-" unary | pow_expr
//   pow_expr := primary ("^" rat)*
//   primary  := number ("[" unit-expr "]")? | "pi" | "true" | "false"
//             | func "(" or_expr ")" | name | "(" or_expr ")"
//   func     := exp | log | sin | cos | sqrt | is_pos_int
//
// Numbers are dimensionless unless they carry a bracketed unit, in which
// case they denote a fixed quantity from the registry.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "piforge/core.hpp"
#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"
#include "piforge/units.hpp"

namespace piforge::dsl {

enum class Op { Var, Const, Bool, Add, Sub, Mul, Div, Neg, Pow, Func, Cmp, And, Or, Not };
enum class Func { Exp, Log, Sin, Cos, Sqrt, IsPosInt };
enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  std::string name;           // Var
  std::string literal;        // Const: "pi" or the decimal as printed
  std::string unit_text;      // Const: bracketed unit, empty when dimensionless
  double log_value = 0.0;     // Const: log of the magnitude (constants are positive)
  std::optional<DimVector> const_dim;  // Const with a unit
  bool truth = false;         // Bool
  Rational exponent;          // Pow
  Func func = Func::Exp;      // Func
  Cmp cmp = Cmp::Eq;          // Cmp
  NodePtr lhs, rhs;           // operands; unary ops use lhs
};

inline std::string_view func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sqrt: return "sqrt";
    case Func::IsPosInt: return "is_pos_int";
  }
  return "?";
}

inline std::string_view cmp_symbol(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Construction helpers

inline NodePtr make_var(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->name = std::move(name);
  return n;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline NodePtr make_number(double v) {
  if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorKind::SyntaxError, "numeric literals must be finite and >= 0");
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->literal = format_number(v);
  n->log_value = v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  return n;
}

inline NodePtr make_pi() {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->literal = "pi";
  n->log_value = std::log(std::numbers::pi);
  return n;
}

inline NodePtr make_bool(bool v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Bool;
  n->truth = v;
  return n;
}

inline NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

inline NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

inline NodePtr make_pow(NodePtr base, Rational e) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->lhs = std::move(base);
  n->exponent = std::move(e);
  return n;
}

inline NodePtr make_func(Func f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::Func;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

inline NodePtr make_cmp(Cmp c, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = Op::Cmp;
  n->cmp = c;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

enum class Tok { End, Number, Name, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", pos_});
        return out;
      }
      const std::size_t start = pos_;
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < text_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
          std::size_t save = pos_++;
          if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
          if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
          } else {
            pos_ = save;
          }
        }
        out.push_back({Tok::Number, std::string(text_.substr(start, pos_ - start)), start});
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        out.push_back({Tok::Name, std::string(text_.substr(start, pos_ - start)), start});
      } else {
        static constexpr std::string_view two[] = {"<=", ">=", "==", "!="};
        bool matched = false;
        for (auto t : two)
          if (text_.substr(pos_, 2) == t) {
            out.push_back({Tok::Punct, std::string(t), start});
            pos_ += 2;
            matched = true;
            break;
          }
        if (matched) continue;
        // UTF-8 for the two comparison symbols people tend to paste in.
        if (text_.substr(pos_, 3) == "\xE2\x89\xA4" || text_.substr(pos_, 3) == "\xE2\x89\xA5") {
          out.push_back({Tok::Punct, text_[pos_ + 2] == '\xA4' ? "<=" : ">=", start});
          pos_ += 3;
          continue;
        }
        if (std::string_view("+-*/^()[]=<>").find(c) == std::string_view::npos)
          throw Error(ErrorKind::SyntaxError, "unexpected character '" + std::string(1, c) + "' at offset " +
                                                  std::to_string(pos_));
        out.push_back({Tok::Punct, std::string(1, c), start});
        ++pos_;
      }
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {"and", "or", "not", "true", "false", "pi",
                                                "exp", "log", "sin", "cos", "sqrt", "is_pos_int"};
  return kw.count(s) != 0;
}

class Parser {
 public:
  Parser(std::string_view text, const UnitRegistry& registry)
      : text_(text), toks_(Lexer(text).run()), registry_(registry) {}

  NodePtr parse() {
    NodePtr n = or_expr();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError,
                msg + " at offset " + std::to_string(peek().pos) + " in '" + std::string(text_) + "'");
  }

  const Token& peek() const { return toks_[i_]; }
  bool is(std::string_view punct_or_name) const {
    return peek().kind != Tok::End && peek().kind != Tok::Number && peek().text == punct_or_name;
  }
  bool accept(std::string_view s) {
    if (!is(s)) return false;
    ++i_;
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }

  NodePtr or_expr() {
    NodePtr n = and_expr();
    while (peek().kind == Tok::Name && accept("or")) n = make_binary(Op::Or, n, and_expr());
    return n;
  }
  NodePtr and_expr() {
    NodePtr n = not_expr();
    while (peek().kind == Tok::Name && accept("and")) n = make_binary(Op::And, n, not_expr());
    return n;
  }
  NodePtr not_expr() {
    if (peek().kind == Tok::Name && accept("not")) return make_unary(Op::Not, not_expr());
    return cmp_expr();
  }
  NodePtr cmp_expr() {
    NodePtr n = add_expr();
    static const std::pair<std::string_view, Cmp> ops[] = {{"==", Cmp::Eq}, {"=", Cmp::Eq}, {"!=", Cmp::Ne},
                                                           {"<=", Cmp::Le}, {"<", Cmp::Lt},  {">=", Cmp::Ge},
                                                           {">", Cmp::Gt}};
    if (peek().kind == Tok::Punct)
      for (const auto& [sym, c] : ops)
        if (accept(sym)) return make_cmp(c, n, add_expr());
    return n;
  }
  NodePtr add_expr() {
    NodePtr n = mul_expr();
    for (;;) {
      if (peek().kind == Tok::Punct && accept("+"))
        n = make_binary(Op::Add, n, mul_expr());
      else if (peek().kind == Tok::Punct && accept("-"))
        n = make_binary(Op::Sub, n, mul_expr());
      else
        return n;
    }
  }
  NodePtr mul_expr() {
    NodePtr n = unary();
    for (;;) {
      if (peek().kind == Tok::Punct && accept("*"))
        n = make_binary(Op::Mul, n, unary());
      else if (peek().kind == Tok::Punct && accept("/"))
        n = make_binary(Op::Div, n, unary());
      else
        return n;
    }
  }
  NodePtr unary() {
    if (peek().kind == Tok::Punct && accept("-")) return make_unary(Op::Neg, unary());
    return pow_expr();
  }
  NodePtr pow_expr() {
    NodePtr n = primary();
    while (peek().kind == Tok::Punct && accept("^")) n = make_pow(n, rat());
    return n;
  }

  BigInt integer() {
    if (peek().kind != Tok::Number || peek().text.find_first_not_of("0123456789") != std::string::npos)
      fail("expected an integer exponent");
    return BigInt(toks_[i_++].text);
  }

  Rational rat() {
    if (peek().kind == Tok::Punct && accept("(")) {
      bool neg = accept("-");
      BigInt num = integer();
      BigInt den = 1;
      if (accept("/")) den = integer();
      if (den == 0) fail("zero denominator");
      expect(")");
      Rational r(num, den);
      return neg ? Rational(-r) : r;
    }
    bool neg = accept("-");
    Rational r(integer());
    return neg ? Rational(-r) : r;
  }

  NodePtr primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      ++i_;
      const double v = parse_decimal(t.text);
      NodePtr num = make_number(v);
      if (peek().kind == Tok::Punct && accept("[")) {
        // Unit literal: the raw text up to the closing bracket.
        const std::size_t start = toks_[i_ - 1].pos + 1;
        while (peek().kind != Tok::End && !is("]")) ++i_;
        if (!is("]")) fail("expected ']'");
        const std::size_t stop = peek().pos;
        ++i_;
        std::string unit(text_.substr(start, stop - start));
        while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) unit.pop_back();
        while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.front()))) unit.erase(unit.begin());
        if (!(v > 0)) fail("quantity literals must be positive");
        const Quantity u = registry_.unit_expression(unit);
        auto n = std::make_shared<Node>(*num);
        n->unit_text = unit;
        n->log_value = std::log(v) + u.log_magnitude();
        n->const_dim = u.dim();
        return n;
      }
      return num;
    }
    if (t.kind == Tok::Name) {
      ++i_;
      if (t.text == "pi") return make_pi();
      if (t.text == "true") return make_bool(true);
      if (t.text == "false") return make_bool(false);
      static const std::pair<std::string_view, Func> funcs[] = {{"exp", Func::Exp},   {"log", Func::Log},
                                                                {"sin", Func::Sin},   {"cos", Func::Cos},
                                                                {"sqrt", Func::Sqrt}, {"is_pos_int", Func::IsPosInt}};
      for (const auto& [name, f] : funcs)
        if (t.text == name) {
          expect("(");
          NodePtr arg = or_expr();
          expect(")");
          return make_func(f, arg);
        }
      if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'");
      return make_var(t.text);
    }
    if (t.kind == Tok::Punct && accept("(")) {
      NodePtr n = or_expr();
      expect(")");
      return n;
    }
    fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const UnitRegistry& registry_;
};

}  // namespace detail

/// Parses a relation or numeric expression. Unit literals resolve against
/// `registry`.
inline NodePtr parse(std::string_view text, const UnitRegistry& registry) {
  return detail::Parser(text, registry).parse();
}

// ---------------------------------------------------------------------------
// Printing and structure

namespace detail {

inline int precedence(const Node& n) {
  switch (n.op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Cmp: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul:
    case Op::Div: return 6;
    case Op::Neg: return 7;
    case Op::Pow: return 8;
    default: return 9;
  }
}

inline std::string print_rat(const Rational& r) {
  if (denominator(r) == 1) return to_string(r);
  return "(" + to_string(r) + ")";
}

inline std::string print(const Node& n, int min_prec) {
  const int p = precedence(n);
  std::string s;
  switch (n.op) {
    case Op::Var: s = n.name; break;
    case Op::Const: s = n.unit_text.empty() ? n.literal : n.literal + "[" + n.unit_text + "]"; break;
    case Op::Bool: s = n.truth ? "true" : "false"; break;
    case Op::Add: s = print(*n.lhs, p) + " + " + print(*n.rhs, p + 1); break;
    case Op::Sub: s = print(*n.lhs, p) + " - " + print(*n.rhs, p + 1); break;
    case Op::Mul: s = print(*n.lhs, p) + "*" + print(*n.rhs, p + 1); break;
    case Op::Div: s = print(*n.lhs, p) + "/" + print(*n.rhs, p + 1); break;
    case Op::Neg: s = "-" + print(*n.lhs, p); break;
    case Op::Pow: s = print(*n.lhs, p + 1) + "^" + print_rat(n.exponent); break;
    case Op::Func: s = std::string(func_name(n.func)) + "(" + print(*n.lhs, 0) + ")"; break;
    case Op::Cmp:
      s = print(*n.lhs, p + 1) + " " + std::string(cmp_symbol(n.cmp)) + " " + print(*n.rhs, p + 1);
      break;
    case Op::And: s = print(*n.lhs, p) + " and " + print(*n.rhs, p + 1); break;
    case Op::Or: s = print(*n.lhs, p) + " or " + print(*n.rhs, p + 1); break;
    case Op::Not: s = "not " + print(*n.lhs, p); break;
  }
  return p < min_prec ? "(" + s + ")" : s;
}

}  // namespace detail

inline std::string print(const NodePtr& n) { return detail::print(*n, 0); }

inline bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Var: return a->name == b->name;
    case Op::Const: return a->literal == b->literal && a->unit_text == b->unit_text;
    case Op::Bool: return a->truth == b->truth;
    case Op::Pow: return a->exponent == b->exponent && same_tree(a->lhs, b->lhs);
    case Op::Func: return a->func == b->func && same_tree(a->lhs, b->lhs);
    case Op::Cmp: return a->cmp == b->cmp && same_tree(a->lhs, b->lhs) && same_tree(a->rhs, b->rhs);
    default: return same_tree(a->lhs, b->lhs) && same_tree(a->rhs, b->rhs);
  }
}

inline void collect_variables(const NodePtr& n, std::set<std::string>& out) {
  if (!n) return;
  if (n->op == Op::Var) out.insert(n->name);
  collect_variables(n->lhs, out);
  collect_variables(n->rhs, out);
}

// ---------------------------------------------------------------------------
// Type checking

struct BoolType {
  friend bool operator==(BoolType, BoolType) { return true; }
};
using Type = std::variant<DimVector, BoolType>;
using TypeEnv = std::map<std::string, DimVector, std::less<>>;

/// Raised for dimension clashes and boolean/numeric confusion.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& node, std::string lhs, std::string rhs)
      : Error(ErrorKind::DimensionError, "in '" + node + "': " + lhs + " vs " + rhs),
        node_(node), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

  const std::string& node() const noexcept { return node_; }
  const std::string& lhs() const noexcept { return lhs_; }
  const std::string& rhs() const noexcept { return rhs_; }

 private:
  std::string node_, lhs_, rhs_;
};

inline std::string describe(const Type& t) {
  return std::holds_alternative<BoolType>(t) ? "bool" : std::get<DimVector>(t).to_string();
}

namespace detail {

inline const DimVector& numeric(const Node& n, const Type& t) {
  if (std::holds_alternative<BoolType>(t)) throw DimensionError(print(n, 0), "bool", "a numeric value");
  return std::get<DimVector>(t);
}

inline void require_bool(const Node& n, const Type& t) {
  if (!std::holds_alternative<BoolType>(t)) throw DimensionError(print(n, 0), describe(t), "bool");
}

inline Type typecheck(const Node& n, const TypeEnv& env, const DimSystem& system) {
  switch (n.op) {
    case Op::Var: {
      auto it = env.find(n.name);
      if (it == env.end()) throw Error(ErrorKind::UnknownVariable, "variable '" + n.name + "' is not declared");
      return it->second;
    }
    case Op::Const: return n.const_dim ? *n.const_dim : DimVector::zero(system);
    case Op::Bool: return BoolType{};
    case Op::Add:
    case Op::Sub:
    case Op::Cmp: {
      const auto a = typecheck(*n.lhs, env, system);
      const auto b = typecheck(*n.rhs, env, system);
      const DimVector& da = numeric(*n.lhs, a);
      const DimVector& db = numeric(*n.rhs, b);
      if (!(da == db)) throw DimensionError(print(n, 0), da.to_string(), db.to_string());
      if (n.op == Op::Cmp) return BoolType{};
      return da;
    }
    case Op::Mul:
    case Op::Div: {
      const auto a = typecheck(*n.lhs, env, system);
      const auto b = typecheck(*n.rhs, env, system);
      const DimVector& da = numeric(*n.lhs, a);
      const DimVector& db = numeric(*n.rhs, b);
      return n.op == Op::Mul ? da + db : da - db;
    }
    case Op::Neg: return numeric(*n.lhs, typecheck(*n.lhs, env, system));
    case Op::Pow: return numeric(*n.lhs, typecheck(*n.lhs, env, system)) * n.exponent;
    case Op::Func: {
      const auto a = typecheck(*n.lhs, env, system);
      const DimVector& da = numeric(*n.lhs, a);
      if (n.func == Func::Sqrt) return da * Rational(1, 2);
      if (!da.is_zero()) throw DimensionError(print(n, 0), da.to_string(), "1");
      if (n.func == Func::IsPosInt) return BoolType{};
      return da;
    }
    case Op::And:
    case Op::Or:
      require_bool(*n.lhs, typecheck(*n.lhs, env, system));
      require_bool(*n.rhs, typecheck(*n.rhs, env, system));
      return BoolType{};
    case Op::Not: require_bool(*n.lhs, typecheck(*n.lhs, env, system)); return BoolType{};
  }
  throw Error(ErrorKind::SpecError, "unknown node");
}

}  // namespace detail

/// Dimension of a numeric expression, or BoolType for predicates. Addition,
/// subtraction and comparison demand identical operand dimensions;
/// transcendental functions and is_pos_int demand dimensionless arguments.
inline Type typecheck(const NodePtr& expr, const TypeEnv& env, const DimSystem& system) {
  return detail::typecheck(*expr, env, system);
}

// ---------------------------------------------------------------------------
// Evaluation

/// Real value kept as sign and log of the absolute value, so products of
/// widely scaled quantities never overflow. A NaN log marks an undefined
/// result (e.g. log of a negative number); comparisons with it are false.
struct Scalar {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();
  DimVector dim;

  static Scalar from_linear(double v, DimVector dim) {
    if (std::isnan(v)) return undefined(std::move(dim));
    if (v == 0) return {0, -std::numeric_limits<double>::infinity(), std::move(dim)};
    return {v > 0 ? 1 : -1, std::log(std::abs(v)), std::move(dim)};
  }
  static Scalar undefined(DimVector dim) { return {1, std::numeric_limits<double>::quiet_NaN(), std::move(dim)}; }

  bool is_undefined() const { return std::isnan(log_abs); }
  double linear() const {
    if (is_undefined()) return std::numeric_limits<double>::quiet_NaN();
    return sign == 0 ? 0.0 : sign * std::exp(log_abs);
  }
};

using Value = std::variant<Scalar, bool>;
using Bindings = std::map<std::string, Quantity, std::less<>>;

struct EvalOptions {
  double tol = kDefaultTolerance;
};

/// |a - b| <= tol * max(|a|, |b|), evaluated without leaving log space.
inline bool approx_equal(const Scalar& a, const Scalar& b, double tol) {
  if (a.is_undefined() || b.is_undefined()) return false;
  if (a.sign != b.sign) return false;
  if (a.sign == 0) return true;
  return -std::expm1(-std::abs(a.log_abs - b.log_abs)) <= tol;
}

inline bool less_than(const Scalar& a, const Scalar& b) {
  if (a.is_undefined() || b.is_undefined()) return false;
  if (a.sign != b.sign) return a.sign < b.sign;
  if (a.sign == 0) return false;
  return a.sign > 0 ? a.log_abs < b.log_abs : a.log_abs > b.log_abs;
}

namespace detail {

inline Scalar add(const Scalar& a, const Scalar& b, int b_sign_flip) {
  const int sb = b.sign * b_sign_flip;
  if (a.is_undefined() || b.is_undefined()) return Scalar::undefined(a.dim);
  if (sb == 0) return a;
  if (a.sign == 0) return {sb, b.log_abs, a.dim};
  const double m = std::max(a.log_abs, b.log_abs);
  const double sum = a.sign * std::exp(a.log_abs - m) + sb * std::exp(b.log_abs - m);
  if (sum == 0) return {0, -std::numeric_limits<double>::infinity(), a.dim};
  return {sum > 0 ? 1 : -1, m + std::log(std::abs(sum)), a.dim};
}

inline Scalar power(const Scalar& a, const Rational& e, DimVector dim) {
  if (a.is_undefined()) return Scalar::undefined(std::move(dim));
  if (a.sign == 0) {
    if (e > 0) return {0, -std::numeric_limits<double>::infinity(), std::move(dim)};
    return Scalar::undefined(std::move(dim));
  }
  const double la = a.log_abs * to_double(e);
  if (a.sign > 0) return {1, la, std::move(dim)};
  // Real odd roots of negative numbers are defined; even roots are not.
  if (denominator(e) % 2 == 0) return Scalar::undefined(std::move(dim));
  return {numerator(e) % 2 == 0 ? 1 : -1, la, std::move(dim)};
}

struct Evaluator {
  const Bindings& bindings;
  const DimSystem& system;
  EvalOptions opts;

  const Scalar& num(const Value& v) const {
    if (!std::holds_alternative<Scalar>(v)) throw Error(ErrorKind::DimensionError, "boolean used as a number");
    return std::get<Scalar>(v);
  }
  bool truth(const Value& v) const {
    if (!std::holds_alternative<bool>(v)) throw Error(ErrorKind::DimensionError, "number used as a boolean");
    return std::get<bool>(v);
  }

  Value eval(const Node& n) const {
    switch (n.op) {
      case Op::Var: {
        auto it = bindings.find(n.name);
        if (it == bindings.end()) throw Error(ErrorKind::UnknownVariable, "variable '" + n.name + "' is not bound");
        return Scalar{1, it->second.log_magnitude(), it->second.dim()};
      }
      case Op::Const: {
        DimVector d = n.const_dim ? *n.const_dim : DimVector::zero(system);
        if (std::isinf(n.log_value)) return Scalar{0, n.log_value, std::move(d)};
        return Scalar{1, n.log_value, std::move(d)};
      }
      case Op::Bool: return n.truth;
      case Op::Add: return add(num(eval(*n.lhs)), num(eval(*n.rhs)), 1);
      case Op::Sub: return add(num(eval(*n.lhs)), num(eval(*n.rhs)), -1);
      case Op::Mul:
      case Op::Div: {
        const Scalar a = num(eval(*n.lhs));
        const Scalar b = num(eval(*n.rhs));
        DimVector d = n.op == Op::Mul ? a.dim + b.dim : a.dim - b.dim;
        if (a.is_undefined() || b.is_undefined()) return Scalar::undefined(std::move(d));
        if (n.op == Op::Div && b.sign == 0) return Scalar::undefined(std::move(d));
        if (a.sign == 0 || b.sign == 0) return Scalar{0, -std::numeric_limits<double>::infinity(), std::move(d)};
        return Scalar{a.sign * b.sign, n.op == Op::Mul ? a.log_abs + b.log_abs : a.log_abs - b.log_abs, std::move(d)};
      }
      case Op::Neg: {
        Scalar a = num(eval(*n.lhs));
        a.sign = -a.sign;
        return a;
      }
      case Op::Pow: {
        const Scalar a = num(eval(*n.lhs));
        return power(a, n.exponent, a.dim * n.exponent);
      }
      case Op::Func: {
        const Scalar a = num(eval(*n.lhs));
        const double x = a.linear();
        switch (n.func) {
          case Func::Exp:
            if (std::isnan(x)) return Scalar::undefined(a.dim);
            return Scalar{1, x, a.dim};
          case Func::Log:
            if (a.is_undefined() || a.sign <= 0) return Scalar::undefined(a.dim);
            return Scalar::from_linear(a.log_abs, a.dim);
          case Func::Sin: return Scalar::from_linear(std::sin(x), a.dim);
          case Func::Cos: return Scalar::from_linear(std::cos(x), a.dim);
          case Func::Sqrt: return power(a, Rational(1, 2), a.dim * Rational(1, 2));
          case Func::IsPosInt: {
            if (std::isnan(x) || std::isinf(x)) return false;
            const double k = std::round(x);
            return k >= 1 && std::abs(x - k) <= opts.tol;
          }
        }
        throw Error(ErrorKind::SpecError, "unknown function");
      }
      case Op::Cmp: {
        const Scalar a = num(eval(*n.lhs));
        const Scalar b = num(eval(*n.rhs));
        const bool eq = approx_equal(a, b, opts.tol);
        const bool undefined = a.is_undefined() || b.is_undefined();
        switch (n.cmp) {
          case Cmp::Eq: return eq;
          case Cmp::Ne: return !undefined && !eq;
          case Cmp::Lt: return !eq && less_than(a, b);
          case Cmp::Le: return eq || less_than(a, b);
          case Cmp::Gt: return !eq && less_than(b, a);
          case Cmp::Ge: return eq || less_than(b, a);
        }
        throw Error(ErrorKind::SpecError, "unknown comparison");
      }
      case Op::And: return truth(eval(*n.lhs)) && truth(eval(*n.rhs));
      case Op::Or: return truth(eval(*n.lhs)) || truth(eval(*n.rhs));
      case Op::Not: return !truth(eval(*n.lhs));
    }
    throw Error(ErrorKind::SpecError, "unknown node");
  }
};

}  // namespace detail

/// Evaluates a type-checked expression. Products and powers stay in log
/// space; sums and comparisons work on linear values of equal dimension.
inline Value evaluate(const NodePtr& expr, const Bindings& bindings, const DimSystem& system,
                      EvalOptions opts = {}) {
  return detail::Evaluator{bindings, system, opts}.eval(*expr);
}

inline bool evaluate_predicate(const NodePtr& expr, const Bindings& bindings, const DimSystem& system,
                               EvalOptions opts = {}) {
  const Value v = evaluate(expr, bindings, system, opts);
  if (!std::holds_alternative<bool>(v)) throw Error(ErrorKind::DimensionError, "expression is not a predicate");
  return std::get<bool>(v);
}

}  // namespace piforge::dsl
