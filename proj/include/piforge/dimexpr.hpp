#pragma once

// Product/quotient/rational-power expressions over names, shared by
// dimension expressions ("M*T^-2") and unit expressions ("kg*m/s^2").
//
//   expr := term (("*" | "/") term)*
//   term := atom ("^" rat)?
//   atom := name | "1" | "(" expr ")"
//   rat  := ["-"|"+"] int | "(" ["-"] int ["/" int] ")"

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "piforge/core.hpp"
#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"

namespace piforge {

/// Names with their accumulated exponents, in order of first appearance.
/// Names whose exponents cancel are kept with exponent 0.
using FactorList = std::vector<std::pair<std::string, Rational>>;

namespace detail {

inline bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class FactorParser {
 public:
  explicit FactorParser(std::string_view text) : text_(text) {}

  FactorList parse_all() {
    FactorList out = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static void merge(FactorList& into, const FactorList& from, const Rational& scale) {
    for (const auto& [name, e] : from) {
      auto it = std::find_if(into.begin(), into.end(), [&](const auto& p) { return p.first == name; });
      if (it == into.end())
        into.emplace_back(name, e * scale);
      else
        it->second += e * scale;
    }
  }

  FactorList expr() {
    FactorList out = term();
    for (;;) {
      if (accept('*')) {
        merge(out, term(), 1);
      } else if (accept('/')) {
        merge(out, term(), -1);
      } else {
        return out;
      }
    }
  }

  FactorList term() {
    FactorList base = atom();
    if (accept('^')) {
      Rational p = rat();
      FactorList out;
      merge(out, base, p);
      return out;
    }
    return base;
  }

  FactorList atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a name, '1' or '('");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      FactorList inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == '1' && (pos_ + 1 == text_.size() || !is_name_char(text_[pos_ + 1]))) {
      ++pos_;
      return {};
    }
    if (!is_name_start(c)) fail("expected a name, '1' or '('");
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return {{std::string(text_.substr(start, pos_ - start)), Rational(1)}};
  }

  BigInt integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return BigInt(std::string(text_.substr(start, pos_ - start)));
  }

  Rational rat() {
    if (accept('(')) {
      bool neg = accept('-');
      if (!neg) accept('+');
      BigInt num = integer();
      BigInt den = 1;
      if (accept('/')) den = integer();
      if (den == 0) fail("zero denominator");
      if (!accept(')')) fail("expected ')'");
      Rational r(num, den);
      return neg ? Rational(-r) : r;
    }
    bool neg = accept('-');
    if (!neg) accept('+');
    Rational r(integer());
    return neg ? Rational(-r) : r;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FactorList parse_factors(std::string_view text) { return detail::FactorParser(text).parse_all(); }

/// Parses a dimension expression over the fundamental names of `system`.
inline DimVector parse_dimension(std::string_view text, const DimSystem& system) {
  DimVector out = DimVector::zero(system);
  for (const auto& [name, e] : parse_factors(text)) {
    auto idx = system.index_of(name);
    if (!idx) throw Error(ErrorKind::UnknownFundamental, "'" + name + "' is not a fundamental dimension");
    out += DimVector::unit(system, *idx) * e;
  }
  return out;
}

/// Renders a factor list in the same syntax, e.g. "cm^-1*hr*knot".
inline std::string format_factors(const FactorList& factors) {
  std::string out;
  for (const auto& [name, e] : factors) {
    if (e == 0) continue;
    if (!out.empty()) out += '*';
    out += name;
    if (e == 1) continue;
    out += '^';
    out += denominator(e) == 1 ? to_string(e) : "(" + to_string(e) + ")";
  }
  return out.empty() ? "1" : out;
}

}  // namespace piforge
