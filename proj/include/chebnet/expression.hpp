#pragma once

// Tiny arithmetic expressions in one variable x, for ad-hoc target functions.
//
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := ('+' | '-') unary | power
//   power := atom ('^' unary)?          right-associative, binds tighter than unary minus
//   atom  := number | x | pi | e | (exp | sin | cos) '(' expr ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include "chebnet/error.hpp"
#include "chebnet/trainer.hpp"

namespace chebnet {

namespace detail {

class ExpressionParser {
 public:
  using Fn = std::function<double(double)>;

  explicit ExpressionParser(std::string text) : text_(std::move(text)) {}

  Fn parse() {
    Fn f = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("expression '" + text_ + "' at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = [a = lhs, b = term()](double x) { return a(x) + b(x); };
      } else if (accept('-')) {
        lhs = [a = lhs, b = term()](double x) { return a(x) - b(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn term() {
    Fn lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = [a = lhs, b = unary()](double x) { return a(x) * b(x); };
      } else if (accept('/')) {
        lhs = [a = lhs, b = unary()](double x) { return a(x) / b(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn unary() {
    if (accept('-')) return [a = unary()](double x) { return -a(x); };
    if (accept('+')) return unary();
    return power();
  }

  Fn power() {
    Fn base = atom();
    if (accept('^')) {
      Fn ex = unary();
      return [base, ex](double x) { return std::pow(base(x), ex(x)); };
    }
    return base;
  }

  Fn atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Fn inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return [v](double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "x") return [](double x) { return x; };
      if (name == "pi") return [](double) { return std::numbers::pi; };
      if (name == "e") return [](double) { return std::numbers::e; };
      double (*fn)(double) = nullptr;
      if (name == "exp") fn = [](double v) { return std::exp(v); };
      if (name == "sin") fn = [](double v) { return std::sin(v); };
      if (name == "cos") fn = [](double v) { return std::cos(v); };
      if (fn == nullptr) {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      Fn arg = expr();
      if (!accept(')')) fail("expected ')'");
      return [fn, arg](double x) { return fn(arg(x)); };
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace detail

inline std::function<double(double)> parse_expression(const std::string& text) {
  return detail::ExpressionParser(text).parse();
}

/// "f1" / "f2" or an inline expression in x.
inline std::function<double(double)> resolve_function(const std::string& spec) {
  if (spec == "f1" || spec == "f2") return test_function(spec);
  return parse_expression(spec);
}

}  // namespace chebnet
