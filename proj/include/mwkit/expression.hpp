#pragma once

// Arithmetic expressions for config numbers and sampled functions:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('+' | '-') factor | power
//   power  := atom ('^' factor)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
// Names: x y z (point coordinates), pi; functions: sqrt abs sin cos exp min max.

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mwkit/error.hpp"
#include "mwkit/geometry.hpp"

namespace mwkit {

class Expression {
 public:
  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    Expression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    e.text_ = text;
    return e;
  }

  double operator()(const Point& p) const { return root_->eval(p); }
  double value() const { return root_->eval(Point(0)); }
  bool uses_point() const { return root_->uses_point(); }
  const std::string& text() const noexcept { return text_; }

 private:
  struct Node {
    virtual ~Node() = default;
    virtual double eval(const Point& p) const = 0;
    virtual bool uses_point() const = 0;
  };
  using Ptr = std::shared_ptr<const Node>;

  struct Number : Node {
    double v;
    explicit Number(double x) : v(x) {}
    double eval(const Point&) const override { return v; }
    bool uses_point() const override { return false; }
  };
  struct Coordinate : Node {
    int axis;
    explicit Coordinate(int a) : axis(a) {}
    double eval(const Point& p) const override {
      if (axis >= p.dim) throw Error(ErrorCode::DimensionMismatch, "expression uses a coordinate the point lacks");
      return p[axis];
    }
    bool uses_point() const override { return true; }
  };
  struct Apply : Node {
    std::function<double(double, double)> fn;
    Ptr a, b;
    Apply(std::function<double(double, double)> f, Ptr x, Ptr y) : fn(std::move(f)), a(std::move(x)), b(std::move(y)) {}
    double eval(const Point& p) const override { return fn(a->eval(p), b ? b->eval(p) : 0.0); }
    bool uses_point() const override { return a->uses_point() || (b && b->uses_point()); }
  };

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorCode::ParseError, "expression '" + s + "' column " + std::to_string(pos + 1) + ": " + what);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Ptr expr() {
      Ptr left = term();
      while (true) {
        if (eat('+')) {
          left = std::make_shared<Apply>(std::plus<>(), left, term());
        } else if (eat('-')) {
          left = std::make_shared<Apply>(std::minus<>(), left, term());
        } else {
          return left;
        }
      }
    }
    Ptr term() {
      Ptr left = factor();
      while (true) {
        if (eat('*')) {
          left = std::make_shared<Apply>(std::multiplies<>(), left, factor());
        } else if (eat('/')) {
          left = std::make_shared<Apply>(std::divides<>(), left, factor());
        } else {
          return left;
        }
      }
    }
    Ptr factor() {
      if (eat('-')) return std::make_shared<Apply>([](double a, double) { return -a; }, factor(), nullptr);
      if (eat('+')) return factor();
      return power();
    }
    Ptr power() {
      Ptr base = atom();
      if (eat('^')) return std::make_shared<Apply>([](double a, double b) { return std::pow(a, b); }, base, factor());
      return base;
    }
    Ptr atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        Ptr inner = expr();
        if (!eat(')')) fail("missing ')'");
        return inner;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos += used;
        return std::make_shared<Number>(v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "x") return std::make_shared<Coordinate>(0);
        if (name == "y") return std::make_shared<Coordinate>(1);
        if (name == "z") return std::make_shared<Coordinate>(2);
        if (name == "pi") return std::make_shared<Number>(std::acos(-1.0));
        if (!eat('(')) fail("unknown name '" + name + "'");
        Ptr a = expr();
        Ptr b;
        if (eat(',')) b = expr();
        if (!eat(')')) fail("missing ')' after arguments of " + name);
        auto unary = [&](double (*f)(double)) -> Ptr {
          if (b) fail(name + " takes one argument");
          return std::make_shared<Apply>([f](double x, double) { return f(x); }, a, nullptr);
        };
        if (name == "sqrt") return unary([](double x) { return std::sqrt(x); });
        if (name == "abs") return unary([](double x) { return std::abs(x); });
        if (name == "sin") return unary([](double x) { return std::sin(x); });
        if (name == "cos") return unary([](double x) { return std::cos(x); });
        if (name == "exp") return unary([](double x) { return std::exp(x); });
        if ((name == "min" || name == "max") && b) {
          if (name == "min") return std::make_shared<Apply>([](double x, double y) { return std::min(x, y); }, a, b);
          return std::make_shared<Apply>([](double x, double y) { return std::max(x, y); }, a, b);
        }
        fail("unknown function '" + name + "'");
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  Ptr root_;
  std::string text_;
};

/// Parses a constant expression such as "1/3" or "sqrt(3)/4".
inline double parse_number(const std::string& text) {
  const Expression e = Expression::parse(text);
  if (e.uses_point()) throw Error(ErrorCode::ParseError, "'" + text + "' is not a constant");
  return e.value();
}

}  // namespace mwkit
