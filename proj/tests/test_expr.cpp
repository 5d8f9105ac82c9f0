#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "basinlab/expr.hpp"
#include "basinlab/field.hpp"
#include "basinlab/rng.hpp"
#include "oracles.hpp"

using namespace basinlab;

namespace {

constexpr const char* kPaperExpr = "sin(pi*x)*sin(2*pi*x)*cos(pi*y)*cos(2*pi*y)";

double eval_value(const std::string& src, Point2 p) {
  return eval_with_grad(*parse(src), p).value;
}

// Random expression trees for the autodiff-vs-finite-difference property.
std::unique_ptr<Expr> make_num(double v) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Number;
  e->number = v;
  return e;
}

std::unique_ptr<Expr> random_ast(RngStream& rng, int depth) {
  const auto leaf = [&]() -> std::unique_ptr<Expr> {
    const double u = rng.next_uniform();
    auto e = std::make_unique<Expr>();
    if (u < 0.35) {
      e->kind = Expr::Kind::VarX;
    } else if (u < 0.7) {
      e->kind = Expr::Kind::VarY;
    } else if (u < 0.8) {
      e->kind = Expr::Kind::Pi;
    } else {
      // nonnegative literals; the parser never produces negative Number nodes
      e->kind = Expr::Kind::Number;
      e->number = 2.5 * rng.next_uniform();
    }
    return e;
  };
  if (depth <= 0 || rng.next_uniform() < 0.22) return leaf();

  const double u = rng.next_uniform();
  if (u < 0.52) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    const double o = rng.next_uniform();
    e->op = o < 0.3 ? Expr::Op::Add : o < 0.55 ? Expr::Op::Sub : o < 0.9 ? Expr::Op::Mul
                                                                         : Expr::Op::Div;
    e->a = random_ast(rng, depth - 1);
    e->b = random_ast(rng, depth - 1);
    return e;
  }
  if (u < 0.62) {  // integer power
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = Expr::Op::Pow;
    e->a = random_ast(rng, depth - 1);
    e->b = make_num(rng.next_uniform() < 0.5 ? 2.0 : 3.0);
    return e;
  }
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Unary;
  const double o = rng.next_uniform();
  e->fn = o < 0.3   ? Expr::Fn::Sin
          : o < 0.6 ? Expr::Fn::Cos
          : o < 0.7 ? Expr::Fn::Neg
          : o < 0.8 ? Expr::Fn::Abs
          : o < 0.88 ? Expr::Fn::Sqrt
          : o < 0.96 ? Expr::Fn::Exp
                     : Expr::Fn::Log;
  e->a = random_ast(rng, depth - 1);
  return e;
}

}  // namespace

TEST_CASE("parses leaves, precedence, and associativity") {
  CHECK(parse("x")->kind == Expr::Kind::VarX);
  CHECK(parse("pi")->kind == Expr::Kind::Pi);
  CHECK(eval_value("1+2*3", {0, 0}) == 7.0);
  CHECK(eval_value("2^3^2", {0, 0}) ==
        doctest::Approx(512.0).epsilon(1e-14));   // right associative
  CHECK(eval_value("-2^2", {0, 0}) == -4.0);     // ^ binds tighter than unary minus
  CHECK(eval_value("2^-2", {0, 0}) == 0.25);
  CHECK(eval_value("1-2-3", {0, 0}) == -4.0);
  CHECK(eval_value("8/4/2", {0, 0}) == 1.0);
  CHECK(eval_value("1+2*3^2", {0, 0}) == 19.0);
  CHECK(eval_value("(-2)^3", {0, 0}) == -8.0);
  CHECK(eval_value("(-2)^2", {0, 0}) == 4.0);
  CHECK(eval_value(" sin ( pi * 0.5 ) ", {0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parse errors carry byte offsets and helpful messages") {
  CHECK_THROWS_AS(parse("sin("), ParseError);
  try {
    parse("sin(");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }

  try {
    parse("z+1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(std::string(e.what()).find("allowed names") != std::string::npos);
    CHECK(std::string(e.what()).find("pi") != std::string::npos);
  }

  try {
    parse("2pi");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 1);
    CHECK(std::string(e.what()).find("'*'") != std::string::npos);
  }

  CHECK_THROWS_AS(parse("(1+2"), ParseError);
  CHECK_THROWS_AS(parse("sin x"), ParseError);
  CHECK_THROWS_AS(parse("1 +"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1 @ 2"), ParseError);
}

TEST_CASE("evaluates values and gradients for simple expressions") {
  {
    const FieldSample s = eval_with_grad(*parse("x*y"), {2.0, 3.0});
    CHECK(s.value == 6.0);
    CHECK(s.grad.x == 3.0);
    CHECK(s.grad.y == 2.0);
  }
  {
    const FieldSample s = eval_with_grad(*parse("x^2+y^2"), {1.0, 1.0});
    CHECK(s.value == 2.0);
    CHECK(s.grad.x == 2.0);
    CHECK(s.grad.y == 2.0);
  }
}

TEST_CASE("domain errors identify the failing operation") {
  CHECK_THROWS_AS(eval_value("log(x)", {-1.0, 0.0}), EvalError);
  CHECK_THROWS_AS(eval_value("log(x)", {0.0, 0.0}), EvalError);
  CHECK_THROWS_AS(eval_value("1/x", {0.0, 0.0}), EvalError);
  CHECK_THROWS_AS(eval_value("x^-2", {0.0, 0.0}), EvalError);  // zero to a negative power
  CHECK_THROWS_AS(eval_value("sqrt(x)", {-1.0, 0.0}), EvalError);
  CHECK_THROWS_AS(eval_value("(0-2)^0.5", {0.0, 0.0}), EvalError);
  CHECK(eval_value("x^-2", {-2.0, 0.0}) == 0.25);  // negative base, integer exponent
  CHECK(eval_value("x^0.5", {4.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("parsed paper expression agrees with the builtin field") {
  BuiltinField builtin;
  const ExprField parsed{kPaperExpr};
  RngStream rng(606, 0);
  const Region region;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Point2 p{region.x_min + rng.next_uniform() * region.width(),
                   region.y_min + rng.next_uniform() * region.height()};
    const FieldSample a = parsed.sample(p);
    const FieldSample b = builtin.sample(p);
    worst = std::max({worst, std::abs(a.value - b.value), std::abs(a.grad.x - b.grad.x),
                      std::abs(a.grad.y - b.grad.y)});
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("dual-number gradients match finite differences on random trees") {
  RngStream rng(707, 0);
  int tested_points = 0;
  for (int t = 0; t < 20; ++t) {
    const auto ast = random_ast(rng, 5);
    const ExprField field{print_expr(*ast)};  // also exercises print -> parse
    for (int k = 0; k < 100; ++k) {
      const Point2 p{-1.5 + 3.0 * rng.next_uniform(), -1.5 + 3.0 * rng.next_uniform()};
      FieldSample s;
      Point2 fd, fd2;
      try {
        s = field.sample(p);
        fd = testutil::fd_gradient(field, p, 1e-5);
        fd2 = testutil::fd_gradient(field, p, 2e-5);
      } catch (const EvalError&) {
        continue;  // domain error at or near the point
      }
      if (!std::isfinite(s.value) || !is_finite(s.grad) || !is_finite(fd)) continue;
      if (std::abs(s.value) > 1e3 || norm(s.grad) > 1e3) continue;
      // only trust the oracle where the two difference widths agree
      if (std::abs(fd.x - fd2.x) > 1e-6 || std::abs(fd.y - fd2.y) > 1e-6) continue;
      ++tested_points;
      CHECK(std::abs(s.grad.x - fd.x) < 1e-5);
      CHECK(std::abs(s.grad.y - fd.y) < 1e-5);
    }
  }
  CHECK(tested_points > 500);
}

TEST_CASE("print then re-parse is structurally identical") {
  const std::vector<std::string> corpus{
      kPaperExpr,
      "x",
      "y",
      "pi",
      "1.5",
      "x+y",
      "x-y",
      "x*y",
      "x/y",
      "x^2",
      "x^2+y^2",
      "-x",
      "--x",
      "-(x+y)",
      "-x^2",
      "(-x)^2",
      "2^3^2",
      "2^-3",
      "(x+y)*(x-y)",
      "x-(y-1)",
      "x-y-1",
      "x/(y/2)",
      "x/y/2",
      "x*(y+1)",
      "sin(x)",
      "cos(x*y)",
      "tan(x/2)",
      "exp(-x^2-y^2)",
      "log(x+2)",
      "sqrt(x^2+y^2)",
      "abs(x-y)",
      "sin(cos(x))",
      "sin(x)^2+cos(x)^2",
      "2*pi*x",
      "sin(2*pi*x)*cos(2*pi*y)",
      "1+2+3+4",
      "1-(2-(3-4))",
      "x^(y+1)",
      "x^y",
      "(x^y)^2",
      "0.5*(x+y)",
      "1e-3*x",
      "2.5e2+x",
      "abs(-x)",
      "sqrt(abs(x))",
      "exp(log(x+3))",
      "-(x*y)",
      "-x*y",
      "x*-y",
      "(x+1)/(y+2)",
      "sin(pi*x)^3",
  };
  CHECK(corpus.size() >= 50);
  for (const std::string& src : corpus) {
    CAPTURE(src);
    const auto first = parse(src);
    const auto reparsed = parse(print_expr(*first));
    CHECK(structurally_equal(*first, *reparsed));
  }

  RngStream rng(808, 0);
  for (int t = 0; t < 50; ++t) {
    const auto ast = random_ast(rng, 5);
    const auto reparsed = parse(print_expr(*ast));
    CHECK(structurally_equal(*ast, *reparsed));
  }
}

TEST_CASE("ExprField reports parse failures on construction") {
  CHECK_THROWS_AS(ExprField{"sin(x"}, ParseError);
  CHECK_THROWS_AS(ExprField{"x +* y"}, ParseError);
}
