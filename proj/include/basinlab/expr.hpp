#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "basinlab/field.hpp"

namespace basinlab {

// Expression AST over the variables x and y, the constant pi, real literals,
// the binary operators + - * / ^, unary negation, and the functions
// sin cos tan exp log sqrt abs.
struct Expr {
  enum class Kind { Number, Pi, VarX, VarY, Unary, Binary };
  enum class Fn { Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
  enum class Op { Add, Sub, Mul, Div, Pow };

  Kind kind = Kind::Number;
  double number = 0.0;
  Fn fn = Fn::Neg;
  Op op = Op::Add;
  std::unique_ptr<Expr> a;  // unary operand / binary lhs
  std::unique_ptr<Expr> b;  // binary rhs
  std::size_t offset = 0;   // byte offset in the source text
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation failure at a specific AST node (log of a non-positive value,
// division by zero, zero raised to a negative power, ...).
class EvalError : public FieldDomainError {
 public:
  EvalError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Grammar, loosest to tightest: + - then * / (left associative), unary
// minus, then ^ (right associative). Whitespace is ignored. Implicit
// multiplication is rejected.
std::unique_ptr<Expr> parse(std::string_view source);

// Minimally parenthesized text whose re-parse is structurally identical.
std::string print_expr(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

// Forward-mode evaluation with dual numbers seeded (x: dx=1) and (y: dy=1):
// value and both partials in a single pass.
FieldSample eval_with_grad(const Expr& e, Point2 p);

class ExprField final : public ScalarField {
 public:
  explicit ExprField(std::string_view source);
  explicit ExprField(std::unique_ptr<Expr> ast);

  double value(Point2 p) const override;
  Point2 gradient(Point2 p) const override;
  FieldSample sample(Point2 p) const override;

  const Expr& ast() const { return *ast_; }

 private:
  std::unique_ptr<Expr> ast_;
};

}  // namespace basinlab
