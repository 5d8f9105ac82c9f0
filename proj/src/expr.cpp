#include "basinlab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace basinlab {

namespace {

std::string with_offset(std::size_t offset, const std::string& message) {
  return message + " (offset " + std::to_string(offset) + ")";
}

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error(with_offset(offset, message)), offset_(offset) {}

EvalError::EvalError(std::size_t offset, const std::string& message)
    : FieldDomainError(with_offset(offset, message)), offset_(offset) {}

namespace {

constexpr const char* kAllowedNames = "x, y, pi, sin, cos, tan, exp, log, sqrt, abs";

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind = Kind::End;
  double number = 0.0;
  std::string ident;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token tok;
    tok.offset = pos_;
    if (pos_ >= src_.size()) {
      tok.kind = Token::Kind::End;
      return tok;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok.kind = Token::Kind::Plus; ++pos_; return tok;
      case '-': tok.kind = Token::Kind::Minus; ++pos_; return tok;
      case '*': tok.kind = Token::Kind::Star; ++pos_; return tok;
      case '/': tok.kind = Token::Kind::Slash; ++pos_; return tok;
      case '^': tok.kind = Token::Kind::Caret; ++pos_; return tok;
      case '(': tok.kind = Token::Kind::LParen; ++pos_; return tok;
      case ')': tok.kind = Token::Kind::RParen; ++pos_; return tok;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      double value = 0.0;
      const char* begin = src_.data() + pos_;
      const char* end = src_.data() + src_.size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc()) throw ParseError(pos_, "invalid number literal");
      tok.kind = Token::Kind::Number;
      tok.number = value;
      pos_ += static_cast<std::size_t>(ptr - begin);
      return tok;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      tok.kind = Token::Kind::Ident;
      tok.ident.assign(src_.substr(pos_, end - pos_));
      pos_ = end;
      return tok;
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

std::unique_ptr<Expr> make_number(double v, std::size_t offset) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Number;
  e->number = v;
  e->offset = offset;
  return e;
}

std::unique_ptr<Expr> make_leaf(Expr::Kind kind, std::size_t offset) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->offset = offset;
  return e;
}

std::unique_ptr<Expr> make_unary(Expr::Fn fn, std::unique_ptr<Expr> a, std::size_t offset) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Unary;
  e->fn = fn;
  e->a = std::move(a);
  e->offset = offset;
  return e;
}

std::unique_ptr<Expr> make_binary(Expr::Op op, std::unique_ptr<Expr> a, std::unique_ptr<Expr> b,
                                  std::size_t offset) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Binary;
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  e->offset = offset;
  return e;
}

bool lookup_function(const std::string& name, Expr::Fn& out) {
  static const std::array<std::pair<const char*, Expr::Fn>, 7> table{{
      {"sin", Expr::Fn::Sin},
      {"cos", Expr::Fn::Cos},
      {"tan", Expr::Fn::Tan},
      {"exp", Expr::Fn::Exp},
      {"log", Expr::Fn::Log},
      {"sqrt", Expr::Fn::Sqrt},
      {"abs", Expr::Fn::Abs},
  }};
  for (const auto& [fname, fn] : table) {
    if (name == fname) {
      out = fn;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view source) : lex_(source) { advance(); }

  std::unique_ptr<Expr> run() {
    auto e = parse_expr();
    if (cur_.kind != Token::Kind::End) throw unexpected(cur_);
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  ParseError unexpected(const Token& tok) const {
    switch (tok.kind) {
      case Token::Kind::Number:
      case Token::Kind::Ident:
      case Token::Kind::LParen:
        return ParseError(tok.offset,
                          "unexpected value; implicit multiplication is not supported, "
                          "write it with '*'");
      case Token::Kind::End:
        return ParseError(tok.offset, "unexpected end of input");
      default:
        return ParseError(tok.offset, "unexpected operator");
    }
  }

  std::unique_ptr<Expr> parse_expr() {
    auto node = parse_term();
    while (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
      const auto op = cur_.kind == Token::Kind::Plus ? Expr::Op::Add : Expr::Op::Sub;
      const std::size_t offset = cur_.offset;
      advance();
      node = make_binary(op, std::move(node), parse_term(), offset);
    }
    return node;
  }

  std::unique_ptr<Expr> parse_term() {
    auto node = parse_factor();
    while (cur_.kind == Token::Kind::Star || cur_.kind == Token::Kind::Slash) {
      const auto op = cur_.kind == Token::Kind::Star ? Expr::Op::Mul : Expr::Op::Div;
      const std::size_t offset = cur_.offset;
      advance();
      node = make_binary(op, std::move(node), parse_factor(), offset);
    }
    return node;
  }

  // factor handles unary minus, which binds looser than '^'
  std::unique_ptr<Expr> parse_factor() {
    if (cur_.kind == Token::Kind::Minus) {
      const std::size_t offset = cur_.offset;
      advance();
      return make_unary(Expr::Fn::Neg, parse_factor(), offset);
    }
    return parse_power();
  }

  std::unique_ptr<Expr> parse_power() {
    auto base = parse_atom();
    if (cur_.kind == Token::Kind::Caret) {
      const std::size_t offset = cur_.offset;
      advance();
      return make_binary(Expr::Op::Pow, std::move(base), parse_factor(), offset);
    }
    return base;
  }

  std::unique_ptr<Expr> parse_atom() {
    switch (cur_.kind) {
      case Token::Kind::Number: {
        auto e = make_number(cur_.number, cur_.offset);
        advance();
        return e;
      }
      case Token::Kind::Ident: {
        const Token tok = cur_;
        advance();
        if (tok.ident == "pi") return make_leaf(Expr::Kind::Pi, tok.offset);
        if (tok.ident == "x") return make_leaf(Expr::Kind::VarX, tok.offset);
        if (tok.ident == "y") return make_leaf(Expr::Kind::VarY, tok.offset);
        Expr::Fn fn;
        if (lookup_function(tok.ident, fn)) {
          if (cur_.kind != Token::Kind::LParen) {
            throw ParseError(cur_.offset,
                             "expected '(' after function name '" + tok.ident + "'");
          }
          advance();
          auto arg = parse_expr();
          if (cur_.kind != Token::Kind::RParen) {
            throw ParseError(cur_.offset, "expected ')'");
          }
          advance();
          return make_unary(fn, std::move(arg), tok.offset);
        }
        throw ParseError(tok.offset, "unknown identifier '" + tok.ident +
                                         "'; allowed names: " + kAllowedNames);
      }
      case Token::Kind::LParen: {
        advance();
        auto e = parse_expr();
        if (cur_.kind != Token::Kind::RParen) {
          throw ParseError(cur_.offset, "expected ')'");
        }
        advance();
        return e;
      }
      default:
        throw ParseError(cur_.offset, "expected a number, a name, or '('");
    }
  }

  Lexer lex_;
  Token cur_;
};

// ---- evaluation ----

struct Dual {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

double ipow(double base, long long n) {
  if (n < 0) return 1.0 / ipow(base, -n);
  double r = 1.0;
  double p = base;
  while (n > 0) {
    if (n & 1) r *= p;
    p *= p;
    n >>= 1;
  }
  return r;
}

// The exponent counts as an integer literal when it is a Number node or a
// negated Number node with an integral value.
bool integer_literal_exponent(const Expr& e, long long& out) {
  const Expr* node = &e;
  double sign = 1.0;
  if (node->kind == Expr::Kind::Unary && node->fn == Expr::Fn::Neg &&
      node->a->kind == Expr::Kind::Number) {
    sign = -1.0;
    node = node->a.get();
  }
  if (node->kind != Expr::Kind::Number) return false;
  const double v = sign * node->number;
  if (!(std::abs(v) <= 1e9) || v != std::floor(v)) return false;
  out = static_cast<long long>(v);
  return true;
}

Dual eval_dual(const Expr& e, double x, double y) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return {e.number, 0.0, 0.0};
    case Expr::Kind::Pi:
      return {kPi, 0.0, 0.0};
    case Expr::Kind::VarX:
      return {x, 1.0, 0.0};
    case Expr::Kind::VarY:
      return {y, 0.0, 1.0};
    case Expr::Kind::Unary: {
      const Dual u = eval_dual(*e.a, x, y);
      switch (e.fn) {
        case Expr::Fn::Neg:
          return {-u.v, -u.dx, -u.dy};
        case Expr::Fn::Sin: {
          const double c = std::cos(u.v);
          return {std::sin(u.v), c * u.dx, c * u.dy};
        }
        case Expr::Fn::Cos: {
          const double s = -std::sin(u.v);
          return {std::cos(u.v), s * u.dx, s * u.dy};
        }
        case Expr::Fn::Tan: {
          const double t = std::tan(u.v);
          const double d = 1.0 + t * t;
          return {t, d * u.dx, d * u.dy};
        }
        case Expr::Fn::Exp: {
          const double v = std::exp(u.v);
          return {v, v * u.dx, v * u.dy};
        }
        case Expr::Fn::Log: {
          if (!(u.v > 0.0)) throw EvalError(e.offset, "log of a non-positive value");
          return {std::log(u.v), u.dx / u.v, u.dy / u.v};
        }
        case Expr::Fn::Sqrt: {
          if (u.v < 0.0) throw EvalError(e.offset, "sqrt of a negative value");
          const double s = std::sqrt(u.v);
          const double d = 0.5 / s;  // infinite slope at exactly zero
          return {s, d * u.dx, d * u.dy};
        }
        case Expr::Fn::Abs: {
          const double s = u.v > 0.0 ? 1.0 : (u.v < 0.0 ? -1.0 : 0.0);
          return {std::abs(u.v), s * u.dx, s * u.dy};
        }
      }
      break;
    }
    case Expr::Kind::Binary: {
      const Dual a = eval_dual(*e.a, x, y);
      switch (e.op) {
        case Expr::Op::Add: {
          const Dual b = eval_dual(*e.b, x, y);
          return {a.v + b.v, a.dx + b.dx, a.dy + b.dy};
        }
        case Expr::Op::Sub: {
          const Dual b = eval_dual(*e.b, x, y);
          return {a.v - b.v, a.dx - b.dx, a.dy - b.dy};
        }
        case Expr::Op::Mul: {
          const Dual b = eval_dual(*e.b, x, y);
          return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
        }
        case Expr::Op::Div: {
          const Dual b = eval_dual(*e.b, x, y);
          if (b.v == 0.0) throw EvalError(e.offset, "division by zero");
          const double inv = 1.0 / b.v;
          const double v = a.v * inv;
          return {v, (a.dx - v * b.dx) * inv, (a.dy - v * b.dy) * inv};
        }
        case Expr::Op::Pow: {
          long long n = 0;
          if (integer_literal_exponent(*e.b, n)) {
            if (n == 0) return {1.0, 0.0, 0.0};
            if (a.v == 0.0 && n < 0) {
              throw EvalError(e.offset, "zero raised to a negative power");
            }
            const double v = ipow(a.v, n);
            const double d = static_cast<double>(n) * ipow(a.v, n - 1);
            return {v, d * a.dx, d * a.dy};
          }
          const Dual b = eval_dual(*e.b, x, y);
          if (!(a.v > 0.0)) {
            throw EvalError(e.offset,
                            "power with a non-integer exponent requires a positive base");
          }
          const double la = std::log(a.v);
          const double v = std::pow(a.v, b.v);
          const double dx = v * (b.dx * la + b.v * a.dx / a.v);
          const double dy = v * (b.dy * la + b.v * a.dy / a.v);
          return {v, dx, dy};
        }
      }
      break;
    }
  }
  throw EvalError(e.offset, "malformed expression node");
}

// ---- printing ----

// atoms and function calls: 5, ^: 4, unary minus: 3, * /: 2, + -: 1
int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Unary:
      return e.fn == Expr::Fn::Neg ? 3 : 5;
    case Expr::Kind::Binary:
      switch (e.op) {
        case Expr::Op::Pow: return 4;
        case Expr::Op::Mul:
        case Expr::Op::Div: return 2;
        default: return 1;
      }
    default:
      return 5;
  }
}

const char* fn_name(Expr::Fn fn) {
  switch (fn) {
    case Expr::Fn::Sin: return "sin";
    case Expr::Fn::Cos: return "cos";
    case Expr::Fn::Tan: return "tan";
    case Expr::Fn::Exp: return "exp";
    case Expr::Fn::Log: return "log";
    case Expr::Fn::Sqrt: return "sqrt";
    case Expr::Fn::Abs: return "abs";
    case Expr::Fn::Neg: return "-";
  }
  return "?";
}

void print_rec(const Expr& e, std::string& out) {
  const auto wrapped = [&out](const Expr& child, bool parens) {
    if (parens) out += '(';
    print_rec(child, out);
    if (parens) out += ')';
  };
  switch (e.kind) {
    case Expr::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      out += buf;
      return;
    }
    case Expr::Kind::Pi:
      out += "pi";
      return;
    case Expr::Kind::VarX:
      out += 'x';
      return;
    case Expr::Kind::VarY:
      out += 'y';
      return;
    case Expr::Kind::Unary:
      if (e.fn == Expr::Fn::Neg) {
        out += '-';
        wrapped(*e.a, precedence(*e.a) < 3);
      } else {
        out += fn_name(e.fn);
        out += '(';
        print_rec(*e.a, out);
        out += ')';
      }
      return;
    case Expr::Kind::Binary: {
      const int prec = precedence(e);
      const char* sym = nullptr;
      bool lhs_parens = precedence(*e.a) < prec;
      bool rhs_parens = false;
      switch (e.op) {
        case Expr::Op::Add: sym = "+"; rhs_parens = precedence(*e.b) <= 1; break;
        case Expr::Op::Sub: sym = "-"; rhs_parens = precedence(*e.b) <= 1; break;
        case Expr::Op::Mul: sym = "*"; rhs_parens = precedence(*e.b) <= 2; break;
        case Expr::Op::Div: sym = "/"; rhs_parens = precedence(*e.b) <= 2; break;
        case Expr::Op::Pow:
          sym = "^";
          lhs_parens = precedence(*e.a) <= 4;  // ^ is right associative
          rhs_parens = precedence(*e.b) < 3;   // the exponent slot admits - and ^
          break;
      }
      wrapped(*e.a, lhs_parens);
      out += sym;
      wrapped(*e.b, rhs_parens);
      return;
    }
  }
}

}  // namespace

std::unique_ptr<Expr> parse(std::string_view source) { return Parser(source).run(); }

std::string print_expr(const Expr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number:
      return a.number == b.number;
    case Expr::Kind::Pi:
    case Expr::Kind::VarX:
    case Expr::Kind::VarY:
      return true;
    case Expr::Kind::Unary:
      return a.fn == b.fn && structurally_equal(*a.a, *b.a);
    case Expr::Kind::Binary:
      return a.op == b.op && structurally_equal(*a.a, *b.a) && structurally_equal(*a.b, *b.b);
  }
  return false;
}

FieldSample eval_with_grad(const Expr& e, Point2 p) {
  const Dual d = eval_dual(e, p.x, p.y);
  return {d.v, {d.dx, d.dy}};
}

ExprField::ExprField(std::string_view source) : ast_(parse(source)) {}

ExprField::ExprField(std::unique_ptr<Expr> ast) : ast_(std::move(ast)) {
  if (!ast_) throw std::invalid_argument("ExprField requires a non-null expression");
}

double ExprField::value(Point2 p) const { return eval_dual(*ast_, p.x, p.y).v; }

Point2 ExprField::gradient(Point2 p) const {
  const Dual d = eval_dual(*ast_, p.x, p.y);
  return {d.dx, d.dy};
}

FieldSample ExprField::sample(Point2 p) const { return eval_with_grad(*ast_, p); }

}  // namespace basinlab
