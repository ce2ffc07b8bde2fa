#ifndef SYMMAX_EXPRLANG_HPP
#define SYMMAX_EXPRLANG_HPP

// Closed-form coefficient expressions in the coordinates x1, x2, x3.
//
//   expr    := term   { ("+" | "-") term }
//   term    := unary  { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]
//   primary := number | "x1" | "x2" | "x3" | "pi"
//            | func "(" expr ")" | "(" expr ")"
//   func    := "sin" | "cos" | "exp" | "sqrt" | "abs"
//   number  := digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//            | "." digits [ exponent ]
//
// "^" is right-associative real exponentiation. Whitespace is ignored.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "symmax/errors.hpp"
#include "symmax/types.hpp"

namespace symmax {

enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { sin, cos, exp, sqrt, abs };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

namespace node {
struct Literal {
  double value;
};
struct Variable {
  int index; // 0, 1, 2 for x1, x2, x3
};
struct Pi {};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Call {
  Function fn;
  NodePtr arg;
};
} // namespace node

struct ExprNode {
  std::variant<node::Literal, node::Variable, node::Pi, node::Negate,
               node::Binary, node::Call>
      value;
};

inline const char *function_name(Function fn) {
  switch (fn) {
  case Function::sin: return "sin";
  case Function::cos: return "cos";
  case Function::exp: return "exp";
  case Function::sqrt: return "sqrt";
  case Function::abs: return "abs";
  }
  return "?";
}

inline char operator_symbol(BinaryOp op) {
  switch (op) {
  case BinaryOp::add: return '+';
  case BinaryOp::sub: return '-';
  case BinaryOp::mul: return '*';
  case BinaryOp::div: return '/';
  case BinaryOp::pow: return '^';
  }
  return '?';
}

namespace detail {

// Binding strength used by both the printer and the precedence tests.
inline int precedence(const ExprNode &n) {
  if (const auto *b = std::get_if<node::Binary>(&n.value)) {
    switch (b->op) {
    case BinaryOp::add:
    case BinaryOp::sub: return 1;
    case BinaryOp::mul:
    case BinaryOp::div: return 2;
    case BinaryOp::pow: return 4;
    }
  }
  if (std::holds_alternative<node::Negate>(n.value))
    return 3;
  return 5;
}

inline std::string format_literal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print(const ExprNode &n, std::string &out) {
  auto child = [&out](const ExprNode &c, bool parens) {
    if (parens)
      out += '(';
    print(c, out);
    if (parens)
      out += ')';
  };
  std::visit(
      [&](const auto &v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, node::Literal>) {
          out += format_literal(v.value);
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          out += 'x';
          out += static_cast<char>('1' + v.index);
        } else if constexpr (std::is_same_v<T, node::Pi>) {
          out += "pi";
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          out += '-';
          child(*v.operand, precedence(*v.operand) < 3);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          const int p = precedence(n);
          if (v.op == BinaryOp::pow) {
            child(*v.lhs, precedence(*v.lhs) <= 4);
            out += '^';
            child(*v.rhs, precedence(*v.rhs) < 3);
          } else {
            child(*v.lhs, precedence(*v.lhs) < p);
            out += ' ';
            out += operator_symbol(v.op);
            out += ' ';
            child(*v.rhs, precedence(*v.rhs) <= p);
          }
        } else {
          out += function_name(v.fn);
          out += '(';
          print(*v.arg, out);
          out += ')';
        }
      },
      n.value);
}

inline bool equal(const ExprNode &a, const ExprNode &b) {
  if (a.value.index() != b.value.index())
    return false;
  return std::visit(
      [&b](const auto &va) -> bool {
        using T = std::decay_t<decltype(va)>;
        const auto &vb = std::get<T>(b.value);
        if constexpr (std::is_same_v<T, node::Literal>)
          return va.value == vb.value;
        else if constexpr (std::is_same_v<T, node::Variable>)
          return va.index == vb.index;
        else if constexpr (std::is_same_v<T, node::Pi>)
          return true;
        else if constexpr (std::is_same_v<T, node::Negate>)
          return equal(*va.operand, *vb.operand);
        else if constexpr (std::is_same_v<T, node::Binary>)
          return va.op == vb.op && equal(*va.lhs, *vb.lhs) &&
                 equal(*va.rhs, *vb.rhs);
        else
          return va.fn == vb.fn && equal(*va.arg, *vb.arg);
      },
      a.value);
}

inline bool uses_variables(const ExprNode &n) {
  return std::visit(
      [](const auto &v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, node::Variable>)
          return true;
        else if constexpr (std::is_same_v<T, node::Negate>)
          return uses_variables(*v.operand);
        else if constexpr (std::is_same_v<T, node::Binary>)
          return uses_variables(*v.lhs) || uses_variables(*v.rhs);
        else if constexpr (std::is_same_v<T, node::Call>)
          return uses_variables(*v.arg);
        else
          return false;
      },
      n.value);
}

// Postfix program evaluated by a small stack machine.
struct Instruction {
  enum class Code { push, var, neg, add, sub, mul, div, pow, call } code;
  double value = 0.0;
  int index = 0;
  Function fn = Function::sin;
  const ExprNode *source = nullptr;
};

inline void compile(const ExprNode &n, std::vector<Instruction> &prog,
                    int &depth, int &max_depth) {
  using Code = Instruction::Code;
  auto push = [&](Instruction ins) {
    prog.push_back(ins);
    if (ins.code == Code::push || ins.code == Code::var) {
      ++depth;
      max_depth = std::max(max_depth, depth);
    } else if (ins.code != Code::neg && ins.code != Code::call) {
      --depth;
    }
  };
  std::visit(
      [&](const auto &v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, node::Literal>) {
          push({Code::push, v.value, 0, Function::sin, &n});
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          push({Code::var, 0.0, v.index, Function::sin, &n});
        } else if constexpr (std::is_same_v<T, node::Pi>) {
          push({Code::push, pi, 0, Function::sin, &n});
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          compile(*v.operand, prog, depth, max_depth);
          push({Code::neg, 0.0, 0, Function::sin, &n});
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          compile(*v.lhs, prog, depth, max_depth);
          compile(*v.rhs, prog, depth, max_depth);
          Code c = Code::add;
          switch (v.op) {
          case BinaryOp::add: c = Code::add; break;
          case BinaryOp::sub: c = Code::sub; break;
          case BinaryOp::mul: c = Code::mul; break;
          case BinaryOp::div: c = Code::div; break;
          case BinaryOp::pow: c = Code::pow; break;
          }
          push({c, 0.0, 0, Function::sin, &n});
        } else {
          compile(*v.arg, prog, depth, max_depth);
          push({Code::call, 0.0, 0, v.fn, &n});
        }
      },
      n.value);
}

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(pos_, "expression");
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError(pos_, "operator or end of input");
    return root;
  }

private:
  static NodePtr make(decltype(ExprNode::value) v) {
    return std::make_shared<const ExprNode>(ExprNode{std::move(v)});
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = make(node::Binary{BinaryOp::add, lhs, parse_term()});
      else if (accept('-'))
        lhs = make(node::Binary{BinaryOp::sub, lhs, parse_term()});
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = make(node::Binary{BinaryOp::mul, lhs, parse_unary()});
      else if (accept('/'))
        lhs = make(node::Binary{BinaryOp::div, lhs, parse_unary()});
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-'))
      return make(node::Negate{parse_unary()});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^'))
      return make(node::Binary{BinaryOp::pow, base, parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(pos_, "number, identifier or '('");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!accept(')'))
        throw ParseError(pos_, "')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)))
      return parse_identifier();
    throw ParseError(pos_, "number, identifier or '('");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [this] {
      std::size_t n = 0;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
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
    if (mantissa == 0)
      throw ParseError(start, "digit");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        ++pos_;
      if (digits() == 0)
        throw ParseError(pos_, "exponent digits");
    }
    const std::string text(src_.substr(start, pos_ - start));
    const double value = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(value))
      throw ParseError(start, "finite number literal");
    return make(node::Literal{value});
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x1" || name == "x2" || name == "x3")
      return make(node::Variable{name[1] - '1'});
    if (name == "pi")
      return make(node::Pi{});
    static constexpr std::pair<std::string_view, Function> functions[] = {
        {"sin", Function::sin},   {"cos", Function::cos},
        {"exp", Function::exp},   {"sqrt", Function::sqrt},
        {"abs", Function::abs}};
    for (const auto &[fname, fn] : functions) {
      if (name == fname) {
        if (!accept('('))
          throw ParseError(pos_, "'(' after function name");
        NodePtr arg = parse_expr();
        if (!accept(')'))
          throw ParseError(pos_, "')'");
        return make(node::Call{fn, arg});
      }
    }
    throw UnknownIdentifierError(std::string(name), start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Immutable parsed expression. Copies share the tree.
class Expr {
public:
  /// The constant 0.
  Expr() : Expr(std::make_shared<const ExprNode>(ExprNode{node::Literal{0.0}})) {}

  explicit Expr(NodePtr root) : root_(std::move(root)) {
    int depth = 0;
    detail::compile(*root_, program_, depth, max_depth_);
  }

  static Expr parse(std::string_view source) {
    return Expr(detail::Parser(source).parse());
  }

  static Expr constant(double value) {
    return Expr(std::make_shared<const ExprNode>(ExprNode{node::Literal{value}}));
  }

  const ExprNode &root() const noexcept { return *root_; }
  const NodePtr &root_ptr() const noexcept { return root_; }

  std::string to_string() const {
    std::string out;
    detail::print(*root_, out);
    return out;
  }

  /// True when the tree is a single literal.
  /// True when the value does not depend on x1, x2, x3.
  bool is_constant() const { return !detail::uses_variables(*root_); }

  double eval(const Point3 &x) const {
    using Code = detail::Instruction::Code;
    constexpr int inline_depth = 32;
    double inline_stack[inline_depth];
    std::vector<double> heap;
    double *stack = inline_stack;
    if (max_depth_ > inline_depth) {
      heap.resize(static_cast<std::size_t>(max_depth_));
      stack = heap.data();
    }
    int top = 0;
    for (const auto &ins : program_) {
      double r = 0.0;
      switch (ins.code) {
      case Code::push: stack[top++] = ins.value; continue;
      case Code::var: stack[top++] = x[static_cast<std::size_t>(ins.index)]; continue;
      case Code::neg: stack[top - 1] = -stack[top - 1]; continue;
      case Code::call: {
        const double a = stack[top - 1];
        switch (ins.fn) {
        case Function::sin: r = std::sin(a); break;
        case Function::cos: r = std::cos(a); break;
        case Function::exp: r = std::exp(a); break;
        case Function::sqrt:
          if (a < 0.0)
            fail(ins, "square root of negative value");
          r = std::sqrt(a);
          break;
        case Function::abs: r = std::abs(a); break;
        }
        stack[top - 1] = check(ins, r);
        continue;
      }
      default: break;
      }
      const double b = stack[--top];
      const double a = stack[top - 1];
      switch (ins.code) {
      case Code::add: r = a + b; break;
      case Code::sub: r = a - b; break;
      case Code::mul: r = a * b; break;
      case Code::div:
        if (b == 0.0)
          fail(ins, "division by zero");
        r = a / b;
        break;
      case Code::pow: r = std::pow(a, b); break;
      default: break;
      }
      stack[top - 1] = check(ins, r);
    }
    return stack[0];
  }

  double operator()(const Point3 &x) const { return eval(x); }

  friend bool operator==(const Expr &a, const Expr &b) {
    return detail::equal(*a.root_, *b.root_);
  }

private:
  [[noreturn]] static void fail(const detail::Instruction &ins, const char *what) {
    std::string text;
    detail::print(*ins.source, text);
    throw DomainError(text, what);
  }

  static double check(const detail::Instruction &ins, double r) {
    if (!std::isfinite(r))
      fail(ins, "non-finite result");
    return r;
  }

  NodePtr root_;
  std::vector<detail::Instruction> program_;
  int max_depth_ = 0;
};

inline double eval(const Expr &e, const Point3 &x) { return e.eval(x); }

} // namespace symmax

#endif // SYMMAX_EXPRLANG_HPP
