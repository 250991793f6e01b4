#include "asep/expression.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace asep {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

struct Expression::Node {
  enum class Op { Const, Coord, Cos, Sin, SinShift, Add, Sub, Mul, Neg };
  Op op;
  double value = 0.0;  // Const: literal; trig: wavenumber k
  int axis = 0;        // 0-based
  std::shared_ptr<const Node> lhs, rhs;

  double eval(std::span<const double> u) const {
    switch (op) {
      case Op::Const:
        return value;
      case Op::Coord:
        return u[size_t(axis)];
      case Op::Cos:
        return std::cos(value * kPi * u[size_t(axis)]);
      case Op::Sin:
        return std::sin(value * kPi * u[size_t(axis)]);
      case Op::SinShift:
        return std::sin(value * kPi * (u[size_t(axis)] + 1.0));
      case Op::Add:
        return lhs->eval(u) + rhs->eval(u);
      case Op::Sub:
        return lhs->eval(u) - rhs->eval(u);
      case Op::Mul:
        return lhs->eval(u) * rhs->eval(u);
      case Op::Neg:
        return -lhs->eval(u);
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct Parser {
  const std::string& text;
  size_t pos = 0;
  int dim;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at position " +
                                std::to_string(pos) + " in '" + text + "'");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(unsigned(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  double number() {
    skip_ws();
    const char* start = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("expected a number");
    pos += size_t(end - start);
    return v;
  }

  int axis_index() {
    double v = number();
    int axis = int(v);
    if (axis != v || axis < 1 || axis > dim)
      fail("axis index must be an integer in [1," + std::to_string(dim) + "]");
    return axis - 1;
  }

  NodePtr make(Node::Op op, double value = 0.0, int axis = 0,
               NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->axis = axis;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  NodePtr factor() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    char c = text[pos];
    if (c == '-') {
      ++pos;
      return make(Node::Op::Neg, 0, 0, factor());
    }
    if (c == '(') {
      ++pos;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(unsigned(c))) {
      size_t start = pos;
      while (pos < text.size() && std::isalpha(unsigned(text[pos]))) ++pos;
      std::string name = text.substr(start, pos - start);
      expect('(');
      if (name == "u") {
        int axis = axis_index();
        expect(')');
        return make(Node::Op::Coord, 0, axis);
      }
      Node::Op op;
      if (name == "cos")
        op = Node::Op::Cos;
      else if (name == "sin")
        op = Node::Op::Sin;
      else if (name == "sinp")
        op = Node::Op::SinShift;
      else
        fail("unknown function '" + name + "'");
      double k = number();
      expect(',');
      int axis = axis_index();
      expect(')');
      return make(op, k, axis);
    }
    return make(Node::Op::Const, number());
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (eat('*')) lhs = make(Node::Op::Mul, 0, 0, lhs, factor());
    return lhs;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make(Node::Op::Add, 0, 0, lhs, term());
      else if (eat('-'))
        lhs = make(Node::Op::Sub, 0, 0, lhs, term());
      else
        return lhs;
    }
  }
};

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
  Parser parser{text, 0, dim};
  NodePtr root = parser.expr();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input");
  Expression e;
  e.root_ = std::move(root);
  e.source_ = text;
  return e;
}

double Expression::eval(std::span<const double> u) const {
  if (!root_) throw std::logic_error("expression: eval on empty expression");
  return root_->eval(u);
}

}  // namespace asep
