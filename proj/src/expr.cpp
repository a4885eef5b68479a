#include "pxmp/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "pxmp/errors.hpp"

namespace pxmp {

namespace {

enum class Op { number, variable, neg, add, sub, mul, div, pow, call };

struct Builtin {
  std::string_view name;
  int arity;
};

constexpr std::array<Builtin, 7> kBuiltins = {{
    {"sin", 1},
    {"cos", 1},
    {"exp", 1},
    {"log", 1},
    {"abs", 1},
    {"min", 2},
    {"max", 2},
}};

int builtin_index(std::string_view name) {
  for (std::size_t i = 0; i < kBuiltins.size(); ++i) {
    if (kBuiltins[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

struct Expr::Node {
  Op op;
  double value = 0.0;                        // number
  int slot = 0;                              // variable
  int func = -1;                             // call
  std::string name;                          // variable/call name, for printing
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string_view> vars) : src_(src), vars_(vars) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw SyntaxError(pos_, "end of input");
    return e;
  }

 private:
  std::string_view src_;
  std::span<const std::string_view> vars_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        NodePtr rhs = term();
        lhs = make({c == '+' ? Op::add : Op::sub, 0.0, 0, -1, {}, {lhs, rhs}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        NodePtr rhs = factor();
        lhs = make({c == '*' ? Op::mul : Op::div, 0.0, 0, -1, {}, {lhs, rhs}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (consume('-')) {
      NodePtr inner = power();
      return make({Op::neg, 0.0, 0, -1, {}, {inner}});
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (consume('^')) {
      NodePtr exponent = factor();  // right-associative, may re-enter unary minus
      return make({Op::pow, 0.0, 0, -1, {}, {base, exponent}});
    }
    return base;
  }

  NodePtr atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!consume(')')) throw SyntaxError(pos_, "')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw SyntaxError(pos_, "number, identifier or '('");
  }

  NodePtr number() {
    skip_ws();
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) throw SyntaxError(pos_, "number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make({Op::number, value, 0, -1, {}, {}});
  }

  NodePtr identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(src_.substr(start, pos_ - start));
    if (peek() == '(') {
      int func = builtin_index(name);
      if (func < 0) throw UnknownIdentifier(name, start);
      ++pos_;  // '('
      std::vector<NodePtr> args;
      args.push_back(expr());
      while (consume(',')) args.push_back(expr());
      if (!consume(')')) throw SyntaxError(pos_, "')'");
      if (static_cast<int>(args.size()) != kBuiltins[func].arity) {
        throw SyntaxError(start, std::to_string(kBuiltins[func].arity) + " argument(s) to " + name);
      }
      return make({Op::call, 0.0, 0, func, std::move(name), std::move(args)});
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        return make({Op::variable, 0.0, static_cast<int>(i), -1, std::move(name), {}});
      }
    }
    if (builtin_index(name) >= 0) throw SyntaxError(pos_, "'(' after function name");
    throw UnknownIdentifier(name, start);
  }
};

double eval_node(const Expr::Node& n, double x, double y) {
  switch (n.op) {
    case Op::number:
      return n.value;
    case Op::variable:
      return n.slot == 0 ? x : y;
    case Op::neg:
      return -eval_node(*n.args[0], x, y);
    case Op::add:
      return eval_node(*n.args[0], x, y) + eval_node(*n.args[1], x, y);
    case Op::sub:
      return eval_node(*n.args[0], x, y) - eval_node(*n.args[1], x, y);
    case Op::mul:
      return eval_node(*n.args[0], x, y) * eval_node(*n.args[1], x, y);
    case Op::div: {
      double a = eval_node(*n.args[0], x, y);
      double b = eval_node(*n.args[1], x, y);
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    }
    case Op::pow:
      return std::pow(eval_node(*n.args[0], x, y), eval_node(*n.args[1], x, y));
    case Op::call: {
      double a = eval_node(*n.args[0], x, y);
      switch (n.func) {
        case 0:
          return std::sin(a);
        case 1:
          return std::cos(a);
        case 2:
          return std::exp(a);
        case 3:
          if (a <= 0.0) throw DomainError("log of non-positive value");
          return std::log(a);
        case 4:
          return std::fabs(a);
        case 5:
          return std::fmin(a, eval_node(*n.args[1], x, y));
        case 6:
          return std::fmax(a, eval_node(*n.args[1], x, y));
      }
      throw DomainError("unknown builtin");
    }
  }
  throw DomainError("malformed expression node");
}

void print_node(const Expr::Node& n, std::string& out) {
  switch (n.op) {
    case Op::number:
      if (std::signbit(n.value)) {
        out += "(-";
        out += format_double(-n.value);
        out += ')';
      } else {
        out += format_double(n.value);
      }
      return;
    case Op::variable:
      out += n.name;
      return;
    case Op::neg:
      out += "(-";
      print_node(*n.args[0], out);
      out += ')';
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: {
      char sym = n.op == Op::add   ? '+'
                 : n.op == Op::sub ? '-'
                 : n.op == Op::mul ? '*'
                 : n.op == Op::div ? '/'
                                   : '^';
      out += '(';
      print_node(*n.args[0], out);
      out += sym;
      print_node(*n.args[1], out);
      out += ')';
      return;
    }
    case Op::call:
      out += n.name;
      out += '(';
      print_node(*n.args[0], out);
      if (n.args.size() > 1) {
        out += ',';
        print_node(*n.args[1], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

Expr Expr::parse(std::string_view src) {
  static constexpr std::string_view kXY[] = {"x", "y"};
  return parse(src, kXY);
}

Expr Expr::parse(std::string_view src, std::span<const std::string_view> variables) {
  Parser p(src, variables);
  return Expr(p.run());
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw DomainError("constant expression must be finite");
  return Expr(std::make_shared<const Node>(Node{Op::number, value, 0, -1, {}, {}}));
}

double Expr::eval(double x, double y) const {
  if (!root_) throw DomainError("evaluating empty expression");
  double v = eval_node(*root_, x, y);
  if (!std::isfinite(v)) throw DomainError("expression evaluated to a non-finite value");
  return v;
}

std::string Expr::str() const {
  if (!root_) return {};
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace pxmp
