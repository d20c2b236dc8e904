#include "plevy/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "plevy/error.hpp"

namespace plevy {

namespace expr_detail {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Abs, Sqrt, Sign, Min, Max, LessEq };

// Sign and Log are internal (produced by differentiation); LessEq(a,b,t,f)
// selects t when a <= b, otherwise f.
struct Node {
  Op op;
  double value = 0.0;
  int var = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

using NodePtr = std::shared_ptr<const Node>;

}  // namespace expr_detail

namespace {

using expr_detail::Node;
using expr_detail::NodePtr;
using expr_detail::Op;

NodePtr make(Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

NodePtr cst(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr var(int i) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = i;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

// Light constant folding keeps repeated derivatives small.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make(Op::Add, {std::move(a), std::move(b)});
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make(Op::Neg, {std::move(b)});
  return make(Op::Sub, {std::move(a), std::move(b)});
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return cst(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make(Op::Mul, {std::move(a), std::move(b)});
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return cst(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::Div, {std::move(a), std::move(b)});
}
NodePtr neg(NodePtr a) {
  if (a->op == Op::Const) return cst(-a->value);
  return make(Op::Neg, {std::move(a)});
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip();
    if (pos_ >= text_.size()) fail("empty expression");
    NodePtr root = sum();
    skip();
    if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "syntax error at byte " << pos_ << ": " << msg;
    raise(ErrorKind::Parse, os.str());
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr sum() {
    NodePtr lhs = product();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, {lhs, product()});
      } else if (accept('-')) {
        lhs = make(Op::Sub, {lhs, product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Op::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      NodePtr inner = sum();
      expect(')');
      return inner;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    if (used != token.size()) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    return cst(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "pi") return cst(std::numbers::pi);
    if (name == "x") return var(0);
    if (name == "y") return var(1);

    struct Fn {
      const char* name;
      Op op;
      int nargs;
    };
    static constexpr Fn kFns[] = {{"sin", Op::Sin, 1},  {"cos", Op::Cos, 1},   {"exp", Op::Exp, 1}, {"abs", Op::Abs, 1},
                                  {"sqrt", Op::Sqrt, 1}, {"min", Op::Min, 2}, {"max", Op::Max, 2}};
    for (const Fn& fn : kFns) {
      if (name != fn.name) continue;
      expect('(');
      std::vector<NodePtr> args{sum()};
      for (int i = 1; i < fn.nargs; ++i) {
        expect(',');
        args.push_back(sum());
      }
      expect(')');
      return make(fn.op, std::move(args));
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void eval_fail(const char* what) { raise(ErrorKind::Evaluation, what); }

double eval(const Node& n, std::span<const double> c) {
  auto a = [&](std::size_t i) { return eval(*n.args[i], c); };
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      if (static_cast<std::size_t>(n.var) >= c.size()) eval_fail("expression uses y on a 1D point");
      return c[static_cast<std::size_t>(n.var)];
    case Op::Neg:
      return -a(0);
    case Op::Add:
      return a(0) + a(1);
    case Op::Sub:
      return a(0) - a(1);
    case Op::Mul:
      return a(0) * a(1);
    case Op::Div: {
      const double den = a(1);
      if (den == 0.0) eval_fail("division by zero");
      return a(0) / den;
    }
    case Op::Pow:
      return std::pow(a(0), a(1));
    case Op::Sin:
      return std::sin(a(0));
    case Op::Cos:
      return std::cos(a(0));
    case Op::Exp:
      return std::exp(a(0));
    case Op::Log:
      return std::log(a(0));
    case Op::Abs:
      return std::abs(a(0));
    case Op::Sqrt:
      return std::sqrt(a(0));
    case Op::Sign: {
      const double v = a(0);
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    case Op::Min:
      return std::min(a(0), a(1));
    case Op::Max:
      return std::max(a(0), a(1));
    case Op::LessEq:
      return a(0) <= a(1) ? a(2) : a(3);
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n, int v) {
  const auto& A = n->args;
  switch (n->op) {
    case Op::Const:
      return cst(0.0);
    case Op::Var:
      return cst(n->var == v ? 1.0 : 0.0);
    case Op::Neg:
      return neg(diff(A[0], v));
    case Op::Add:
      return add(diff(A[0], v), diff(A[1], v));
    case Op::Sub:
      return sub(diff(A[0], v), diff(A[1], v));
    case Op::Mul:
      return add(mul(diff(A[0], v), A[1]), mul(A[0], diff(A[1], v)));
    case Op::Div:
      // (a'b - ab') / b^2
      return div(sub(mul(diff(A[0], v), A[1]), mul(A[0], diff(A[1], v))), mul(A[1], A[1]));
    case Op::Pow: {
      const NodePtr da = diff(A[0], v);
      const NodePtr db = diff(A[1], v);
      if (is_const(db, 0.0)) {
        // b a^(b-1) a'
        if (A[1]->op == Op::Const) {
          return mul(mul(A[1], make(Op::Pow, {A[0], cst(A[1]->value - 1.0)})), da);
        }
        return mul(mul(A[1], make(Op::Pow, {A[0], sub(A[1], cst(1.0))})), da);
      }
      // a^b (b' ln a + b a'/a)
      return mul(n, add(mul(db, make(Op::Log, {A[0]})), div(mul(A[1], da), A[0])));
    }
    case Op::Sin:
      return mul(make(Op::Cos, {A[0]}), diff(A[0], v));
    case Op::Cos:
      return neg(mul(make(Op::Sin, {A[0]}), diff(A[0], v)));
    case Op::Exp:
      return mul(n, diff(A[0], v));
    case Op::Log:
      return div(diff(A[0], v), A[0]);
    case Op::Abs:
      return mul(make(Op::Sign, {A[0]}), diff(A[0], v));
    case Op::Sqrt:
      return div(diff(A[0], v), mul(cst(2.0), n));
    case Op::Sign:
      return cst(0.0);
    case Op::Min:
      return make(Op::LessEq, {A[0], A[1], diff(A[0], v), diff(A[1], v)});
    case Op::Max:
      return make(Op::LessEq, {A[0], A[1], diff(A[1], v), diff(A[0], v)});
    case Op::LessEq:
      return make(Op::LessEq, {A[0], A[1], diff(A[2], v), diff(A[3], v)});
  }
  return cst(0.0);
}

int max_var(const Node& n) {
  int m = n.op == Op::Var ? n.var + 1 : 0;
  for (const auto& c : n.args) m = std::max(m, max_var(*c));
  return m;
}

}  // namespace

Expression::Expression(std::shared_ptr<const expr_detail::Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse(), std::string(text)); }

Expression Expression::constant(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return Expression(cst(value), os.str());
}

double Expression::evaluate(std::span<const double> coords) const {
  const double v = eval(*root_, coords);
  if (!std::isfinite(v)) raise(ErrorKind::Evaluation, "expression '" + source_ + "' evaluated to a non-finite value");
  return v;
}

double Expression::operator()(double x) const {
  const double c[1] = {x};
  return evaluate(c);
}

double Expression::operator()(double x, double y) const {
  const double c[2] = {x, y};
  return evaluate(c);
}

Expression Expression::derivative(int v) const {
  require(v == 0 || v == 1, ErrorKind::Precondition, "derivative variable must be 0 (x) or 1 (y)");
  return Expression(diff(root_, v), "d/d" + std::string(v == 0 ? "x" : "y") + "(" + source_ + ")");
}

int Expression::arity() const { return max_var(*root_); }

}  // namespace plevy
