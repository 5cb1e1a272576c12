#include "hqflow/expr.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <vector>

namespace hqflow {

enum class NodeOp { number, variable, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, exp, log, sqrt, abs, tanh };

struct ExprNode {
  NodeOp op = NodeOp::number;
  double value = 0.0;
  Var var = Var::x1;
  Func func = Func::sin;
  std::shared_ptr<const ExprNode> a;
  std::shared_ptr<const ExprNode> b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct FuncName {
  const char* name;
  Func func;
};
constexpr FuncName kFuncs[] = {{"sin", Func::sin},   {"cos", Func::cos},   {"exp", Func::exp},
                               {"log", Func::log},   {"sqrt", Func::sqrt}, {"abs", Func::abs},
                               {"tanh", Func::tanh}};

const char* func_name(Func f) {
  for (const auto& fn : kFuncs)
    if (fn.func == f) return fn.name;
  return "?";
}

const char* var_name(Var v) {
  switch (v) {
    case Var::x1: return "x1";
    case Var::x2: return "x2";
    case Var::u: return "u";
    case Var::t: return "t";
  }
  return "?";
}

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = NodeOp::number;
  n->value = v;
  return n;
}

NodePtr make_unary(NodeOp op, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(NodeOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, ExprSlot slot) : src_(src), slot_(slot) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const {
    throw ParseError(msg, pos + 1);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  // Consumes '-' or U+2212.
  bool eat_minus() {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '-') {
      ++pos_;
      return true;
    }
    if (src_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make_binary(NodeOp::add, lhs, term());
      else if (eat_minus())
        lhs = make_binary(NodeOp::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make_binary(NodeOp::mul, lhs, unary());
      else if (eat('/'))
        lhs = make_binary(NodeOp::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat_minus()) return make_unary(NodeOp::neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make_binary(NodeOp::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t p) { return p < src_.size() && src_[p] >= '0' && src_[p] <= '9'; };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (is_digit(p)) {
        pos_ = p;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_ || !std::isfinite(v))
      fail_at("malformed number", start);
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    for (const auto& fn : kFuncs) {
      if (name == fn.name) {
        if (!eat('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expr();
        if (!eat(')')) fail("expected ')'");
        auto n = std::make_shared<ExprNode>();
        n->op = NodeOp::call;
        n->func = fn.func;
        n->a = std::move(arg);
        return n;
      }
    }
    if (name == "pi") return make_number(std::numbers::pi);
    if (name == "e") return make_number(std::numbers::e);

    Var v;
    if (name == "x1")
      v = Var::x1;
    else if (name == "x2")
      v = Var::x2;
    else if (name == "u")
      v = Var::u;
    else if (name == "t")
      v = Var::t;
    else
      fail_at("unknown identifier '" + std::string(name) + "'", start);

    const bool legal = slot_ == ExprSlot::free ||
                       (slot_ == ExprSlot::data && v != Var::t) ||
                       (slot_ == ExprSlot::initial && (v == Var::x1 || v == Var::x2));
    if (!legal) fail_at("variable '" + std::string(name) + "' is not allowed here", start);

    auto n = std::make_shared<ExprNode>();
    n->op = NodeOp::variable;
    n->var = v;
    return n;
  }

  std::string_view src_;
  ExprSlot slot_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_fail(const char* fn, double arg) {
  std::ostringstream os;
  os.precision(17);
  os << fn << ": argument " << arg << " outside the domain";
  throw EvalDomainError(os.str());
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << ": non-finite result";
    throw EvalDomainError(os.str());
  }
  return v;
}

double eval_node(const ExprNode& n, const ExprEnv& env) {
  switch (n.op) {
    case NodeOp::number:
      return n.value;
    case NodeOp::variable:
      switch (n.var) {
        case Var::x1: return env.x1;
        case Var::x2: return env.x2;
        case Var::u: return env.u;
        case Var::t: return env.t;
      }
      return 0.0;
    case NodeOp::neg:
      return -eval_node(*n.a, env);
    case NodeOp::add:
      return checked(eval_node(*n.a, env) + eval_node(*n.b, env), "+");
    case NodeOp::sub:
      return checked(eval_node(*n.a, env) - eval_node(*n.b, env), "-");
    case NodeOp::mul:
      return checked(eval_node(*n.a, env) * eval_node(*n.b, env), "*");
    case NodeOp::div: {
      const double num = eval_node(*n.a, env);
      const double den = eval_node(*n.b, env);
      if (den == 0.0) throw EvalDomainError("division by zero");
      return checked(num / den, "/");
    }
    case NodeOp::pow: {
      const double base = eval_node(*n.a, env);
      const double ex = eval_node(*n.b, env);
      const double v = std::pow(base, ex);
      if (std::isnan(v)) domain_fail("^", base);
      return checked(v, "^");
    }
    case NodeOp::call: {
      const double x = eval_node(*n.a, env);
      switch (n.func) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::exp: return checked(std::exp(x), "exp");
        case Func::log:
          if (!(x > 0.0)) domain_fail("log", x);
          return std::log(x);
        case Func::sqrt:
          if (x < 0.0) domain_fail("sqrt", x);
          return std::sqrt(x);
        case Func::abs: return std::abs(x);
        case Func::tanh: return std::tanh(x);
      }
      return 0.0;
    }
  }
  return 0.0;
}

bool node_references(const ExprNode* n, Var v) {
  if (n == nullptr) return false;
  if (n->op == NodeOp::variable) return n->var == v;
  return node_references(n->a.get(), v) || node_references(n->b.get(), v);
}

void print_node(const ExprNode& n, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print_node(*n.a, out);
    out += op;
    print_node(*n.b, out);
    out += ')';
  };
  switch (n.op) {
    case NodeOp::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeOp::variable:
      out += var_name(n.var);
      return;
    case NodeOp::neg:
      out += "(-";
      print_node(*n.a, out);
      out += ')';
      return;
    case NodeOp::add: bin(" + "); return;
    case NodeOp::sub: bin(" - "); return;
    case NodeOp::mul: bin(" * "); return;
    case NodeOp::div: bin(" / "); return;
    case NodeOp::pow: bin("^"); return;
    case NodeOp::call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
  }
}

bool nodes_equal(const ExprNode* a, const ExprNode* b) {
  if (a == nullptr || b == nullptr) return a == b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case NodeOp::number:
      return std::bit_cast<std::uint64_t>(a->value) == std::bit_cast<std::uint64_t>(b->value);
    case NodeOp::variable:
      return a->var == b->var;
    case NodeOp::call:
      return a->func == b->func && nodes_equal(a->a.get(), b->a.get());
    default:
      return nodes_equal(a->a.get(), b->a.get()) && nodes_equal(a->b.get(), b->b.get());
  }
}

}  // namespace

double Expr::eval(const ExprEnv& env) const {
  if (!root_) throw StateError("eval of an empty expression");
  return eval_node(*root_, env);
}

bool Expr::references(Var v) const { return node_references(root_.get(), v); }

std::string Expr::to_string() const {
  std::string out;
  if (root_) print_node(*root_, out);
  return out;
}

Expr parse_expr(std::string_view src, ExprSlot slot) { return Expr(Parser(src, slot).parse()); }

double partial_u(const Expr& e, ExprEnv env, double h) {
  const double u = env.u;
  env.u = u + h;
  const double up = e.eval(env);
  env.u = u - h;
  const double dn = e.eval(env);
  return (up - dn) / (2.0 * h);
}

bool structurally_equal(const Expr& a, const Expr& b) { return nodes_equal(a.root(), b.root()); }

}  // namespace hqflow
