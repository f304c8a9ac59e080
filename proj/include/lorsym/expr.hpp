#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "lorsym/rational.hpp"

namespace lorsym {

enum class ExprOp {
  Const,   ///< exact rational or floating literal
  Var,     ///< coordinate x, y or z
  Param,   ///< named free symbol, bound at evaluation
  Neg, Sin, Cos, Exp, Ln, Sqrt,
  Add, Sub, Mul, Div, Pow,
  Atan2,   ///< two-argument arctangent, atan2(y-arg, x-arg)
  NumFn,   ///< opaque numeric function of (x,y,z); evaluable, not differentiable
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t at)
      : std::runtime_error(what + " (byte " + std::to_string(at) + ")"),
        offset(at) {}
  std::size_t offset;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable expression tree. Handles share nodes freely; every operation
/// returns a new tree and never mutates, so Expr values are thread-safe.
class Expr {
public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  using NumericFn = std::function<double(double, double, double)>;

  struct Node {
    ExprOp op;
    bool exact = false;       // Const: value is `q`, not `v`
    Rational q;               // Const (exact)
    double v = 0.0;           // Const (mirrors q when exact)
    int axis = -1;            // Var: 0=x 1=y 2=z
    std::string name;         // Param; also label for NumFn
    NodePtr a, b;             // children
    NumericFn fn;             // NumFn
  };

  Expr() : m_node(zeroNode()) {}

  static Expr number(const Rational& q);
  static Expr number(std::int64_t n) { return number(Rational(n)); }
  static Expr number(double v);
  static Expr variable(int axis);
  static Expr param(const std::string& name);
  static Expr numeric(NumericFn fn, const std::string& label);
  static Expr zero() { return Expr(); }
  static Expr one() { return number(Rational(1)); }

  ExprOp op() const { return m_node->op; }
  const Node& node() const { return *m_node; }
  NodePtr ptr() const { return m_node; }

  bool isConstZero() const { return m_node->op == ExprOp::Const && m_node->exact && m_node->q.isZero(); }
  bool isConstOne() const { return m_node->op == ExprOp::Const && m_node->exact && m_node->q == Rational(1); }
  bool isConst() const { return m_node->op == ExprOp::Const; }

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(ExprOp::Add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(ExprOp::Sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(ExprOp::Mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(ExprOp::Div, a, b); }
  friend Expr operator-(const Expr& a) { return unary(ExprOp::Neg, a); }

  static Expr unary(ExprOp op, const Expr& a);
  static Expr binary(ExprOp op, const Expr& a, const Expr& b);

  /// Rewraps an existing (immutable) node as a handle.
  static Expr fromNode(NodePtr n) { return Expr(std::move(n)); }

private:
  explicit Expr(NodePtr n) : m_node(std::move(n)) {}
  static const NodePtr& zeroNode();
  NodePtr m_node;
};

inline Expr sin(const Expr& a) { return Expr::unary(ExprOp::Sin, a); }
inline Expr cos(const Expr& a) { return Expr::unary(ExprOp::Cos, a); }
inline Expr exp(const Expr& a) { return Expr::unary(ExprOp::Exp, a); }
inline Expr ln(const Expr& a) { return Expr::unary(ExprOp::Ln, a); }
inline Expr sqrt(const Expr& a) { return Expr::unary(ExprOp::Sqrt, a); }
inline Expr pow(const Expr& a, const Expr& b) { return Expr::binary(ExprOp::Pow, a, b); }
inline Expr atan2(const Expr& y, const Expr& x) { return Expr::binary(ExprOp::Atan2, y, x); }

/// Parses the expression grammar
///   expr := term (("+"|"-") term)*
///   term := factor (("*"|"/") factor)*
///   factor := base ("^" factor)?
///   base := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")" | "-" base
/// Functions: sin cos exp ln sqrt atan2. Identifiers other than x,y,z are
/// free parameters. Failures throw ParseError carrying the byte offset.
Expr parseExpr(const std::string& text);

/// Round-trippable text form: parse(printExpr(e)) evaluates identically and
/// printExpr is idempotent across the round trip.
std::string printExpr(const Expr& e);

/// Exact derivative with respect to coordinate axis 0..2. Total on all
/// supported node kinds; NumFn nodes throw std::logic_error.
Expr differentiate(const Expr& e, int axis);

struct EvalContext {
  double x = 0, y = 0, z = 0;
  const std::map<std::string, double>* params = nullptr;

  EvalContext() = default;
  EvalContext(double px, double py, double pz,
              const std::map<std::string, double>* p = nullptr)
      : x(px), y(py), z(pz), params(p) {}
  EvalContext(const Eigen::Vector3d& pt,
              const std::map<std::string, double>* p = nullptr)
      : x(pt.x()), y(pt.y()), z(pt.z()), params(p) {}
};

/// Evaluates with exact rationals promoted to double. Domain violations
/// (ln of a nonpositive value, division by zero, sqrt of a negative value,
/// fractional power of a nonpositive base) and unbound parameters throw
/// EvalError naming the offending node.
double evaluate(const Expr& e, const EvalContext& ctx);

/// Conservative rewriting only: constant folding, 0/1 identities, double
/// negation, and syntactic e/e -> 1. Value-preserving wherever both sides
/// are defined. No general simplification.
Expr simplify(const Expr& e);

/// Structural equality (same tree shape and payloads).
bool structurallyEqual(const Expr& a, const Expr& b);

Expr substituteParams(const Expr& e, const std::map<std::string, Expr>& repl);
Expr substituteVars(const Expr& e, const std::array<Expr, 3>& repl);

void collectParams(const Expr& e, std::set<std::string>& out);
bool containsNumFn(const Expr& e);
int treeSize(const Expr& e);

using VecExpr = std::array<Expr, 3>;

VecExpr gradient(const Expr& e);
VecExpr curl(const VecExpr& v);
Expr divergence(const VecExpr& v);

inline Eigen::Vector3d evaluate(const VecExpr& v, const EvalContext& ctx) {
  return {evaluate(v[0], ctx), evaluate(v[1], ctx), evaluate(v[2], ctx)};
}

inline VecExpr vecZero() { return {Expr::zero(), Expr::zero(), Expr::zero()}; }

}  // namespace lorsym
