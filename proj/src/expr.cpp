#include "lorsym/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace lorsym {

namespace {

bool isUnary(ExprOp op) {
  switch (op) {
    case ExprOp::Neg: case ExprOp::Sin: case ExprOp::Cos:
    case ExprOp::Exp: case ExprOp::Ln: case ExprOp::Sqrt:
      return true;
    default:
      return false;
  }
}

bool isBinary(ExprOp op) {
  switch (op) {
    case ExprOp::Add: case ExprOp::Sub: case ExprOp::Mul:
    case ExprOp::Div: case ExprOp::Pow: case ExprOp::Atan2:
      return true;
    default:
      return false;
  }
}

}  // namespace

const Expr::NodePtr& Expr::zeroNode() {
  static const NodePtr n = [] {
    auto node = std::make_shared<Node>();
    node->op = ExprOp::Const;
    node->exact = true;
    node->q = Rational(0);
    node->v = 0.0;
    return node;
  }();
  return n;
}

Expr Expr::number(const Rational& q) {
  auto node = std::make_shared<Node>();
  node->op = ExprOp::Const;
  node->exact = true;
  node->q = q;
  node->v = q.toDouble();
  return Expr(NodePtr(node));
}

Expr Expr::number(double v) {
  auto node = std::make_shared<Node>();
  node->op = ExprOp::Const;
  node->exact = false;
  node->v = v;
  return Expr(NodePtr(node));
}

Expr Expr::variable(int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("Expr::variable: axis out of range");
  auto node = std::make_shared<Node>();
  node->op = ExprOp::Var;
  node->axis = axis;
  return Expr(NodePtr(node));
}

Expr Expr::param(const std::string& name) {
  auto node = std::make_shared<Node>();
  node->op = ExprOp::Param;
  node->name = name;
  return Expr(NodePtr(node));
}

Expr Expr::numeric(NumericFn fn, const std::string& label) {
  auto node = std::make_shared<Node>();
  node->op = ExprOp::NumFn;
  node->fn = std::move(fn);
  node->name = label;
  return Expr(NodePtr(node));
}

Expr Expr::unary(ExprOp op, const Expr& a) {
  if (!isUnary(op)) throw std::invalid_argument("Expr::unary: not a unary op");
  auto node = std::make_shared<Node>();
  node->op = op;
  node->a = a.m_node;
  return Expr(NodePtr(node));
}

Expr Expr::binary(ExprOp op, const Expr& a, const Expr& b) {
  if (!isBinary(op)) throw std::invalid_argument("Expr::binary: not a binary op");
  auto node = std::make_shared<Node>();
  node->op = op;
  node->a = a.m_node;
  node->b = b.m_node;
  return Expr(NodePtr(node));
}

bool structurallyEqual(const Expr& a, const Expr& b) {
  struct Rec {
    static bool eq(const Expr::NodePtr& x, const Expr::NodePtr& y) {
      if (x == y) return true;
      if (!x || !y) return false;
      if (x->op != y->op) return false;
      switch (x->op) {
        case ExprOp::Const:
          if (x->exact != y->exact) return false;
          return x->exact ? x->q == y->q : x->v == y->v;
        case ExprOp::Var: return x->axis == y->axis;
        case ExprOp::Param: return x->name == y->name;
        case ExprOp::NumFn: return false;  // opaque: only pointer equality
        default: return eq(x->a, y->a) && eq(x->b, y->b);
      }
    }
  };
  return Rec::eq(a.ptr(), b.ptr());
}

// ---------------------------------------------------------------- evaluation

namespace {

double evalNode(const Expr::NodePtr& n, const EvalContext& ctx);

double evalPow(const Expr::NodePtr& n, const EvalContext& ctx) {
  double base = evalNode(n->a, ctx);
  // Exact integer exponents are evaluated by repeated multiplication and
  // permit any base; everything else requires a positive base.
  if (n->b->op == ExprOp::Const && n->b->exact && n->b->q.isInteger()) {
    std::int64_t k = n->b->q.num();
    bool inv = k < 0;
    if (inv) k = -k;
    double acc = 1.0, p = base;
    while (k > 0) {
      if (k & 1) acc *= p;
      p *= p;
      k >>= 1;
    }
    if (inv) {
      if (acc == 0.0) throw EvalError("pow: zero base with negative exponent");
      return 1.0 / acc;
    }
    return acc;
  }
  double ex = evalNode(n->b, ctx);
  if (base < 0.0) {
    if (std::nearbyint(ex) == ex && std::abs(ex) < 9.0e15) return std::pow(base, ex);
    throw EvalError("pow: fractional exponent of negative base");
  }
  if (base == 0.0) {
    if (ex > 0.0) return 0.0;
    throw EvalError("pow: zero base with nonpositive exponent");
  }
  return std::pow(base, ex);
}

double evalNode(const Expr::NodePtr& n, const EvalContext& ctx) {
  switch (n->op) {
    case ExprOp::Const: return n->exact ? n->q.toDouble() : n->v;
    case ExprOp::Var: return n->axis == 0 ? ctx.x : (n->axis == 1 ? ctx.y : ctx.z);
    case ExprOp::Param: {
      if (ctx.params) {
        auto it = ctx.params->find(n->name);
        if (it != ctx.params->end()) return it->second;
      }
      throw EvalError("unbound symbol '" + n->name + "'");
    }
    case ExprOp::NumFn: return n->fn(ctx.x, ctx.y, ctx.z);
    case ExprOp::Neg: return -evalNode(n->a, ctx);
    case ExprOp::Sin: return std::sin(evalNode(n->a, ctx));
    case ExprOp::Cos: return std::cos(evalNode(n->a, ctx));
    case ExprOp::Exp: return std::exp(evalNode(n->a, ctx));
    case ExprOp::Ln: {
      double v = evalNode(n->a, ctx);
      if (v <= 0.0) throw EvalError("ln of nonpositive value");
      return std::log(v);
    }
    case ExprOp::Sqrt: {
      double v = evalNode(n->a, ctx);
      if (v < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(v);
    }
    case ExprOp::Add: return evalNode(n->a, ctx) + evalNode(n->b, ctx);
    case ExprOp::Sub: return evalNode(n->a, ctx) - evalNode(n->b, ctx);
    case ExprOp::Mul: return evalNode(n->a, ctx) * evalNode(n->b, ctx);
    case ExprOp::Div: {
      double num = evalNode(n->a, ctx);
      double den = evalNode(n->b, ctx);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case ExprOp::Pow: return evalPow(n, ctx);
    case ExprOp::Atan2: return std::atan2(evalNode(n->a, ctx), evalNode(n->b, ctx));
  }
  throw std::logic_error("evalNode: unhandled op");
}

}  // namespace

double evaluate(const Expr& e, const EvalContext& ctx) {
  return evalNode(e.ptr(), ctx);
}

// ------------------------------------------------------------ simplification

namespace {

Expr wrap(const Expr::NodePtr& n) { return Expr::fromNode(n); }

bool sameStructure(const Expr::NodePtr& a, const Expr::NodePtr& b) {
  return structurallyEqual(wrap(a), wrap(b));
}

bool foldUnary(ExprOp op, const Expr::NodePtr& a, Expr& out) {
  if (a->op != ExprOp::Const) return false;
  if (op == ExprOp::Neg) {
    out = a->exact ? Expr::number(-a->q) : Expr::number(-a->v);
    return true;
  }
  if (a->exact) {
    // Keep exactness where the result is exactly representable.
    if (op == ExprOp::Sin && a->q.isZero()) { out = Expr::number(Rational(0)); return true; }
    if (op == ExprOp::Cos && a->q.isZero()) { out = Expr::number(Rational(1)); return true; }
    if (op == ExprOp::Exp && a->q.isZero()) { out = Expr::number(Rational(1)); return true; }
    if (op == ExprOp::Ln && a->q == Rational(1)) { out = Expr::number(Rational(0)); return true; }
    if (op == ExprOp::Sqrt && !a->q.isZero()) {
      // perfect squares of num and den
      auto isq = [](std::int64_t v, std::int64_t& r) {
        if (v < 0) return false;
        auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
        for (std::int64_t c = s > 1 ? s - 1 : 0; c <= s + 1; ++c)
          if (c * c == v) { r = c; return true; }
        return false;
      };
      std::int64_t rn, rd;
      if (a->q.num() >= 0 && isq(a->q.num(), rn) && isq(a->q.den(), rd)) {
        out = Expr::number(Rational(rn, rd));
        return true;
      }
    }
    if (op == ExprOp::Sqrt && a->q.isZero()) { out = Expr::number(Rational(0)); return true; }
  }
  double v = a->exact ? a->q.toDouble() : a->v;
  double r;
  switch (op) {
    case ExprOp::Sin: r = std::sin(v); break;
    case ExprOp::Cos: r = std::cos(v); break;
    case ExprOp::Exp: r = std::exp(v); break;
    case ExprOp::Ln:
      if (v <= 0.0) return false;
      r = std::log(v);
      break;
    case ExprOp::Sqrt:
      if (v < 0.0) return false;
      r = std::sqrt(v);
      break;
    default: return false;
  }
  if (!std::isfinite(r)) return false;
  out = Expr::number(r);
  return true;
}

bool foldBinary(ExprOp op, const Expr::NodePtr& a, const Expr::NodePtr& b, Expr& out) {
  if (a->op != ExprOp::Const || b->op != ExprOp::Const) return false;
  if (a->exact && b->exact) {
    try {
      switch (op) {
        case ExprOp::Add: out = Expr::number(a->q + b->q); return true;
        case ExprOp::Sub: out = Expr::number(a->q - b->q); return true;
        case ExprOp::Mul: out = Expr::number(a->q * b->q); return true;
        case ExprOp::Div:
          if (b->q.isZero()) return false;
          out = Expr::number(a->q / b->q);
          return true;
        case ExprOp::Pow: {
          if (!b->q.isInteger()) break;
          std::int64_t k = b->q.num();
          if (k < -16 || k > 16) break;  // keep folded magnitudes tame
          bool inv = k < 0;
          if (inv) {
            if (a->q.isZero()) return false;
            k = -k;
          }
          Rational acc(1), p = a->q;
          for (std::int64_t i = 0; i < k; ++i) acc = acc * p;
          out = Expr::number(inv ? Rational(1) / acc : acc);
          return true;
        }
        default: break;
      }
    } catch (const std::overflow_error&) {
      return false;
    }
  }
  double va = a->exact ? a->q.toDouble() : a->v;
  double vb = b->exact ? b->q.toDouble() : b->v;
  double r;
  switch (op) {
    case ExprOp::Add: r = va + vb; break;
    case ExprOp::Sub: r = va - vb; break;
    case ExprOp::Mul: r = va * vb; break;
    case ExprOp::Div:
      if (vb == 0.0) return false;
      r = va / vb;
      break;
    case ExprOp::Pow:
      if (va < 0.0 || (va == 0.0 && vb <= 0.0)) return false;
      r = std::pow(va, vb);
      break;
    case ExprOp::Atan2:
      r = std::atan2(va, vb);
      break;
    default: return false;
  }
  if (!std::isfinite(r)) return false;
  out = Expr::number(r);
  return true;
}

Expr simplifyNode(const Expr::NodePtr& n) {
  switch (n->op) {
    case ExprOp::Const:
    case ExprOp::Var:
    case ExprOp::Param:
    case ExprOp::NumFn:
      return wrap(n);
    default:
      break;
  }

  Expr sa = simplifyNode(n->a);
  if (isUnary(n->op)) {
    Expr folded;
    if (foldUnary(n->op, sa.ptr(), folded)) return folded;
    if (n->op == ExprOp::Neg && sa.op() == ExprOp::Neg) return wrap(sa.node().a);
    return Expr::unary(n->op, sa);
  }

  Expr sb = simplifyNode(n->b);
  Expr folded;
  if (foldBinary(n->op, sa.ptr(), sb.ptr(), folded)) return folded;

  switch (n->op) {
    case ExprOp::Add:
      if (sa.isConstZero()) return sb;
      if (sb.isConstZero()) return sa;
      break;
    case ExprOp::Sub:
      if (sb.isConstZero()) return sa;
      if (sa.isConstZero()) return Expr::unary(ExprOp::Neg, sb);
      if (!containsNumFn(sa) && sameStructure(sa.ptr(), sb.ptr())) return Expr::zero();
      break;
    case ExprOp::Mul: {
      if (sa.isConstZero() || sb.isConstZero()) return Expr::zero();
      if (sa.isConstOne()) return sb;
      if (sb.isConstOne()) return sa;
      auto minusOne = [](const Expr& e) {
        return e.op() == ExprOp::Const && e.node().exact && e.node().q == Rational(-1);
      };
      if (minusOne(sa)) return Expr::unary(ExprOp::Neg, sb);
      if (minusOne(sb)) return Expr::unary(ExprOp::Neg, sa);
      break;
    }
    case ExprOp::Div:
      if (sa.isConstZero()) return Expr::zero();
      if (sb.isConstOne()) return sa;
      if (!containsNumFn(sa) && sameStructure(sa.ptr(), sb.ptr())) return Expr::one();
      break;
    case ExprOp::Pow:
      if (sb.isConstZero()) return Expr::one();
      if (sb.isConstOne()) return sa;
      break;
    default:
      break;
  }
  return Expr::binary(n->op, sa, sb);
}

}  // namespace

Expr simplify(const Expr& e) { return simplifyNode(e.ptr()); }

// ------------------------------------------------------------------- parsing

namespace {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  void skipWs() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool peekIs(char c) {
    skipWs();
    return pos < src.size() && src[pos] == c;
  }

  bool consume(char c) {
    if (peekIs(c)) { ++pos; return true; }
    return false;
  }

  [[noreturn]] void fail(const std::string& what, std::size_t at) {
    throw ParseError(what, at);
  }

  Expr parse() {
    Expr e = parseExprRule();
    skipWs();
    if (pos != src.size()) fail("unexpected trailing input", pos);
    return e;
  }

  Expr parseExprRule() {
    Expr e = parseTerm();
    for (;;) {
      if (consume('+')) e = e + parseTerm();
      else if (consume('-')) e = e - parseTerm();
      else return e;
    }
  }

  Expr parseTerm() {
    Expr e = parseFactor();
    for (;;) {
      if (consume('*')) e = e * parseFactor();
      else if (consume('/')) e = e / parseFactor();
      else return e;
    }
  }

  Expr parseFactor() {
    Expr base = parseBase();
    if (consume('^')) return pow(base, parseFactor());
    return base;
  }

  Expr parseBase() {
    skipWs();
    if (pos >= src.size()) fail("unexpected end of input", pos);
    char c = src[pos];
    if (c == '-') {
      ++pos;
      Expr e = parseBase();
      // a negated literal is a literal
      if (e.node().op == ExprOp::Const)
        return e.node().exact ? Expr::number(-e.node().q) : Expr::number(-e.node().v);
      return Expr::unary(ExprOp::Neg, e);
    }
    if (c == '(') {
      ++pos;
      Expr e = parseExprRule();
      if (!consume(')')) fail("expected ')'", pos);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parseNumber();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parseIdent();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  Expr parseNumber() {
    std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    bool hasFrac = false, hasExp = false;
    if (pos < src.size() && src[pos] == '.') {
      hasFrac = true;
      ++pos;
      if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
        fail("malformed number", pos);
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t save = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        hasExp = true;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = save;  // the 'e' belongs to a following identifier, not this literal
      }
    }
    std::string text = src.substr(start, pos - start);
    if (start == pos) fail("malformed number", start);
    try {
      return Expr::number(Rational::parse(text));
    } catch (const std::invalid_argument&) {
      // Literal with too many digits for exact form; keep it as a float.
      double v = 0.0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc()) fail("malformed number", start);
      (void)hasFrac; (void)hasExp;
      return Expr::number(v);
    }
  }

  Expr parseIdent() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string name = src.substr(start, pos - start);
    if (!peekIs('(')) {
      if (name == "x") return Expr::variable(0);
      if (name == "y") return Expr::variable(1);
      if (name == "z") return Expr::variable(2);
      return Expr::param(name);
    }
    ++pos;  // '('
    std::vector<Expr> args;
    if (!peekIs(')')) {
      args.push_back(parseExprRule());
      while (consume(',')) args.push_back(parseExprRule());
    }
    if (!consume(')')) fail("expected ')'", pos);

    auto needArgs = [&](std::size_t k) {
      if (args.size() != k)
        fail("function '" + name + "' expects " + std::to_string(k) +
             " argument(s), got " + std::to_string(args.size()), start);
    };
    if (name == "sin") { needArgs(1); return sin(args[0]); }
    if (name == "cos") { needArgs(1); return cos(args[0]); }
    if (name == "exp") { needArgs(1); return exp(args[0]); }
    if (name == "ln") { needArgs(1); return ln(args[0]); }
    if (name == "sqrt") { needArgs(1); return sqrt(args[0]); }
    if (name == "atan2") { needArgs(2); return atan2(args[0], args[1]); }
    fail("unknown function '" + name + "'", start);
  }
};

}  // namespace

Expr parseExpr(const std::string& text) {
  Parser p(text);
  return p.parse();
}

// ------------------------------------------------------------------ printing

namespace {

// Precedence levels mirroring the grammar: additive 1, multiplicative 2,
// power 3, base 4. A child printed at a context level above its own
// precedence gets parentheses.
int precedenceOf(const Expr::NodePtr& n) {
  switch (n->op) {
    case ExprOp::Const:
      // an exact fraction prints as a quotient of literals, so it binds like one
      return (n->exact && !n->q.isInteger()) ? 2 : 4;
    case ExprOp::Add: case ExprOp::Sub: return 1;
    case ExprOp::Mul: case ExprOp::Div: return 2;
    case ExprOp::Pow: return 3;
    default: return 4;  // atoms, calls, and unary minus (a grammar `base`)
  }
}

void printNode(const Expr::NodePtr& n, std::string& out);

void printChild(const Expr::NodePtr& n, int context, std::string& out) {
  if (precedenceOf(n) < context) {
    out += '(';
    printNode(n, out);
    out += ')';
  } else {
    printNode(n, out);
  }
}

std::string doubleText(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void printNode(const Expr::NodePtr& n, std::string& out) {
  switch (n->op) {
    case ExprOp::Const:
      if (n->exact) {
        const Rational& q = n->q;
        if (q.num() < 0) {
          // unary minus is a grammar base; the magnitude keeps its own parens rules
          out += '-';
          Rational m = -q;
          out += m.isInteger() ? std::to_string(m.num()) : m.str();
        } else {
          out += q.isInteger() ? std::to_string(q.num()) : q.str();
        }
      } else {
        if (n->v < 0) {
          out += '-';
          out += doubleText(-n->v);
        } else {
          out += doubleText(n->v);
        }
      }
      return;
    case ExprOp::Var:
      out += (n->axis == 0 ? "x" : n->axis == 1 ? "y" : "z");
      return;
    case ExprOp::Param:
      out += n->name;
      return;
    case ExprOp::NumFn:
      out += "<numfn:" + n->name + ">";
      return;
    case ExprOp::Neg:
      out += '-';
      // operand of unary minus must itself be a base
      if (precedenceOf(n->a) < 4) {
        out += '(';
        printNode(n->a, out);
        out += ')';
      } else {
        printNode(n->a, out);
      }
      return;
    case ExprOp::Sin: case ExprOp::Cos: case ExprOp::Exp:
    case ExprOp::Ln: case ExprOp::Sqrt: {
      const char* f = n->op == ExprOp::Sin ? "sin" : n->op == ExprOp::Cos ? "cos"
                    : n->op == ExprOp::Exp ? "exp" : n->op == ExprOp::Ln ? "ln" : "sqrt";
      out += f;
      out += '(';
      printNode(n->a, out);
      out += ')';
      return;
    }
    case ExprOp::Atan2:
      out += "atan2(";
      printNode(n->a, out);
      out += ", ";
      printNode(n->b, out);
      out += ')';
      return;
    case ExprOp::Add:
      printChild(n->a, 1, out);
      out += " + ";
      printChild(n->b, 2, out);
      return;
    case ExprOp::Sub:
      printChild(n->a, 1, out);
      out += " - ";
      printChild(n->b, 2, out);
      return;
    case ExprOp::Mul:
      printChild(n->a, 2, out);
      out += '*';
      printChild(n->b, 3, out);
      return;
    case ExprOp::Div:
      printChild(n->a, 2, out);
      out += '/';
      printChild(n->b, 3, out);
      return;
    case ExprOp::Pow:
      printChild(n->a, 4, out);
      out += '^';
      printChild(n->b, 3, out);
      return;
  }
}

}  // namespace

std::string printExpr(const Expr& e) {
  std::string out;
  printNode(e.ptr(), out);
  return out;
}

// ------------------------------------------------------------ differentiation

namespace {

Expr diffNode(const Expr::NodePtr& n, int axis) {
  switch (n->op) {
    case ExprOp::Const:
    case ExprOp::Param:
      return Expr::zero();
    case ExprOp::Var:
      return n->axis == axis ? Expr::one() : Expr::zero();
    case ExprOp::NumFn:
      throw std::logic_error("differentiate: opaque numeric node '" + n->name + "'");
    default:
      break;
  }

  Expr a = wrap(n->a);
  Expr da = diffNode(n->a, axis);
  switch (n->op) {
    case ExprOp::Neg: return -da;
    case ExprOp::Sin: return cos(a) * da;
    case ExprOp::Cos: return -(sin(a) * da);
    case ExprOp::Exp: return exp(a) * da;
    case ExprOp::Ln: return da / a;
    case ExprOp::Sqrt: return da / (Expr::number(Rational(2)) * sqrt(a));
    default:
      break;
  }

  Expr b = wrap(n->b);
  Expr db = diffNode(n->b, axis);
  switch (n->op) {
    case ExprOp::Add: return da + db;
    case ExprOp::Sub: return da - db;
    case ExprOp::Mul: return da * b + a * db;
    case ExprOp::Div: return (da * b - a * db) / (b * b);
    case ExprOp::Pow: {
      if (n->b->op == ExprOp::Const && n->b->exact && n->b->q.isInteger()) {
        // d(a^k) = k a^(k-1) a', valid for any base with integer k
        Rational k = n->b->q;
        return Expr::number(k) * pow(a, Expr::number(k - Rational(1))) * da;
      }
      // general case through a^b = e^{b ln a}
      return pow(a, b) * (db * ln(a) + b * da / a);
    }
    case ExprOp::Atan2:
      // d atan2(u, v) = (u' v - u v') / (u^2 + v^2)
      return (da * b - a * db) / (a * a + b * b);
    default:
      break;
  }
  throw std::logic_error("differentiate: unhandled op");
}

}  // namespace

Expr differentiate(const Expr& e, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("differentiate: axis out of range");
  return simplify(diffNode(e.ptr(), axis));
}

// ---------------------------------------------------------------- traversal

namespace {

Expr substNode(const Expr::NodePtr& n,
               const std::map<std::string, Expr>* params,
               const std::array<Expr, 3>* vars) {
  switch (n->op) {
    case ExprOp::Const:
    case ExprOp::NumFn:
      return wrap(n);
    case ExprOp::Param:
      if (params) {
        auto it = params->find(n->name);
        if (it != params->end()) return it->second;
      }
      return wrap(n);
    case ExprOp::Var:
      if (vars) return (*vars)[static_cast<std::size_t>(n->axis)];
      return wrap(n);
    default:
      break;
  }
  Expr a = substNode(n->a, params, vars);
  if (isUnary(n->op)) return Expr::unary(n->op, a);
  Expr b = substNode(n->b, params, vars);
  return Expr::binary(n->op, a, b);
}

}  // namespace

Expr substituteParams(const Expr& e, const std::map<std::string, Expr>& repl) {
  return substNode(e.ptr(), &repl, nullptr);
}

Expr substituteVars(const Expr& e, const std::array<Expr, 3>& repl) {
  return substNode(e.ptr(), nullptr, &repl);
}

void collectParams(const Expr& e, std::set<std::string>& out) {
  const auto& n = e.node();
  if (n.op == ExprOp::Param) {
    out.insert(n.name);
    return;
  }
  if (n.a) collectParams(wrap(n.a), out);
  if (n.b) collectParams(wrap(n.b), out);
}

bool containsNumFn(const Expr& e) {
  const auto& n = e.node();
  if (n.op == ExprOp::NumFn) return true;
  if (n.a && containsNumFn(wrap(n.a))) return true;
  if (n.b && containsNumFn(wrap(n.b))) return true;
  return false;
}

int treeSize(const Expr& e) {
  const auto& n = e.node();
  int s = 1;
  if (n.a) s += treeSize(wrap(n.a));
  if (n.b) s += treeSize(wrap(n.b));
  return s;
}

// ------------------------------------------------------------ vector calculus

VecExpr gradient(const Expr& e) {
  return {differentiate(e, 0), differentiate(e, 1), differentiate(e, 2)};
}

VecExpr curl(const VecExpr& v) {
  return {
      simplify(differentiate(v[2], 1) - differentiate(v[1], 2)),
      simplify(differentiate(v[0], 2) - differentiate(v[2], 0)),
      simplify(differentiate(v[1], 0) - differentiate(v[0], 1)),
  };
}

Expr divergence(const VecExpr& v) {
  return simplify(differentiate(v[0], 0) + differentiate(v[1], 1) + differentiate(v[2], 2));
}

}  // namespace lorsym
