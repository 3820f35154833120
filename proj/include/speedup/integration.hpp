#pragma once

// Symbolic integration as a rule-learning domain. Expressions are ASTs over
// the integration grammar; operators rewrite the subexpression at a location;
// the interpreter visits subexpressions in post-order.
//
// Subtraction and division group to the right, as the grammar dictates:
// "a - b + c" is a - (b + c).

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "speedup/control_rules.hpp"
#include "speedup/core.hpp"
#include "speedup/grammar.hpp"

namespace speedup::integration {

// ---------------------------------------------------------------- grammar

inline std::string base_grammar_text() {
  return "# Integration problems\n"
         "Prob -> ∫ Exp d Var | D Exp Var\n"
         "Exp -> Term | Term + Exp | Term - Exp\n"
         "Term -> P-term | P-term * Term | P-term / Term\n"
         "P-term -> Const | Var | ( - Term ) | Trig | Power | Prob | ( Exp )\n"
         "Power -> ( Var ^ Term )\n"
         "Trig -> ( sin Var ) | ( cos Var )\n"
         "Const -> Int | a | k\n"
         "Var -> x\n"
         "Int -> 0 | 1 | 2 | 3 | 4 | 5 | 6 | 7 | 8 | 9\n";
}

constexpr int max_int = 99;

/// The base grammar plus two-digit integer literals, which constant folding
/// produces (e.g. an exponent 9 + 1).
inline std::string grammar_text() {
  std::string text = base_grammar_text() + "# two-digit literals\nInt ->";
  for (int n = 10; n <= max_int; ++n) text += (n > 10 ? " | " : " ") + std::to_string(n);
  return text + "\n";
}

inline const Grammar& base_grammar() {
  static const Grammar g = Grammar::from_text(base_grammar_text());
  return g;
}

inline const Grammar& grammar() {
  static const Grammar g = Grammar::from_text(grammar_text());
  return g;
}

namespace detail {
struct Symbols {
  Symbol prob, exp, term, pterm, power, trig, cnst, var, int_;
  Symbol integral, dd, d, x, plus, minus, times, divide, lparen, rparen, caret, sin, cos, a, k;
  std::array<Symbol, max_int + 1> num{};

  explicit Symbols(const Grammar& g)
      : prob(g.symbol("Prob")), exp(g.symbol("Exp")), term(g.symbol("Term")), pterm(g.symbol("P-term")),
        power(g.symbol("Power")), trig(g.symbol("Trig")), cnst(g.symbol("Const")), var(g.symbol("Var")),
        int_(g.symbol("Int")), integral(g.symbol("∫")), dd(g.symbol("D")), d(g.symbol("d")), x(g.symbol("x")),
        plus(g.symbol("+")), minus(g.symbol("-")), times(g.symbol("*")), divide(g.symbol("/")),
        lparen(g.symbol("(")), rparen(g.symbol(")")), caret(g.symbol("^")), sin(g.symbol("sin")),
        cos(g.symbol("cos")), a(g.symbol("a")), k(g.symbol("k")) {
    for (int n = 0; n <= max_int; ++n) num[static_cast<std::size_t>(n)] = g.symbol(std::to_string(n));
  }
};

inline const Symbols& symbols() {
  static const Symbols s(grammar());
  return s;
}
}  // namespace detail

// ---------------------------------------------------------------- AST

enum class Kind : std::uint8_t { integral, deriv, sum, diff, prod, quot, neg, power, sin, cos, integer, named, var };

struct Node;

/// Immutable expression; copies share structure. Equality is structural.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  explicit operator bool() const { return static_cast<bool>(n_); }
  const Node& node() const { return *n_; }
  Kind kind() const;
  std::size_t arity() const;
  const Expr& child(std::size_t i) const;
  int value() const;
  char name() const;

  bool is(Kind k) const { return n_ && kind() == k; }
  bool is_int(int v) const { return is(Kind::integer) && value() == v; }
  bool is_const() const { return is(Kind::integer) || is(Kind::named); }

 private:
  std::shared_ptr<const Node> n_;
};

struct Node {
  Kind kind = Kind::var;
  int value = 0;   // integer literal
  char name = 0;   // 'a', 'k' or 'x'
  std::vector<Expr> kids;
};

inline Kind Expr::kind() const { return n_->kind; }
inline std::size_t Expr::arity() const { return n_->kids.size(); }
inline const Expr& Expr::child(std::size_t i) const { return n_->kids.at(i); }
inline int Expr::value() const { return n_->value; }
inline char Expr::name() const { return n_->name; }

inline bool operator==(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (&a.node() == &b.node()) return true;
  if (a.kind() != b.kind() || a.value() != b.value() || a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.child(i) == b.child(i))) return false;
  return true;
}

namespace detail {
inline Expr make(Kind k, std::vector<Expr> kids, int value = 0, char name = 0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = value;
  n->name = name;
  n->kids = std::move(kids);
  return Expr(std::move(n));
}
}  // namespace detail

inline Expr var() { return detail::make(Kind::var, {}, 0, 'x'); }
inline Expr num(int n) {
  if (n < 0 || n > max_int) throw ParameterError("integer literal " + std::to_string(n) + " out of range");
  return detail::make(Kind::integer, {}, n);
}
inline Expr named(char c) {
  if (c != 'a' && c != 'k') throw ParameterError(std::string("unknown named constant '") + c + "'");
  return detail::make(Kind::named, {}, 0, c);
}
inline Expr integral(Expr body) { return detail::make(Kind::integral, {std::move(body), var()}); }
inline Expr deriv(Expr body) { return detail::make(Kind::deriv, {std::move(body), var()}); }
inline Expr sum(Expr a, Expr b) { return detail::make(Kind::sum, {std::move(a), std::move(b)}); }
inline Expr diff(Expr a, Expr b) { return detail::make(Kind::diff, {std::move(a), std::move(b)}); }
inline Expr prod(Expr a, Expr b) { return detail::make(Kind::prod, {std::move(a), std::move(b)}); }
inline Expr quot(Expr a, Expr b) { return detail::make(Kind::quot, {std::move(a), std::move(b)}); }
inline Expr neg(Expr e) { return detail::make(Kind::neg, {std::move(e)}); }
inline Expr power(Expr exponent) { return detail::make(Kind::power, {var(), std::move(exponent)}); }
inline Expr sin_x() { return detail::make(Kind::sin, {var()}); }
inline Expr cos_x() { return detail::make(Kind::cos, {var()}); }

/// Grammar category of the phrase an AST node denotes.
inline Symbol category_of(const Expr& e) {
  const auto& s = detail::symbols();
  switch (e.kind()) {
    case Kind::integral:
    case Kind::deriv: return s.prob;
    case Kind::sum:
    case Kind::diff: return s.exp;
    case Kind::prod:
    case Kind::quot: return s.term;
    case Kind::neg: return s.pterm;
    case Kind::power: return s.power;
    case Kind::sin:
    case Kind::cos: return s.trig;
    case Kind::integer:
    case Kind::named: return s.cnst;
    case Kind::var: return s.var;
  }
  return s.exp;
}

// ---------------------------------------------------------------- parse trees

/// The grammar's parse tree of an expression, built directly from the AST,
/// with the tree node of every subexpression recorded in post-order.
struct ExprTree {
  struct Unit {
    Location location;
    std::uint32_t node;
  };
  Tree tree;
  std::vector<Unit> units;
};

namespace detail {

class TreeEmitter {
 public:
  explicit TreeEmitter(ExprTree& out) : out_(out), s_(symbols()) {}

  void category(const Expr& e, std::uint32_t at) {
    switch (e.kind()) {
      case Kind::integral:
      case Kind::deriv: return prob(e, at);
      case Kind::sum:
      case Kind::diff: return exp(e, at);
      case Kind::prod:
      case Kind::quot: return term(e, at);
      case Kind::neg: return pterm(e, at);
      case Kind::power: return pow(e, at);
      case Kind::sin:
      case Kind::cos: return trig(e, at);
      case Kind::integer:
      case Kind::named: return cnst(e, at);
      case Kind::var: return var(e, at);
    }
  }

 private:
  std::uint32_t add(std::uint32_t at, std::initializer_list<Symbol> labels) {
    return out_.tree.add_children(at, std::span<const Symbol>(labels.begin(), labels.size()));
  }

  void record(std::uint32_t at) { out_.units.push_back({path_, at}); }

  template <class F>
  void in_child(int i, F&& f) {
    path_.push_back(i);
    f();
    path_.pop_back();
  }

  void exp(const Expr& e, std::uint32_t at) {
    if (e.is(Kind::sum) || e.is(Kind::diff)) {
      const auto c = add(at, {s_.term, e.is(Kind::sum) ? s_.plus : s_.minus, s_.exp});
      in_child(0, [&] { term(e.child(0), c); });
      in_child(1, [&] { exp(e.child(1), c + 2); });
      record(at);
    } else {
      term(e, add(at, {s_.term}));
    }
  }

  void term(const Expr& e, std::uint32_t at) {
    if (e.is(Kind::prod) || e.is(Kind::quot)) {
      const auto c = add(at, {s_.pterm, e.is(Kind::prod) ? s_.times : s_.divide, s_.term});
      in_child(0, [&] { pterm(e.child(0), c); });
      in_child(1, [&] { term(e.child(1), c + 2); });
      record(at);
    } else {
      pterm(e, add(at, {s_.pterm}));
    }
  }

  void pterm(const Expr& e, std::uint32_t at) {
    switch (e.kind()) {
      case Kind::integer:
      case Kind::named: return cnst(e, add(at, {s_.cnst}));
      case Kind::var: return var(e, add(at, {s_.var}));
      case Kind::neg: {
        const auto c = add(at, {s_.lparen, s_.minus, s_.term, s_.rparen});
        in_child(0, [&] { term(e.child(0), c + 2); });
        return record(at);
      }
      case Kind::sin:
      case Kind::cos: return trig(e, add(at, {s_.trig}));
      case Kind::power: return pow(e, add(at, {s_.power}));
      case Kind::integral:
      case Kind::deriv: return prob(e, add(at, {s_.prob}));
      default: {
        const auto c = add(at, {s_.lparen, s_.exp, s_.rparen});
        return exp(e, c + 1);
      }
    }
  }

  void prob(const Expr& e, std::uint32_t at) {
    if (e.is(Kind::integral)) {
      const auto c = add(at, {s_.integral, s_.exp, s_.d, s_.var});
      in_child(0, [&] { exp(e.child(0), c + 1); });
      in_child(1, [&] { var(e.child(1), c + 3); });
    } else {
      const auto c = add(at, {s_.dd, s_.exp, s_.var});
      in_child(0, [&] { exp(e.child(0), c + 1); });
      in_child(1, [&] { var(e.child(1), c + 2); });
    }
    record(at);
  }

  void pow(const Expr& e, std::uint32_t at) {
    const auto c = add(at, {s_.lparen, s_.var, s_.caret, s_.term, s_.rparen});
    in_child(0, [&] { var(e.child(0), c + 1); });
    in_child(1, [&] { term(e.child(1), c + 3); });
    record(at);
  }

  void trig(const Expr& e, std::uint32_t at) {
    const auto c = add(at, {s_.lparen, e.is(Kind::sin) ? s_.sin : s_.cos, s_.var, s_.rparen});
    in_child(0, [&] { var(e.child(0), c + 2); });
    record(at);
  }

  void cnst(const Expr& e, std::uint32_t at) {
    if (e.is(Kind::integer)) {
      const auto c = add(at, {s_.int_});
      add(c, {s_.num.at(static_cast<std::size_t>(e.value()))});
    } else {
      add(at, {e.name() == 'a' ? s_.a : s_.k});
    }
    record(at);
  }

  void var(const Expr&, std::uint32_t at) {
    add(at, {s_.x});
    record(at);
  }

  ExprTree& out_;
  const Symbols& s_;
  Location path_;
};

}  // namespace detail

/// Parse tree of `e` rooted at its own category.
inline ExprTree expr_tree(const Expr& e) {
  ExprTree out;
  out.tree = Tree(category_of(e));
  out.tree.reserve(64);
  out.units.reserve(32);
  detail::TreeEmitter(out).category(e, 0);
  return out;
}

inline std::vector<Symbol> to_symbols(const Expr& e) { return tree_yield(expr_tree(e).tree); }

inline std::vector<std::string> to_tokens(const Expr& e) {
  std::vector<std::string> out;
  for (Symbol s : to_symbols(e)) out.push_back(grammar().name(s));
  return out;
}

inline std::string to_string(const Expr& e) { return grammar().names(to_symbols(e)); }

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

// ---------------------------------------------------------------- lexer/parser

/// Splits text into grammar tokens. Letter runs split into `sin`, `cos` and
/// single letters; digit runs are one token. Whitespace is optional.
inline std::vector<std::string> tokenize(std::string_view text) {
  static const std::string integral_sign = "∫";
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (text.substr(i, integral_sign.size()) == integral_sign) {
      out.push_back(integral_sign);
      i += integral_sign.size();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      if (text.substr(i, 3) == "sin" || text.substr(i, 3) == "cos") {
        out.emplace_back(text.substr(i, 3));
        i += 3;
      } else {
        out.emplace_back(1, c);
        ++i;
      }
    } else if (std::string_view("()+-*/^").find(c) != std::string_view::npos) {
      out.emplace_back(1, c);
      ++i;
    } else {
      throw ParseError(out.size(), std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

namespace detail {
inline Expr from_tree(TreeRef t) {
  const auto& g = grammar();
  const auto& s = symbols();
  const Symbol l = t.label();
  auto kid = [&](std::size_t i) { return t.child(i); };
  if (l == s.prob) {
    if (kid(0).label() == s.integral) return integral(from_tree(kid(1)));
    return deriv(from_tree(kid(1)));
  }
  if (l == s.exp || l == s.term) {
    if (t.arity() == 1) return from_tree(kid(0));
    const Symbol op = kid(1).label();
    Expr a = from_tree(kid(0)), b = from_tree(kid(2));
    if (op == s.plus) return sum(a, b);
    if (op == s.minus) return diff(a, b);
    if (op == s.times) return prod(a, b);
    return quot(a, b);
  }
  if (l == s.pterm) {
    if (t.arity() == 1) return from_tree(kid(0));
    if (t.arity() == 4) return neg(from_tree(kid(2)));
    return from_tree(kid(1));
  }
  if (l == s.power) return power(from_tree(kid(3)));
  if (l == s.trig) return kid(1).label() == s.sin ? sin_x() : cos_x();
  if (l == s.cnst) {
    if (kid(0).label() == s.int_) return num(std::stoi(g.name(kid(0).child(0).label())));
    return named(g.name(kid(0).label())[0]);
  }
  if (l == s.var) return var();
  throw ParseError(0, "unexpected node '" + g.name(l) + "'");
}
}  // namespace detail

/// Parses a token sequence derivable from `category` (default: any
/// expression) into an AST.
inline Expr parse_tokens(const std::vector<std::string>& tokens, std::optional<Symbol> category = std::nullopt) {
  const auto& g = grammar();
  const auto symbols = g.to_symbols(tokens);
  const Tree t = parse(g, symbols, category.value_or(detail::symbols().exp));
  return detail::from_tree(t.root());
}

inline Expr parse_expression(std::string_view text) { return parse_tokens(tokenize(text)); }

// ---------------------------------------------------------------- locations

inline const Expr& subexpr(const Expr& e, const Location& loc) {
  const Expr* cur = &e;
  for (int i : loc) {
    if (i < 0 || static_cast<std::size_t>(i) >= cur->arity())
      throw LocationError("location '" + location_to_string(loc) + "' does not resolve");
    cur = &cur->child(static_cast<std::size_t>(i));
  }
  return *cur;
}

namespace detail {
inline Expr replace(const Expr& e, const Location& loc, std::size_t depth, const Expr& with) {
  if (depth == loc.size()) return with;
  const auto i = static_cast<std::size_t>(loc[depth]);
  std::vector<Expr> kids = e.node().kids;
  kids[i] = replace(kids[i], loc, depth + 1, with);
  return make(e.kind(), std::move(kids), e.value(), e.name());
}
}  // namespace detail

inline Expr replace_at(const Expr& e, const Location& loc, const Expr& with) {
  subexpr(e, loc);  // validates
  return detail::replace(e, loc, 0, with);
}

// ---------------------------------------------------------------- operators

/// A structural rewrite; `rewrite` returns nullopt where the pattern fails.
struct RewriteOp {
  int id = 0;
  std::string name;
  std::function<std::optional<Expr>(const Expr&)> rewrite;
};

constexpr int first_simplification_op = 16;

namespace detail {
using R = std::optional<Expr>;

inline std::vector<RewriteOp> build_ops() {
  std::vector<RewriteOp> ops;
  auto op = [&](std::string name, std::function<R(const Expr&)> f) {
    ops.push_back(RewriteOp{static_cast<int>(ops.size() + 1), std::move(name), std::move(f)});
  };
  auto body_of = [](const Expr& e, Kind k) -> const Expr* {
    if (!e.is(Kind::integral) || !e.child(0).is(k)) return nullptr;
    return &e.child(0);
  };
  auto dbody = [](const Expr& e, Kind k) -> const Expr* {
    if (!e.is(Kind::deriv) || !e.child(0).is(k)) return nullptr;
    return &e.child(0);
  };

  // Integration table.
  op("int-const-factor", [=](const Expr& e) -> R {  // ∫ c·f dx = c·∫ f dx
    auto b = body_of(e, Kind::prod);
    if (!b || !b->child(0).is_const()) return {};
    return prod(b->child(0), integral(b->child(1)));
  });
  op("int-difference", [=](const Expr& e) -> R {
    auto b = body_of(e, Kind::diff);
    if (!b) return {};
    return diff(integral(b->child(0)), integral(b->child(1)));
  });
  op("int-sum", [=](const Expr& e) -> R {
    auto b = body_of(e, Kind::sum);
    if (!b) return {};
    return sum(integral(b->child(0)), integral(b->child(1)));
  });
  op("int-by-parts", [=](const Expr& e) -> R {  // ∫ f·g dx = g·∫ f dx − ∫ (∫ f dx)·(D g x) dx
    auto b = body_of(e, Kind::prod);
    if (!b) return {};
    const Expr& f = b->child(0);
    const Expr& g = b->child(1);
    return diff(prod(g, integral(f)), integral(prod(integral(f), deriv(g))));
  });
  op("int-power", [=](const Expr& e) -> R {  // ∫ x^n dx = x^(n+1)/(n+1)
    auto b = body_of(e, Kind::power);
    if (!b || !b->child(1).is(Kind::integer)) return {};
    const Expr& n = b->child(1);
    return quot(power(sum(n, num(1))), sum(n, num(1)));
  });
  op("int-sin", [=](const Expr& e) -> R {
    if (!body_of(e, Kind::sin)) return {};
    return neg(cos_x());
  });
  op("int-cos", [=](const Expr& e) -> R {
    if (!body_of(e, Kind::cos)) return {};
    return sin_x();
  });
  op("int-negation", [=](const Expr& e) -> R {
    auto b = body_of(e, Kind::neg);
    if (!b) return {};
    return neg(integral(b->child(0)));
  });
  op("int-var", [=](const Expr& e) -> R {
    if (!body_of(e, Kind::var)) return {};
    return quot(power(num(2)), num(2));
  });
  op("int-const", [=](const Expr& e) -> R {
    if (!e.is(Kind::integral) || !e.child(0).is_const()) return {};
    return prod(e.child(0), var());
  });

  // Differentiation.
  op("d-const", [=](const Expr& e) -> R {
    if (!e.is(Kind::deriv) || !e.child(0).is_const()) return {};
    return num(0);
  });
  op("d-var", [=](const Expr& e) -> R {
    if (!dbody(e, Kind::var)) return {};
    return num(1);
  });
  op("d-sin", [=](const Expr& e) -> R {
    if (!dbody(e, Kind::sin)) return {};
    return cos_x();
  });
  op("d-cos", [=](const Expr& e) -> R {
    if (!dbody(e, Kind::cos)) return {};
    return neg(sin_x());
  });
  op("d-power", [=](const Expr& e) -> R {  // D x^n x = n·x^(n−1), n ≥ 1
    auto b = dbody(e, Kind::power);
    if (!b || !b->child(1).is(Kind::integer) || b->child(1).value() < 1) return {};
    const Expr& n = b->child(1);
    return prod(n, power(diff(n, num(1))));
  });

  // Simplification.
  auto ints = [](const Expr& e, Kind k) {
    return e.is(k) && e.child(0).is(Kind::integer) && e.child(1).is(Kind::integer);
  };
  auto lit = [](long v) -> R {
    if (v < 0 || v > max_int) return {};
    return num(static_cast<int>(v));
  };
  op("fold-add", [=](const Expr& e) -> R {
    if (!ints(e, Kind::sum)) return {};
    return lit(long{e.child(0).value()} + e.child(1).value());
  });
  op("fold-sub", [=](const Expr& e) -> R {
    if (!ints(e, Kind::diff)) return {};
    return lit(long{e.child(0).value()} - e.child(1).value());
  });
  op("fold-mul", [=](const Expr& e) -> R {
    if (!ints(e, Kind::prod)) return {};
    return lit(long{e.child(0).value()} * e.child(1).value());
  });
  op("fold-div", [=](const Expr& e) -> R {
    if (!ints(e, Kind::quot)) return {};
    const int a = e.child(0).value(), b = e.child(1).value();
    if (b == 0 || a % b != 0) return {};
    return lit(a / b);
  });
  op("add-zero-left", [=](const Expr& e) -> R {
    if (!e.is(Kind::sum) || !e.child(0).is_int(0)) return {};
    return e.child(1);
  });
  op("add-zero-right", [=](const Expr& e) -> R {
    if (!e.is(Kind::sum) || !e.child(1).is_int(0)) return {};
    return e.child(0);
  });
  op("mul-zero-left", [=](const Expr& e) -> R {
    if (!e.is(Kind::prod) || !e.child(0).is_int(0)) return {};
    return num(0);
  });
  op("mul-zero-right", [=](const Expr& e) -> R {
    if (!e.is(Kind::prod) || !e.child(1).is_int(0)) return {};
    return num(0);
  });
  op("mul-one-left", [=](const Expr& e) -> R {
    if (!e.is(Kind::prod) || !e.child(0).is_int(1)) return {};
    return e.child(1);
  });
  op("mul-one-right", [=](const Expr& e) -> R {
    if (!e.is(Kind::prod) || !e.child(1).is_int(1)) return {};
    return e.child(0);
  });
  op("pow-one", [=](const Expr& e) -> R {
    if (!e.is(Kind::power) || !e.child(1).is_int(1)) return {};
    return var();
  });
  op("pow-zero", [=](const Expr& e) -> R {
    if (!e.is(Kind::power) || !e.child(1).is_int(0)) return {};
    return num(1);
  });
  op("neg-neg", [=](const Expr& e) -> R {
    if (!e.is(Kind::neg) || !e.child(0).is(Kind::neg)) return {};
    return e.child(0).child(0);
  });
  op("mul-const-first", [=](const Expr& e) -> R {  // e·c = c·e
    if (!e.is(Kind::prod) || e.child(0).is_const() || !e.child(1).is(Kind::integer)) return {};
    return prod(e.child(1), e.child(0));
  });
  op("mul-pull-const", [=](const Expr& e) -> R {  // e·(c·f) = c·(e·f)
    if (!e.is(Kind::prod) || e.child(0).is_const()) return {};
    const Expr& r = e.child(1);
    if (!r.is(Kind::prod) || !r.child(0).is_const()) return {};
    return prod(r.child(0), prod(e.child(0), r.child(1)));
  });
  return ops;
}
}  // namespace detail

inline const std::vector<RewriteOp>& operators() {
  static const std::vector<RewriteOp> ops = detail::build_ops();
  return ops;
}

inline std::size_t operator_count() { return operators().size(); }

inline const RewriteOp& op(int id) {
  if (id < 1 || static_cast<std::size_t>(id) > operators().size())
    throw ParameterError("operator index " + std::to_string(id) + " out of range");
  return operators()[static_cast<std::size_t>(id - 1)];
}

inline std::optional<Expr> try_apply_at(int op_id, const Expr& e, const Location& loc) {
  const Expr& target = subexpr(e, loc);
  auto out = op(op_id).rewrite(target);
  if (!out) return std::nullopt;
  return replace_at(e, loc, *out);
}

/// Rewrites the subexpression at `loc`. Throws InapplicableOperatorError when
/// the operator's pattern does not match there.
inline Expr apply_at(int op_id, const Expr& e, const Location& loc) {
  auto out = try_apply_at(op_id, e, loc);
  if (!out)
    throw InapplicableOperatorError("operator " + std::to_string(op_id) + " (" + op(op_id).name +
                                    ") does not apply at '" + location_to_string(loc) + "'");
  return *out;
}

namespace detail {
inline bool solved_walk(const Expr& e) {
  if (e.is(Kind::integral) || e.is(Kind::deriv)) return false;
  for (std::size_t id = first_simplification_op; id <= operators().size(); ++id)
    if (operators()[id - 1].rewrite(e)) return false;
  for (std::size_t i = 0; i < e.arity(); ++i)
    if (!solved_walk(e.child(i))) return false;
  return true;
}

inline void post_order(const Expr& e, Location& path, const std::function<bool(const Location&, const Expr&)>& f,
                       bool& stop) {
  for (std::size_t i = 0; i < e.arity() && !stop; ++i) {
    path.push_back(static_cast<int>(i));
    post_order(e.child(i), path, f, stop);
    path.pop_back();
  }
  if (!stop) stop = f(path, e);
}
}  // namespace detail

/// No integral or derivative remains and no simplification applies anywhere.
inline bool is_goal(const Expr& e) { return detail::solved_walk(e); }

/// Calls f(location, subexpression) in post-order until it returns true.
inline void visit_post_order(const Expr& e, const std::function<bool(const Location&, const Expr&)>& f) {
  Location path;
  bool stop = false;
  detail::post_order(e, path, f, stop);
}

struct Applied {
  Expr result;
  Step step;
};

/// One interpreter step with a plain operator list: the first subexpression
/// in post-order where some operator applies, least id first.
inline std::optional<Applied> post_order_step(const std::vector<RewriteOp>& ops, const Expr& e) {
  std::optional<Applied> out;
  visit_post_order(e, [&](const Location& loc, const Expr& sub) {
    for (const auto& o : ops) {
      if (auto r = o.rewrite(sub)) {
        out = Applied{replace_at(e, loc, *r), Step{o.id, loc}};
        return true;
      }
    }
    return false;
  });
  return out;
}

/// One interpreter step with select rules: the first subexpression in
/// post-order whose unit is in some operator's select-set (that operator
/// also applying there), least operator first.
inline std::optional<Applied> post_order_step(const RuleSet& rules, const Expr& e) {
  const ExprTree et = expr_tree(e);
  for (const auto& u : et.units) {
    const TreeRef unit(et.tree, u.node);
    const auto* cands = rules.candidates(unit.label());
    if (!cands) continue;
    for (std::size_t ri : *cands) {
      const auto& rule = rules.rules()[ri];
      if (!rule.select->contains(unit)) continue;
      if (auto r = try_apply_at(rule.op, e, u.location)) return Applied{*r, Step{rule.op, u.location}};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- domain

inline const RuleDomain<Expr>& domain() {
  static const RuleDomain<Expr> d = [] {
    RuleDomain<Expr> rd;
    rd.grammar = &grammar();
    rd.spec.state_size = 1;
    rd.spec.goal_test = [](const Expr& e) { return is_goal(e); };
    for (const auto& o : operators()) {
      const int id = o.id;
      rd.spec.operators.push_back(
          Operator<Expr>{o.name, [id](const Expr& e, const std::optional<Location>& loc) -> std::optional<Expr> {
                           try {
                             return try_apply_at(id, e, loc.value_or(Location{}));
                           } catch (const LocationError&) {
                             return std::nullopt;
                           }
                         }});
    }
    rd.visit_units = [](const Expr& e, const std::function<bool(const Location&, TreeRef)>& visit) {
      const ExprTree et = expr_tree(e);
      for (const auto& u : et.units)
        if (visit(u.location, TreeRef(et.tree, u.node))) return;
    };
    rd.unit_at = [](const Expr& e, const Location& loc) { return expr_tree(subexpr(e, loc)).tree; };
    rd.size = [](const Expr& e) { return tree_yield(expr_tree(e).tree).size(); };
    return rd;
  }();
  return d;
}

// ---------------------------------------------------------------- teacher

struct TeacherRule {
  int op;
  const char* category;
  const char* form;
};

/// Hand-authored select-sets: each operator fires on exactly one sentential
/// form, so the teacher's solver lies in the learner's hypothesis space.
inline const std::vector<TeacherRule>& teacher_forms() {
  static const std::vector<TeacherRule> forms = {
      {1, "Prob", "∫ Const * Term d x"},
      {2, "Prob", "∫ Term - Exp d x"},
      {3, "Prob", "∫ Term + Exp d x"},
      {4, "Prob", "∫ P-term * Term d x"},
      {5, "Prob", "∫ ( x ^ Int ) d x"},
      {6, "Prob", "∫ ( sin x ) d x"},
      {7, "Prob", "∫ ( cos x ) d x"},
      {8, "Prob", "∫ ( - Term ) d x"},
      {9, "Prob", "∫ x d x"},
      {10, "Prob", "∫ Int d x"},
      {11, "Prob", "D Int x"},
      {12, "Prob", "D x x"},
      {13, "Prob", "D ( sin x ) x"},
      {14, "Prob", "D ( cos x ) x"},
      {15, "Prob", "D ( x ^ Int ) x"},
      {16, "Exp", "Int + Int"},
      {17, "Exp", "Int - Int"},
      {18, "Term", "Int * Int"},
      {19, "Term", "Int / Int"},
      {20, "Exp", "0 + Exp"},
      {21, "Exp", "Term + 0"},
      {22, "Term", "0 * Term"},
      {23, "Term", "P-term * 0"},
      {24, "Term", "1 * Term"},
      {25, "Term", "P-term * 1"},
      {26, "Power", "( x ^ 1 )"},
      {27, "Power", "( x ^ 0 )"},
      {28, "P-term", "( - ( - Term ) )"},
      {29, "Term", "P-term * Int"},
      {30, "Term", "P-term * Int * Term"},
  };
  return forms;
}

inline const RuleSet& teacher_rules() {
  static const RuleSet rules = [] {
    const auto& g = grammar();
    RuleSet r(operator_count());
    for (const auto& t : teacher_forms()) r.set(t.op, SententialForm::from_text(g, t.form, g.symbol(t.category)));
    return r;
  }();
  return rules;
}

/// Runs the post-order interpreter with the teacher's rules.
inline Solution teacher_solve(const Expr& e) { return rule_solve(teacher_rules(), domain(), e); }

// ---------------------------------------------------------------- problems

/// ∫ c1·x^p + t2·x² + t3·x + t4 dx. Term choices index {sin x, cos x, 0..9}.
struct ProblemChoices {
  int c1 = 0;  // 0..9
  int p = 3;   // 3..9
  int t2 = 0;  // 0..11
  int t3 = 0;
  int t4 = 0;
};

constexpr int term_choices = 12;

inline Expr term_choice(int t) {
  if (t == 0) return sin_x();
  if (t == 1) return cos_x();
  if (t >= 2 && t < term_choices) return num(t - 2);
  throw ParameterError("term choice out of range");
}

inline Expr build_problem(const ProblemChoices& c) {
  if (c.c1 < 0 || c.c1 > 9 || c.p < 3 || c.p > 9) throw ParameterError("problem coefficient out of range");
  return integral(sum(prod(num(c.c1), power(num(c.p))),
                      sum(prod(term_choice(c.t2), power(num(2))), sum(prod(term_choice(c.t3), var()), term_choice(c.t4)))));
}

template <class Rng>
ProblemChoices draw_choices(Rng& rng) {
  std::uniform_int_distribution<int> digit(0, 9), exponent(3, 9), t(0, term_choices - 1);
  ProblemChoices c;
  c.c1 = digit(rng);
  c.p = exponent(rng);
  c.t2 = t(rng);
  c.t3 = t(rng);
  c.t4 = t(rng);
  return c;
}

template <class Rng>
Expr generate_problem(Rng& rng) {
  return build_problem(draw_choices(rng));
}

inline OracleConfig<Expr> oracle_config(std::uint64_t seed) {
  OracleConfig<Expr> c;
  c.problem_generator = [](std::mt19937_64& rng) { return generate_problem(rng); };
  c.teacher = [](const Expr& e) { return teacher_solve(e); };
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------- semantics

/// Value and derivative with respect to x.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

constexpr double named_a = 1.7;
constexpr double named_k = 2.3;

/// Evaluates at x by forward-mode differentiation. Integrals cannot be
/// evaluated; a derivative node yields its body's derivative as value.
inline Dual evaluate(const Expr& e, double x) {
  switch (e.kind()) {
    case Kind::integer: return {static_cast<double>(e.value()), 0.0};
    case Kind::named: return {e.name() == 'a' ? named_a : named_k, 0.0};
    case Kind::var: return {x, 1.0};
    case Kind::sin: return {std::sin(x), std::cos(x)};
    case Kind::cos: return {std::cos(x), -std::sin(x)};
    case Kind::neg: {
      const Dual a = evaluate(e.child(0), x);
      return {-a.v, -a.d};
    }
    case Kind::sum:
    case Kind::diff:
    case Kind::prod:
    case Kind::quot: {
      const Dual a = evaluate(e.child(0), x), b = evaluate(e.child(1), x);
      if (e.is(Kind::sum)) return {a.v + b.v, a.d + b.d};
      if (e.is(Kind::diff)) return {a.v - b.v, a.d - b.d};
      if (e.is(Kind::prod)) return {a.v * b.v, a.d * b.v + a.v * b.d};
      return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    case Kind::power: {
      const Dual n = evaluate(e.child(1), x);
      const double v = std::pow(x, n.v);
      double d = n.v * std::pow(x, n.v - 1.0);
      if (n.d != 0.0) d += v * std::log(x) * n.d;
      return {v, d};
    }
    case Kind::deriv: return {evaluate(e.child(0), x).d, std::nan("")};
    case Kind::integral: throw ParameterError("cannot evaluate an unsolved integral");
  }
  return {};
}

inline bool close(double a, double b, double rel = 1e-6) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline const std::array<double, 3>& sample_points() {
  static const std::array<double, 3> xs = {0.1, 0.5, 1.3};
  return xs;
}

/// The derivative of `answer` matches the integrand of `problem` at the
/// sample points.
inline bool antiderivative_matches(const Expr& problem, const Expr& answer, double rel = 1e-6) {
  if (!problem.is(Kind::integral)) throw ParameterError("problem is not an integral");
  for (double x : sample_points())
    if (!close(evaluate(answer, x).d, evaluate(problem.child(0), x).v, rel)) return false;
  return true;
}

// ---------------------------------------------------------------- examples file

/// `problem-tokens TAB op@path,op@path,...`; ⊥ for no solution.
inline void write_examples(std::ostream& os, const std::vector<Example<Expr>>& examples) {
  for (const auto& ex : examples) os << to_string(ex.problem) << '\t' << solution_to_string(ex.solution) << '\n';
}

inline std::vector<Example<Expr>> read_examples(std::istream& is) {
  std::vector<Example<Expr>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParameterError("examples line without a tab: '" + line + "'");
    out.push_back({parse_expression(line.substr(0, tab)), solution_from_string(line.substr(tab + 1))});
  }
  return out;
}

}  // namespace speedup::integration
