#pragma once

// Unambiguous context-free grammars as a hypothesis language: parse trees,
// caps, most specific common caps (MSC), most specific generalizations (MSG)
// and sentential-form membership.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "speedup/errors.hpp"

namespace speedup {

using Symbol = std::uint32_t;

struct Production {
  Symbol head = 0;
  std::vector<Symbol> body;
};

/// Grammar text format: one or more alternatives per line,
///
///     Head -> sym sym | sym ...
///
/// `#` starts a comment. Heads are the nonterminals, every other symbol is a
/// terminal, and the head of the first production is the start symbol.
/// Empty alternatives are rejected.
class Grammar {
 public:
  static Grammar from_text(std::string_view text) {
    Grammar g;
    std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream words(line);
      std::vector<std::string> w;
      for (std::string s; words >> s;) w.push_back(s);
      if (w.empty()) continue;
      if (w.size() < 3 || w[1] != "->")
        throw GrammarError("line " + std::to_string(line_no) + ": expected 'Head -> body'");
      std::vector<std::vector<std::string>> alts(1);
      for (std::size_t i = 2; i < w.size(); ++i) {
        if (w[i] == "|") {
          alts.emplace_back();
        } else if (w[i] == "->") {
          throw GrammarError("line " + std::to_string(line_no) + ": unexpected '->'");
        } else {
          alts.back().push_back(w[i]);
        }
      }
      for (const auto& a : alts)
        if (a.empty()) throw GrammarError("line " + std::to_string(line_no) + ": empty alternative");
      rules.emplace_back(w[0], std::move(alts));
    }
    if (rules.empty()) throw GrammarError("grammar has no productions");

    for (const auto& [head, alts] : rules) g.intern(head);
    const std::size_t heads = g.names_.size();
    g.nonterminal_.assign(heads, 1);
    for (const auto& [head, alts] : rules) {
      for (const auto& alt : alts) {
        Production p;
        p.head = g.index_.at(head);
        for (const auto& s : alt) p.body.push_back(g.intern(s));
        g.productions_.push_back(std::move(p));
      }
    }
    g.nonterminal_.resize(g.names_.size(), 0);
    g.by_head_.assign(g.names_.size(), {});
    for (std::size_t i = 0; i < g.productions_.size(); ++i) g.by_head_[g.productions_[i].head].push_back(i);
    g.start_ = 0;
    return g;
  }

  Symbol start() const { return start_; }
  std::size_t symbol_count() const { return names_.size(); }
  bool is_nonterminal(Symbol s) const { return s < nonterminal_.size() && nonterminal_[s]; }
  bool is_terminal(Symbol s) const { return s < nonterminal_.size() && !nonterminal_[s]; }
  const std::string& name(Symbol s) const { return names_.at(s); }

  std::optional<Symbol> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Symbol symbol(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw GrammarError("unknown symbol '" + std::string(name) + "'");
  }

  const std::vector<Production>& productions() const { return productions_; }
  const Production& production(std::size_t i) const { return productions_.at(i); }
  const std::vector<std::size_t>& alternatives(Symbol head) const { return by_head_.at(head); }

  std::optional<std::size_t> find_production(Symbol head, std::span<const Symbol> body) const {
    for (std::size_t p : alternatives(head))
      if (std::ranges::equal(productions_[p].body, body)) return p;
    return std::nullopt;
  }

  /// Maps token names to symbols; unknown names are a parse error.
  std::vector<Symbol> to_symbols(const std::vector<std::string>& tokens) const {
    std::vector<Symbol> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto s = find(tokens[i]);
      if (!s) throw ParseError(i, "unknown token '" + tokens[i] + "'");
      out.push_back(*s);
    }
    return out;
  }

  /// Splits on whitespace and maps names to symbols.
  std::vector<Symbol> to_symbols(std::string_view text) const {
    std::istringstream in{std::string(text)};
    std::vector<std::string> tokens;
    for (std::string s; in >> s;) tokens.push_back(s);
    return to_symbols(tokens);
  }

  std::string names(std::span<const Symbol> symbols) const {
    std::string out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i) out += ' ';
      out += name(symbols[i]);
    }
    return out;
  }

  std::string to_text() const {
    std::string out;
    for (Symbol h = 0; h < names_.size(); ++h) {
      if (!is_nonterminal(h)) continue;
      out += names_[h] + " ->";
      bool first = true;
      for (std::size_t p : by_head_[h]) {
        if (!first) out += " |";
        first = false;
        for (Symbol s : productions_[p].body) out += ' ' + names_[s];
      }
      out += '\n';
    }
    return out;
  }

 private:
  Symbol intern(const std::string& s) {
    auto [it, inserted] = index_.try_emplace(s, static_cast<Symbol>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> index_;
  std::vector<char> nonterminal_;
  std::vector<Production> productions_;
  std::vector<std::vector<std::size_t>> by_head_;
  Symbol start_ = 0;
};

class Tree;

/// Non-owning view of one node of a Tree.
class TreeRef {
 public:
  TreeRef(const Tree& tree, std::uint32_t index) : tree_(&tree), index_(index) {}

  Symbol label() const;
  std::size_t arity() const;
  bool is_leaf() const { return arity() == 0; }
  TreeRef child(std::size_t i) const;
  std::uint32_t index() const { return index_; }
  const Tree& tree() const { return *tree_; }

 private:
  const Tree* tree_;
  std::uint32_t index_;
};

/// Ordered labeled tree stored in an arena. The children of a node occupy a
/// contiguous block, so node indices stay valid while the tree grows.
/// Parse trees, caps and sentential-form derivations all use this type.
class Tree {
 public:
  struct Node {
    Symbol label = 0;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
  };

  Tree() = default;
  explicit Tree(Symbol root_label) { nodes_.push_back(Node{root_label, 0, 0}); }

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::uint32_t i) const { return nodes_[i]; }
  TreeRef root() const {
    if (nodes_.empty()) throw ParameterError("empty tree has no root");
    return TreeRef(*this, 0);
  }

  /// Gives `parent` children labeled `labels`; returns the first child index.
  std::uint32_t add_children(std::uint32_t parent, std::span<const Symbol> labels) {
    if (nodes_[parent].count != 0) throw ParameterError("node already has children");
    const auto first = static_cast<std::uint32_t>(nodes_.size());
    for (Symbol s : labels) nodes_.push_back(Node{s, 0, 0});
    nodes_[parent].first = first;
    nodes_[parent].count = static_cast<std::uint32_t>(labels.size());
    return first;
  }

  void reserve(std::size_t n) { nodes_.reserve(n); }

 private:
  std::vector<Node> nodes_;
};

inline Symbol TreeRef::label() const { return tree_->node(index_).label; }
inline std::size_t TreeRef::arity() const { return tree_->node(index_).count; }
inline TreeRef TreeRef::child(std::size_t i) const {
  return TreeRef(*tree_, tree_->node(index_).first + static_cast<std::uint32_t>(i));
}

inline bool same_tree(TreeRef a, TreeRef b) {
  if (a.label() != b.label() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!same_tree(a.child(i), b.child(i))) return false;
  return true;
}

inline bool operator==(const Tree& a, const Tree& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return same_tree(a.root(), b.root());
}

inline std::size_t count_nodes(TreeRef t) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < t.arity(); ++i) n += count_nodes(t.child(i));
  return n;
}

namespace detail {
inline void yield_into(TreeRef t, std::vector<Symbol>& out) {
  if (t.is_leaf()) {
    out.push_back(t.label());
    return;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) yield_into(t.child(i), out);
}

inline void copy_into(TreeRef src, Tree& dst, std::uint32_t at) {
  if (src.is_leaf()) return;
  std::vector<Symbol> labels(src.arity());
  for (std::size_t i = 0; i < src.arity(); ++i) labels[i] = src.child(i).label();
  const auto first = dst.add_children(at, labels);
  for (std::size_t i = 0; i < src.arity(); ++i) copy_into(src.child(i), dst, first + static_cast<std::uint32_t>(i));
}
}  // namespace detail

/// Leaf labels, left to right.
inline std::vector<Symbol> tree_yield(TreeRef t) {
  std::vector<Symbol> out;
  detail::yield_into(t, out);
  return out;
}

inline std::vector<Symbol> tree_yield(const Tree& t) { return tree_yield(t.root()); }

inline Tree copy_subtree(TreeRef t) {
  Tree out(t.label());
  detail::copy_into(t, out, 0);
  return out;
}

/// True iff `cap` is a cap of `tree`: same root, and every cap node either is
/// a leaf or has exactly the children (same labels, same order) of the
/// corresponding tree node.
inline bool is_cap_of(TreeRef cap, TreeRef tree) {
  if (cap.label() != tree.label()) return false;
  if (cap.is_leaf()) return true;
  if (cap.arity() != tree.arity()) return false;
  for (std::size_t i = 0; i < cap.arity(); ++i)
    if (cap.child(i).label() != tree.child(i).label()) return false;
  for (std::size_t i = 0; i < cap.arity(); ++i)
    if (!is_cap_of(cap.child(i), tree.child(i))) return false;
  return true;
}

namespace detail {
inline void msc_into(const std::vector<TreeRef>& nodes, Tree& out, std::uint32_t at) {
  const TreeRef& first = nodes.front();
  if (first.is_leaf()) return;
  for (const auto& n : nodes) {
    if (n.arity() != first.arity()) return;
    for (std::size_t i = 0; i < n.arity(); ++i)
      if (n.child(i).label() != first.child(i).label()) return;
  }
  std::vector<Symbol> labels(first.arity());
  for (std::size_t i = 0; i < first.arity(); ++i) labels[i] = first.child(i).label();
  const auto base = out.add_children(at, labels);
  std::vector<TreeRef> kids;
  kids.reserve(nodes.size());
  for (std::size_t i = 0; i < first.arity(); ++i) {
    kids.clear();
    for (const auto& n : nodes) kids.push_back(n.child(i));
    msc_into(kids, out, base + static_cast<std::uint32_t>(i));
  }
}
}  // namespace detail

/// Most specific common cap: descends all trees together from the root and
/// keeps a node's children iff every tree has the same children there.
inline Tree msc(const std::vector<TreeRef>& trees) {
  if (trees.empty()) throw ParameterError("msc of an empty list");
  for (const auto& t : trees)
    if (t.label() != trees.front().label()) throw IncompatibleTreesError("trees have different root labels");
  Tree out(trees.front().label());
  detail::msc_into(trees, out, 0);
  return out;
}

inline Tree msc(const std::vector<Tree>& trees) {
  std::vector<TreeRef> refs;
  refs.reserve(trees.size());
  for (const auto& t : trees) refs.push_back(t.root());
  return msc(refs);
}

/// Indented one-node-per-line rendering, for debugging.
inline std::string tree_to_text(const Grammar& g, TreeRef t, int depth = 0) {
  std::string out(static_cast<std::size_t>(depth) * 2, ' ');
  out += g.name(t.label()) + '\n';
  for (std::size_t i = 0; i < t.arity(); ++i) out += tree_to_text(g, t.child(i), depth + 1);
  return out;
}

/// Checks the parse-tree labeling rules: every internal node expands by a
/// production. With `allow_open_leaves` nonterminal leaves are accepted (caps).
inline bool is_derivation_tree(const Grammar& g, TreeRef t, bool allow_open_leaves) {
  if (t.is_leaf()) return g.is_terminal(t.label()) || (allow_open_leaves && g.is_nonterminal(t.label()));
  if (!g.is_nonterminal(t.label())) return false;
  std::vector<Symbol> labels(t.arity());
  for (std::size_t i = 0; i < t.arity(); ++i) labels[i] = t.child(i).label();
  if (!g.find_production(t.label(), labels)) return false;
  for (std::size_t i = 0; i < t.arity(); ++i)
    if (!is_derivation_tree(g, t.child(i), allow_open_leaves)) return false;
  return true;
}

namespace detail {

// Earley recognizer over a symbol string that may contain nonterminals (a
// nonterminal in the input stands for itself), followed by a memoized count
// of derivations (capped at 2) used both to detect ambiguity and to extract
// the unique tree.
class Earley {
 public:
  Earley(const Grammar& g, std::span<const Symbol> input, Symbol root) : g_(g), in_(input), root_(root) {
    if (!g.is_nonterminal(root)) throw ParseError(0, "root '" + g.name(root) + "' is not a nonterminal");
    if (input.size() >= (1u << 18)) throw ParseError(0, "input too long");
    if (g.productions().size() >= (1u << 20)) throw GrammarError("too many productions");
    for (std::size_t i = 0; i < input.size(); ++i)
      if (input[i] >= g.symbol_count()) throw ParseError(i, "symbol out of range");
  }

  // Returns the failing position, or nullopt when the input is accepted.
  std::optional<std::size_t> recognize() {
    const std::size_t n = in_.size();
    sets_.assign(n + 1, {});
    members_.assign(n + 1, {});
    waiting_.assign(n + 1, {});
    for (std::size_t p : g_.alternatives(root_)) add(0, Item{static_cast<std::uint32_t>(p), 0, 0});
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t idx = 0; idx < sets_[k].size(); ++idx) {
        const Item it = sets_[k][idx];
        const auto& body = g_.production(it.prod).body;
        if (it.dot == body.size()) {
          const Symbol head = g_.production(it.prod).head;
          auto w = waiting_[it.origin].find(head);
          if (w == waiting_[it.origin].end()) continue;
          for (std::uint32_t pi : w->second) {
            const Item parent = sets_[it.origin][pi];
            add(k, Item{parent.prod, parent.dot + 1, parent.origin});
          }
        } else {
          const Symbol next = body[it.dot];
          if (g_.is_nonterminal(next))
            for (std::size_t p : g_.alternatives(next))
              add(k, Item{static_cast<std::uint32_t>(p), 0, static_cast<std::uint32_t>(k)});
          if (k < n && in_[k] == next) add(k + 1, Item{it.prod, it.dot + 1, it.origin});
        }
      }
      for (std::size_t idx = 0; idx < sets_[k].size(); ++idx) {
        const Item it = sets_[k][idx];
        const auto& body = g_.production(it.prod).body;
        if (it.dot < body.size()) waiting_[k][body[it.dot]].push_back(static_cast<std::uint32_t>(idx));
      }
      if (k < n && sets_[k + 1].empty()) return k;
    }
    for (std::size_t p : g_.alternatives(root_))
      if (has(n, p, g_.production(p).body.size(), 0)) return std::nullopt;
    return n;
  }

  int derivations() { return ways_sym(root_, 0, in_.size()); }

  Tree build() {
    Tree t(root_);
    build_node(t, 0, root_, 0, in_.size());
    return t;
  }

 private:
  struct Item {
    std::uint32_t prod;
    std::uint32_t dot;
    std::uint32_t origin;
  };

  static std::uint64_t item_key(std::uint64_t prod, std::uint64_t dot, std::uint64_t origin) {
    return (prod << 40) | (dot << 20) | origin;
  }

  void add(std::size_t k, Item it) {
    if (members_[k].insert(item_key(it.prod, it.dot, it.origin)).second) sets_[k].push_back(it);
  }

  bool has(std::size_t k, std::size_t prod, std::size_t dot, std::size_t origin) const {
    return members_[k].count(item_key(prod, dot, origin)) != 0;
  }

  static std::uint64_t span_key(std::uint64_t a, std::uint64_t i, std::uint64_t j) {
    return (a << 36) | (i << 18) | j;
  }

  int ways_sym(Symbol x, std::size_t i, std::size_t j) {
    const auto key = span_key(x, i, j);
    if (auto it = sym_memo_.find(key); it != sym_memo_.end()) {
      if (it->second < 0) throw AmbiguityError("cyclic derivation of '" + g_.name(x) + "'");
      return it->second;
    }
    sym_memo_[key] = -1;
    int total = 0;
    if (j == i + 1 && in_[i] == x) total = 1;
    if (g_.is_nonterminal(x)) {
      for (std::size_t p : g_.alternatives(x)) {
        if (total >= 2) break;
        const auto len = g_.production(p).body.size();
        if (j - i < len || !has(j, p, len, i)) continue;
        total += ways_seq(p, len, i, j);
      }
    }
    total = std::min(total, 2);
    sym_memo_[key] = total;
    return total;
  }

  int ways_seq(std::size_t p, std::size_t d, std::size_t i, std::size_t j) {
    if (d == 0) return i == j ? 1 : 0;
    const auto key = span_key((static_cast<std::uint64_t>(p) << 8) | d, i, j);
    if (auto it = seq_memo_.find(key); it != seq_memo_.end()) return it->second;
    int total = 0;
    const Symbol last = g_.production(p).body[d - 1];
    for (std::size_t k = i + (d - 1); k < j && total < 2; ++k) {
      if (!has(k, p, d - 1, i)) continue;
      const int a = ways_seq(p, d - 1, i, k);
      if (!a) continue;
      total += a * ways_sym(last, k, j);
    }
    total = std::min(total, 2);
    seq_memo_[key] = total;
    return total;
  }

  void build_node(Tree& t, std::uint32_t node, Symbol x, std::size_t i, std::size_t j) {
    if (j == i + 1 && in_[i] == x) return;  // a leaf standing for itself
    for (std::size_t p : g_.alternatives(x)) {
      const auto& body = g_.production(p).body;
      const auto len = body.size();
      if (j - i < len || !has(j, p, len, i) || ways_seq(p, len, i, j) == 0) continue;
      std::vector<std::size_t> bounds(len + 1);
      bounds[len] = j;
      for (std::size_t d = len; d >= 1; --d) {
        for (std::size_t k = i + (d - 1); k < bounds[d]; ++k) {
          if (has(k, p, d - 1, i) && ways_seq(p, d - 1, i, k) > 0 && ways_sym(body[d - 1], k, bounds[d]) > 0) {
            bounds[d - 1] = k;
            break;
          }
        }
      }
      const auto first = t.add_children(node, body);
      for (std::size_t c = 0; c < len; ++c)
        build_node(t, first + static_cast<std::uint32_t>(c), body[c], bounds[c], bounds[c + 1]);
      return;
    }
    throw ParseError(i, "internal: no derivation to extract");
  }

  const Grammar& g_;
  std::span<const Symbol> in_;
  Symbol root_;
  std::vector<std::vector<Item>> sets_;
  std::vector<std::unordered_set<std::uint64_t>> members_;
  std::vector<std::unordered_map<Symbol, std::vector<std::uint32_t>>> waiting_;
  std::unordered_map<std::uint64_t, int> sym_memo_;
  std::unordered_map<std::uint64_t, int> seq_memo_;
};

inline Tree parse_impl(const Grammar& g, std::span<const Symbol> input, Symbol root) {
  Earley e(g, input, root);
  if (auto fail = e.recognize()) {
    if (*fail < input.size()) throw ParseError(*fail, "unexpected '" + g.name(input[*fail]) + "'");
    throw ParseError(*fail, "unexpected end of input");
  }
  if (e.derivations() > 1) throw AmbiguityError("input has more than one parse tree");
  return e.build();
}

}  // namespace detail

/// Unique parse tree of a terminal string, derived from `root`.
inline Tree parse(const Grammar& g, std::span<const Symbol> tokens, Symbol root) {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!g.is_terminal(tokens[i]))
      throw ParseError(i, "'" + (tokens[i] < g.symbol_count() ? g.name(tokens[i]) : std::string("?")) +
                              "' is not a terminal");
  return detail::parse_impl(g, tokens, root);
}

inline Tree parse(const Grammar& g, std::span<const Symbol> tokens) { return parse(g, tokens, g.start()); }

inline Tree parse(const Grammar& g, const std::vector<std::string>& tokens) {
  const auto symbols = g.to_symbols(tokens);
  return parse(g, symbols, g.start());
}

/// Derivation tree (a cap) of a sentential form; nonterminals in `symbols`
/// become leaves.
inline Tree parse_form(const Grammar& g, std::span<const Symbol> symbols, Symbol root) {
  // The bare root is the trivial cap; no production derives it.
  if (symbols.size() == 1 && symbols[0] == root && g.is_nonterminal(root)) return Tree(root);
  return detail::parse_impl(g, symbols, root);
}

/// Number of parse trees of `symbols` from `root`, saturating at 2.
inline int count_parses(const Grammar& g, std::span<const Symbol> symbols, Symbol root) {
  detail::Earley e(g, symbols, root);
  if (e.recognize()) return 0;
  return e.derivations();
}

/// A sentential form derivable from some root nonterminal, stored as the cap
/// that derives it. The symbol string is the cap's yield.
class SententialForm {
 public:
  explicit SententialForm(Tree cap) : cap_(std::move(cap)) {
    if (cap_.empty()) throw ParameterError("sentential form needs a nonempty cap");
  }

  static SententialForm from_symbols(const Grammar& g, std::span<const Symbol> symbols, Symbol root) {
    return SententialForm(parse_form(g, symbols, root));
  }

  static SententialForm from_text(const Grammar& g, std::string_view text, Symbol root) {
    const auto symbols = g.to_symbols(text);
    return from_symbols(g, symbols, root);
  }

  Symbol root() const { return cap_.root().label(); }
  const Tree& cap() const { return cap_; }
  std::vector<Symbol> symbols() const { return tree_yield(cap_); }
  std::string to_text(const Grammar& g) const { return g.names(symbols()); }

  /// Membership of a sentence given its parse tree.
  bool contains(TreeRef parse_tree) const { return is_cap_of(cap_.root(), parse_tree); }

  friend bool operator==(const SententialForm& a, const SententialForm& b) { return a.cap_ == b.cap_; }

 private:
  Tree cap_;
};

/// MSG of already-parsed examples, computed incrementally: the current
/// generalization is intersected (MSC) with each next tree in turn.
inline SententialForm msg_trees(const std::vector<TreeRef>& trees) {
  if (trees.empty()) throw ParameterError("msg of an empty set");
  Tree current = copy_subtree(trees.front());
  for (std::size_t i = 1; i < trees.size(); ++i) current = msc({current.root(), trees[i]});
  return SententialForm(std::move(current));
}

inline SententialForm msg(const Grammar& g, const std::vector<std::vector<Symbol>>& problems, Symbol root) {
  if (problems.empty()) throw ParameterError("msg of an empty set");
  std::vector<Tree> trees;
  trees.reserve(problems.size());
  for (const auto& p : problems) trees.push_back(parse(g, p, root));
  std::vector<TreeRef> refs;
  for (const auto& t : trees) refs.push_back(t.root());
  return msg_trees(refs);
}

inline SententialForm msg(const Grammar& g, const std::vector<std::vector<Symbol>>& problems) {
  return msg(g, problems, g.start());
}

/// True iff `problem` is derivable from `form`. The problem is parsed from the
/// form's root and the form's cap must be a cap of that parse.
inline bool membership(const Grammar& g, const SententialForm& form, std::span<const Symbol> problem) {
  try {
    const Tree t = parse(g, problem, form.root());
    return form.contains(t.root());
  } catch (const ParseError&) {
    return false;
  }
}

/// All terminal strings of at most `max_tokens` symbols derivable from the
/// symbol string `root`, by exhaustive leftmost expansion.
inline std::set<std::vector<Symbol>> enumerate_sentences(const Grammar& g, const std::vector<Symbol>& root,
                                                         std::size_t max_tokens,
                                                         std::size_t max_forms = 5'000'000) {
  std::set<std::vector<Symbol>> out;
  if (root.size() > max_tokens) return out;
  std::vector<std::vector<Symbol>> stack{root};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto form = std::move(stack.back());
    stack.pop_back();
    if (++visited > max_forms) throw EnumerationLimitError("sentence enumeration exceeded its limit");
    auto nt = std::ranges::find_if(form, [&](Symbol s) { return g.is_nonterminal(s); });
    if (nt == form.end()) {
      out.insert(std::move(form));
      continue;
    }
    const auto pos = static_cast<std::size_t>(nt - form.begin());
    for (std::size_t p : g.alternatives(*nt)) {
      const auto& body = g.production(p).body;
      if (form.size() - 1 + body.size() > max_tokens) continue;
      std::vector<Symbol> next;
      next.reserve(form.size() - 1 + body.size());
      next.insert(next.end(), form.begin(), form.begin() + static_cast<std::ptrdiff_t>(pos));
      next.insert(next.end(), body.begin(), body.end());
      next.insert(next.end(), form.begin() + static_cast<std::ptrdiff_t>(pos) + 1, form.end());
      stack.push_back(std::move(next));
    }
  }
  return out;
}

}  // namespace speedup
