#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "proofgrain/error.hpp"

namespace proofgrain {

enum class Symbol {
  Member,
  Subset,
  Equal,
  Intersection,
  Union,
  Difference,
  And,
  Or,
  Not,
  Implies,
  Pair,
  Compose,
  Inverse,
};

struct SymbolInfo {
  Symbol symbol;
  std::string_view glyph;   // canonical spelling in documents and output
  std::string_view ascii;   // accepted alias on input
  std::size_t arity;
  int precedence;           // higher binds tighter
  enum class Assoc { None, Left, Right, Both } assoc;
  enum class Fix { Infix, Prefix, Postfix, Tuple } fix;
  bool spaced;              // infix operator printed with surrounding blanks
};

inline constexpr std::array<SymbolInfo, 13> kSymbols{{
    {Symbol::Member, "∈", "in", 2, 5, SymbolInfo::Assoc::None, SymbolInfo::Fix::Infix, false},
    {Symbol::Subset, "⊆", "subset", 2, 5, SymbolInfo::Assoc::None, SymbolInfo::Fix::Infix, true},
    {Symbol::Equal, "=", "eq", 2, 5, SymbolInfo::Assoc::None, SymbolInfo::Fix::Infix, true},
    {Symbol::Intersection, "∩", "cap", 2, 6, SymbolInfo::Assoc::Both, SymbolInfo::Fix::Infix, false},
    {Symbol::Union, "∪", "cup", 2, 6, SymbolInfo::Assoc::Both, SymbolInfo::Fix::Infix, false},
    {Symbol::Difference, "\\", "setminus", 2, 7, SymbolInfo::Assoc::Left, SymbolInfo::Fix::Infix, false},
    {Symbol::And, "∧", "and", 2, 3, SymbolInfo::Assoc::Both, SymbolInfo::Fix::Infix, true},
    {Symbol::Or, "∨", "or", 2, 2, SymbolInfo::Assoc::Both, SymbolInfo::Fix::Infix, true},
    {Symbol::Not, "¬", "not", 1, 4, SymbolInfo::Assoc::None, SymbolInfo::Fix::Prefix, false},
    {Symbol::Implies, "→", "implies", 2, 1, SymbolInfo::Assoc::Right, SymbolInfo::Fix::Infix, true},
    {Symbol::Pair, "pair", "pair", 2, 10, SymbolInfo::Assoc::None, SymbolInfo::Fix::Tuple, false},
    {Symbol::Compose, "∘", "comp", 2, 8, SymbolInfo::Assoc::Both, SymbolInfo::Fix::Infix, false},
    {Symbol::Inverse, "⁻¹", "inv", 1, 9, SymbolInfo::Assoc::None, SymbolInfo::Fix::Postfix, false},
}};

inline const SymbolInfo& info(Symbol s) {
  return kSymbols[static_cast<std::size_t>(s)];
}

inline std::optional<Symbol> symbol_from_name(std::string_view name) {
  for (const auto& s : kSymbols)
    if (s.glyph == name || s.ascii == name) return s.symbol;
  return std::nullopt;
}

// A path of child indices from the root of a formula.
struct Position {
  std::vector<std::size_t> path;

  bool is_prefix_of(const Position& other) const {
    return path.size() <= other.path.size() &&
           std::equal(path.begin(), path.end(), other.path.begin());
  }
  friend bool operator==(const Position&, const Position&) = default;
};

// First-order term / formula over the set-theory and propositional vocabulary.
struct Formula {
  enum class Kind { Variable, Constant, Application };

  Kind kind = Kind::Variable;
  std::string name;              // variables and constants
  Symbol symbol = Symbol::Member;  // applications
  std::vector<Formula> args;

  static Formula variable(std::string n) { return {Kind::Variable, std::move(n), Symbol::Member, {}}; }
  static Formula constant(std::string n) { return {Kind::Constant, std::move(n), Symbol::Member, {}}; }
  static Formula apply(Symbol s, std::vector<Formula> a) {
    if (a.size() != info(s).arity)
      throw Error("arity violation: '" + std::string(info(s).glyph) + "' expects " +
                  std::to_string(info(s).arity) + " argument(s), got " + std::to_string(a.size()));
    return {Kind::Application, {}, s, std::move(a)};
  }

  bool is_atom() const { return kind != Kind::Application; }
  bool is(Symbol s) const { return kind == Kind::Application && symbol == s; }

  // nullptr when the path leaves the tree.
  const Formula* subterm(std::span<const std::size_t> path) const {
    const Formula* f = this;
    for (std::size_t i : path) {
      if (f->kind != Kind::Application || i >= f->args.size()) return nullptr;
      f = &f->args[i];
    }
    return f;
  }
  const Formula* subterm(const Position& p) const { return subterm(std::span(p.path)); }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : args) n += a.size();
    return n;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != Kind::Application) return a.name == b.name;
    return a.symbol == b.symbol && a.args == b.args;
  }
};

namespace detail {

inline void collect_operands(const Formula& f, Symbol op, std::vector<Formula>& out) {
  if (f.is(op)) {
    for (const auto& a : f.args) collect_operands(a, op, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace detail

// Re-associates nested conjunctions and disjunctions to the right.
inline Formula normalize_associativity(const Formula& f) {
  if (f.is_atom()) return f;
  if (f.is(Symbol::And) || f.is(Symbol::Or)) {
    std::vector<Formula> ops;
    detail::collect_operands(f, f.symbol, ops);
    for (auto& o : ops) o = normalize_associativity(o);
    Formula acc = ops.back();
    for (std::size_t i = ops.size() - 1; i-- > 0;) acc = Formula::apply(f.symbol, {ops[i], acc});
    return acc;
  }
  Formula g = f;
  for (auto& a : g.args) a = normalize_associativity(a);
  return g;
}

inline bool equal_modulo_associativity(const Formula& a, const Formula& b) {
  return normalize_associativity(a) == normalize_associativity(b);
}

// ---------------------------------------------------------------------------
// Nested-array document form: ["∩", ["var","A"], ["var","B"]]

template <class Json = nlohmann::json>
Formula formula_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_string())
    throw Error("formula must be a non-empty array headed by a symbol name");
  const std::string head = j[0].template get<std::string>();
  if (head == "var" || head == "const") {
    if (j.size() != 2 || !j[1].is_string())
      throw Error("'" + head + "' expects exactly one name");
    auto name = j[1].template get<std::string>();
    if (name.empty()) throw Error("empty " + head + " name");
    return head == "var" ? Formula::variable(std::move(name)) : Formula::constant(std::move(name));
  }
  auto sym = symbol_from_name(head);
  if (!sym) throw Error("unknown symbol '" + head + "'");
  std::vector<Formula> args;
  for (std::size_t i = 1; i < j.size(); ++i) args.push_back(formula_from_json(j[i]));
  return Formula::apply(*sym, std::move(args));
}

template <class Json = nlohmann::json>
Json formula_to_json(const Formula& f) {
  using json = Json;
  switch (f.kind) {
    case Formula::Kind::Variable: return json::array({"var", f.name});
    case Formula::Kind::Constant: return json::array({"const", f.name});
    case Formula::Kind::Application: break;
  }
  json j = json::array({std::string(info(f.symbol).glyph)});
  for (const auto& a : f.args) j.push_back(formula_to_json<Json>(a));
  return j;
}

// ---------------------------------------------------------------------------
// Infix printing with minimal parentheses.
//
// Precedence, tightest first: ⁻¹, ∘, \, {∩ ∪}, {∈ ⊆ =}, ¬, ∧, ∨, →.
// ∩ and ∪ share a level and must be parenthesized when mixed. ¬ parenthesizes
// any compound operand, so ¬(x∈C) prints as in textbooks.

namespace detail {

inline int precedence_of(const Formula& f) {
  return f.is_atom() ? 100 : info(f.symbol).precedence;
}

inline bool needs_parens(const Formula& parent, const Formula& child, std::size_t index) {
  if (child.is_atom() || child.is(Symbol::Pair)) return false;
  const auto& p = info(parent.symbol);
  if (p.fix == SymbolInfo::Fix::Prefix || p.fix == SymbolInfo::Fix::Postfix) {
    const auto cfix = info(child.symbol).fix;
    return !(cfix == SymbolInfo::Fix::Prefix && p.fix == SymbolInfo::Fix::Prefix) &&
           !(cfix == SymbolInfo::Fix::Postfix && p.fix == SymbolInfo::Fix::Postfix);
  }
  if (p.fix == SymbolInfo::Fix::Tuple) return false;
  const int pc = precedence_of(child);
  if (pc > p.precedence) return false;
  if (pc < p.precedence) return true;
  if (child.symbol != parent.symbol) return true;
  switch (p.assoc) {
    case SymbolInfo::Assoc::Both: return false;
    case SymbolInfo::Assoc::Left: return index != 0;
    case SymbolInfo::Assoc::Right: return index == 0;
    case SymbolInfo::Assoc::None: return true;
  }
  return true;
}

inline void print(const Formula& f, std::string& out) {
  if (f.is_atom()) {
    out += f.name;
    return;
  }
  const auto& s = info(f.symbol);
  auto child = [&](std::size_t i) {
    const bool paren = needs_parens(f, f.args[i], i);
    if (paren) out += '(';
    print(f.args[i], out);
    if (paren) out += ')';
  };
  switch (s.fix) {
    case SymbolInfo::Fix::Prefix:
      out += s.glyph;
      child(0);
      break;
    case SymbolInfo::Fix::Postfix:
      child(0);
      out += s.glyph;
      break;
    case SymbolInfo::Fix::Tuple:
      out += '(';
      child(0);
      out += ',';
      child(1);
      out += ')';
      break;
    case SymbolInfo::Fix::Infix:
      child(0);
      if (s.spaced) out += ' ';
      out += s.glyph;
      if (s.spaced) out += ' ';
      child(1);
      break;
  }
}

}  // namespace detail

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(f, out);
  return out;
}

}  // namespace proofgrain
