#include "socel/focel.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "lexer.hpp"
#include "socel/error.hpp"

namespace socel {

namespace {

std::shared_ptr<const FoNode> make(FoNode n) { return std::make_shared<const FoNode>(std::move(n)); }

const FoNode& node_of(const FoFormula& f) {
  if (!f.valid()) throw Error(ErrorKind::Precondition, "empty FO-CEL formula");
  return *f.id();
}

}  // namespace

FoFormula FoFormula::as(Label rel, Label var) { return FoFormula(make({FoOp::As, rel, var, {}, {}, {}})); }
FoFormula FoFormula::filter(FoFormula f, std::vector<FoAtom> atoms) {
  return FoFormula(make({FoOp::Filter, {}, {}, std::move(atoms), std::move(f), {}}));
}
FoFormula FoFormula::or_(FoFormula a, FoFormula b) {
  return FoFormula(make({FoOp::Or, {}, {}, {}, std::move(a), std::move(b)}));
}
FoFormula FoFormula::seq(FoFormula a, FoFormula b) {
  return FoFormula(make({FoOp::Seq, {}, {}, {}, std::move(a), std::move(b)}));
}
FoFormula FoFormula::plus(FoFormula f) { return FoFormula(make({FoOp::Plus, {}, {}, {}, std::move(f), {}})); }

FoOp FoFormula::op() const { return node_of(*this).op; }
const FoFormula& FoFormula::child() const { return node_of(*this).left; }
const FoFormula& FoFormula::left() const { return node_of(*this).left; }
const FoFormula& FoFormula::right() const { return node_of(*this).right; }
Label FoFormula::rel() const { return node_of(*this).rel; }
Label FoFormula::var() const { return node_of(*this).var; }
const std::vector<FoAtom>& FoFormula::atoms() const { return node_of(*this).atoms; }

// ---------------------------------------------------------------- syntax

namespace {

int level(const FoFormula& f) {
  switch (f.op()) {
    case FoOp::Or: return 0;
    case FoOp::Filter: return 1;
    case FoOp::Seq: return 2;
    default: return 3;
  }
}

std::string print_at(const FoFormula& f, int min_level) {
  std::string body;
  switch (f.op()) {
    case FoOp::As: body = f.rel().name() + " AS " + f.var().name(); break;
    case FoOp::Plus:
      body = (f.child().op() == FoOp::As ? "(" + print_at(f.child(), 3) + ")" : print_at(f.child(), 3)) + "+";
      break;
    case FoOp::Filter: {
      std::string conj;
      for (std::size_t i = 0; i < f.atoms().size(); ++i) {
        if (i) conj += " AND ";
        conj += print_atom(SoAtom{f.atoms()[i].pred, f.atoms()[i].vars});
      }
      if (f.atoms().size() > 1) conj = "(" + conj + ")";
      body = print_at(f.child(), 1) + " FILTER " + conj;
      break;
    }
    case FoOp::Seq: body = print_at(f.left(), 2) + " ; " + print_at(f.right(), 3); break;
    case FoOp::Or: body = print_at(f.left(), 0) + " OR " + print_at(f.right(), 1); break;
  }
  return level(f) < min_level ? "(" + body + ")" : body;
}

class FoParser {
 public:
  FoParser(const std::string& text, const Schema& schema) : lx_(text), schema_(schema) {}

  FoFormula parse_all() {
    FoFormula f = parse_or();
    if (lx_.peek().kind != detail::Token::Kind::End) lx_.fail("unexpected trailing input");
    return f;
  }

 private:
  Label name(const char* what) {
    const auto& t = lx_.peek();
    if (t.kind != detail::Token::Kind::Ident) lx_.fail(std::string("expected ") + what);
    static const char* const reserved[] = {"AS", "FILTER", "OR", "AND", "TRUE", "FALSE", "EACH", "NOT"};
    for (const char* k : reserved) {
      if (t.text == k) lx_.fail(std::string("expected ") + what + " (keyword is not a name)");
    }
    return Label(lx_.next().text);
  }

  FoFormula parse_or() {
    FoFormula f = parse_filter();
    while (lx_.accept_ident("OR")) f = FoFormula::or_(f, parse_filter());
    return f;
  }

  FoFormula parse_filter() {
    FoFormula f = parse_seq();
    while (lx_.accept_ident("FILTER")) {
      std::vector<FoAtom> conj;
      if (lx_.accept_sym("(")) {
        conj.push_back(parse_atom());
        while (lx_.accept_ident("AND")) conj.push_back(parse_atom());
        lx_.expect_sym(")");
      } else {
        conj.push_back(parse_atom());
      }
      f = FoFormula::filter(f, std::move(conj));
    }
    return f;
  }

  FoFormula parse_seq() {
    FoFormula f = parse_postfix();
    while (lx_.accept_sym(";")) f = FoFormula::seq(f, parse_postfix());
    return f;
  }

  FoFormula parse_postfix() {
    FoFormula f = parse_primary();
    while (lx_.accept_sym("+")) f = FoFormula::plus(f);
    return f;
  }

  FoFormula parse_primary() {
    if (lx_.accept_sym("(")) {
      FoFormula f = parse_or();
      lx_.expect_sym(")");
      return f;
    }
    const auto tok = lx_.peek();
    Label rel = name("a relation name or '('");
    if (!schema_.has_relation(rel.name())) lx_.fail_at(tok, "unknown relation '" + rel.name() + "'");
    if (!lx_.accept_ident("AS")) lx_.fail("expected AS after the relation name");
    return FoFormula::as(rel, name("a variable"));
  }

  void check_attr(const detail::Token& at, const std::string& attr) {
    if (!schema_.has_attribute(attr)) lx_.fail_at(at, "no relation declares attribute '" + attr + "'");
  }

  FoAtom parse_atom() {
    for (auto [kw, truth] : {std::pair{"TRUE", true}, std::pair{"FALSE", false}}) {
      if (lx_.accept_ident(kw)) {
        lx_.expect_sym("(");
        Label x = name("a variable");
        lx_.expect_sym(")");
        return {SoPred::univ(truth ? Pred::truth() : Pred::falsity()), {x}};
      }
    }
    if (lx_.accept_ident("EACH")) {
      lx_.expect_sym("(");
      Label x = name("a variable");
      lx_.expect_sym(",");
      Pred p = detail::parse_pexpr(lx_);
      lx_.expect_sym(")");
      return {SoPred::univ(p), {x}};
    }
    Label x = name("a variable");
    lx_.expect_sym(".");
    if (lx_.accept_ident("type")) {
      lx_.expect_sym("=");
      const auto at = lx_.peek();
      Label r = name("a relation name");
      if (!schema_.has_relation(r.name())) lx_.fail_at(at, "unknown relation '" + r.name() + "'");
      return {SoPred::univ(Pred::type_is(r)), {x}};
    }
    const auto at = lx_.peek();
    std::string attr = lx_.expect_ident("an attribute name");
    check_attr(at, attr);
    CmpOp op = detail::parse_cmp_op(lx_);
    if (lx_.peek().kind == detail::Token::Kind::Ident) {
      Label y = name("a variable");
      lx_.expect_sym(".");
      const auto at2 = lx_.peek();
      std::string attr2 = lx_.expect_ident("an attribute name");
      check_attr(at2, attr2);
      return {SoPred::attr_compare(attr, op, attr2), {x, y}};
    }
    return {SoPred::univ(Pred::compare(attr, op, detail::parse_literal(lx_))), {x}};
  }

  detail::Lexer lx_;
  const Schema& schema_;
};

void collect_vdef(const FoFormula& f, bool under_plus, bool want_plus_free, std::vector<Label>& out) {
  switch (f.op()) {
    case FoOp::As:
      if (!(want_plus_free && under_plus)) out.push_back(f.var());
      return;
    case FoOp::Filter: collect_vdef(f.child(), under_plus, want_plus_free, out); return;
    case FoOp::Plus: collect_vdef(f.child(), true, want_plus_free, out); return;
    case FoOp::Or:
    case FoOp::Seq:
      collect_vdef(f.left(), under_plus, want_plus_free, out);
      collect_vdef(f.right(), under_plus, want_plus_free, out);
      return;
  }
}

}  // namespace

FoFormula parse_focel(const std::string& text, const Schema& schema) { return FoParser(text, schema).parse_all(); }

std::string print(const FoFormula& f) { return print_at(f, 0); }

LabelSet vdef(const FoFormula& f) {
  std::vector<Label> out;
  collect_vdef(f, false, false, out);
  return make_label_set(std::move(out));
}

LabelSet vdef_plus(const FoFormula& f) {
  std::vector<Label> out;
  collect_vdef(f, false, true, out);
  return make_label_set(std::move(out));
}

bool has_only_unary_filters(const FoFormula& f) {
  switch (f.op()) {
    case FoOp::As: return true;
    case FoOp::Filter:
      for (const auto& a : f.atoms()) {
        if (!a.pred.is_unary_ext()) return false;
      }
      return has_only_unary_filters(f.child());
    case FoOp::Plus: return has_only_unary_filters(f.child());
    default: return has_only_unary_filters(f.left()) && has_only_unary_filters(f.right());
  }
}

Position Valuation::operator()(Label x) const {
  auto it = overrides.find(x);
  return it == overrides.end() ? fallback : it->second;
}

Valuation Valuation::override_with(const Valuation& other, const LabelSet& vars) const {
  Valuation out = *this;
  for (Label x : vars) out.overrides[x] = other(x);
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

// A match together with the variable bindings it depends on. A result
// (M, b) stands for every valuation that extends b.
using Binding = std::vector<std::pair<Label, Position>>;  // sorted by label

struct Constrained {
  Match match;
  Binding binding;
  friend auto operator<=>(const Constrained&, const Constrained&) = default;
  friend bool operator==(const Constrained&, const Constrained&) = default;
};

std::optional<Binding> merge(const Binding& a, const Binding& b) {
  Binding out;
  out.reserve(a.size() + b.size());
  std::size_t x = 0, y = 0;
  while (x < a.size() || y < b.size()) {
    if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
      out.push_back(a[x++]);
    } else if (x == a.size() || b[y].first < a[x].first) {
      out.push_back(b[y++]);
    } else {
      if (a[x].second != b[y].second) return std::nullopt;
      out.push_back(a[x++]);
      ++y;
    }
  }
  return out;
}

const Position* lookup(const Binding& b, Label x) {
  auto it = std::lower_bound(b.begin(), b.end(), x, [](const auto& p, Label l) { return p.first < l; });
  return it != b.end() && it->first == x ? &it->second : nullptr;
}

Binding bind(Binding b, Label x, Position p) {
  auto it = std::lower_bound(b.begin(), b.end(), x, [](const auto& q, Label l) { return q.first < l; });
  b.insert(it, {x, p});
  return b;
}

class FoEvaluator {
 public:
  // Free variables range over 0..range.
  FoEvaluator(const Stream& s, Position range) : s_(s), range_(range) {}

  const std::vector<Constrained>& eval(const FoFormula& f, Position i, Position j) {
    Key key{f.id(), i, j};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Constrained> out = compute(f, i, j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  struct Key {
    const FoNode* node;
    Position i;
    Position j;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<const void*>()(k.node);
      h ^= static_cast<std::size_t>(k.i) * 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= static_cast<std::size_t>(k.j) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  const Event& at(Position p) const { return s_[static_cast<std::size_t>(p)]; }

  // Extends b over the unbound variables of the atom and keeps the choices
  // under which it holds.
  void apply_atom(const FoAtom& atom, const Binding& b, std::size_t k, std::vector<Position>& chosen,
                  const std::function<void(const Binding&)>& out) {
    if (k == atom.vars.size()) {
      std::vector<EventSet> args;
      for (Position p : chosen) args.push_back(EventSet{{p, &at(p)}});
      if (atom.pred.eval(args)) out(b);
      return;
    }
    if (const Position* p = lookup(b, atom.vars[k])) {
      chosen.push_back(*p);
      apply_atom(atom, b, k + 1, chosen, out);
      chosen.pop_back();
      return;
    }
    for (Position p = 0; p <= range_; ++p) {
      chosen.push_back(p);
      apply_atom(atom, bind(b, atom.vars[k], p), k + 1, chosen, out);
      chosen.pop_back();
    }
  }

  std::vector<Constrained> compute(const FoFormula& f, Position i, Position j) {
    std::vector<Constrained> out;
    switch (f.op()) {
      case FoOp::As:
        if (at(j).type() == f.rel()) out.push_back({{j}, {{f.var(), j}}});
        break;
      case FoOp::Filter: {
        std::vector<Constrained> cur = eval(f.child(), i, j);
        for (const auto& atom : f.atoms()) {
          std::vector<Constrained> next;
          for (const auto& c : cur) {
            std::vector<Position> chosen;
            apply_atom(atom, c.binding, 0, chosen, [&](const Binding& b) { next.push_back({c.match, b}); });
          }
          cur = std::move(next);
        }
        out = std::move(cur);
        break;
      }
      case FoOp::Or: {
        out = eval(f.left(), i, j);
        const auto& r = eval(f.right(), i, j);
        out.insert(out.end(), r.begin(), r.end());
        break;
      }
      case FoOp::Seq:
        for (Position k = i; k < j; ++k) concat_into(eval(f.left(), i, k), eval(f.right(), k + 1, j), out);
        break;
      case FoOp::Plus: {
        const LabelSet rebound = vdef_plus(f.child());
        std::vector<Constrained> raw = eval(f.child(), i, j);
        for (Position k = i; k < j; ++k) concat_into(eval(f.child(), i, k), eval(f, k + 1, j), raw);
        for (auto& c : raw) {
          std::erase_if(c.binding, [&](const auto& p) { return contains(rebound, p.first); });
          out.push_back(std::move(c));
        }
        break;
      }
    }
    return out;
  }

  static void concat_into(const std::vector<Constrained>& left, const std::vector<Constrained>& right,
                          std::vector<Constrained>& out) {
    for (const auto& a : left) {
      for (const auto& b : right) {
        if (a.match.back() >= b.match.front()) continue;
        auto binding = merge(a.binding, b.binding);
        if (!binding) continue;
        Match m = a.match;
        m.insert(m.end(), b.match.begin(), b.match.end());
        out.push_back({std::move(m), std::move(*binding)});
      }
    }
  }

  const Stream& s_;
  Position range_;
  std::unordered_map<Key, std::vector<Constrained>, KeyHash> memo_;
};

void check_window(const Stream& s, Position i, Position j) {
  if (i < 0 || i > j || j >= static_cast<Position>(s.size())) {
    throw Error(ErrorKind::Range, "evaluation window outside the stream");
  }
}

MatchSet sorted_unique(MatchSet m) {
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

}  // namespace

MatchSet eval_focel(const FoFormula& f, const Stream& s, Position i, Position j, const Valuation& nu) {
  check_window(s, i, j);
  FoEvaluator ev(s, static_cast<Position>(s.size()) - 1);
  MatchSet out;
  for (const auto& c : ev.eval(f, i, j)) {
    const bool agrees = std::all_of(c.binding.begin(), c.binding.end(), [&](const auto& p) { return nu(p.first) == p.second; });
    if (agrees) out.push_back(c.match);
  }
  return sorted_unique(std::move(out));
}

MatchSet eval_focel_at(const FoFormula& f, const Stream& s, Position n) {
  check_window(s, 0, n);
  FoEvaluator ev(s, n);
  MatchSet out;
  for (const auto& c : ev.eval(f, 0, n)) out.push_back(c.match);
  return sorted_unique(std::move(out));
}

MatchSet supports(const CeSet& s) {
  MatchSet out;
  for (const auto& c : s) {
    auto supp = c.support();
    if (!supp.empty()) out.push_back(std::move(supp));
  }
  return sorted_unique(std::move(out));
}

// ---------------------------------------------------------------- translations

namespace {

struct Pending {
  Pred pred;
  Label target;
};

[[noreturn]] void not_unary(const std::string& printed) {
  throw Error(ErrorKind::Unsupported, "filter '" + printed + "' is not unary; only unary filters translate");
}

// Keeps the pending filters on variables bound in this branch. A filter on
// an unbound variable only asks for some position satisfying it, which holds
// whenever the same predicate is required of a bound variable; anything else
// has no unary second-order counterpart.
std::vector<Pending> local_filters(const std::vector<Pending>& pending, const LabelSet& bound,
                                   const LabelSet& elsewhere) {
  std::vector<Pending> mine;
  for (const auto& p : pending) {
    if (contains(bound, p.target)) {
      mine.push_back(p);
      continue;
    }
    if (contains(elsewhere, p.target)) continue;
    const bool implied = std::any_of(pending.begin(), pending.end(), [&](const Pending& q) {
      return q.pred == p.pred && contains(bound, q.target);
    });
    if (!implied) {
      throw Error(ErrorKind::Unsupported, "filter on '" + p.target.name() +
                                              "' does not refer to a position of every match; it has no unary "
                                              "second-order counterpart");
    }
  }
  return mine;
}

// Pushes pending unary filters down to the AS atoms that bind them.
Formula fo_push(const FoFormula& f, std::vector<Pending> pending) {
  switch (f.op()) {
    case FoOp::As: {
      std::vector<SoAtom> atoms;
      for (const auto& p : local_filters(pending, {f.var()}, {})) atoms.push_back({SoPred::univ(p.pred), {f.rel()}});
      Formula atom = Formula::atom(f.rel());
      return atoms.empty() ? atom : Formula::filter(atom, std::move(atoms));
    }
    case FoOp::Filter:
      for (const auto& a : f.atoms()) {
        if (!a.pred.is_unary_ext()) not_unary(print_atom(SoAtom{a.pred, a.vars}));
        pending.push_back({a.pred.pred(), a.vars[0]});
      }
      return fo_push(f.child(), std::move(pending));
    case FoOp::Plus:
      // Variables inside the loop are rebound per iteration, so nothing
      // from outside reaches them.
      local_filters(pending, {}, {});
      return Formula::plus(fo_push(f.child(), {}));
    case FoOp::Or:
      return Formula::or_(fo_push(f.left(), local_filters(pending, vdef_plus(f.left()), {})),
                          fo_push(f.right(), local_filters(pending, vdef_plus(f.right()), {})));
    case FoOp::Seq: {
      const LabelSet l = vdef_plus(f.left()), r = vdef_plus(f.right());
      return Formula::seq(fo_push(f.left(), local_filters(pending, l, r)),
                          fo_push(f.right(), local_filters(pending, r, l)));
    }
  }
  throw Error(ErrorKind::Precondition, "unknown FO-CEL operator");
}

FoFormula so_push(const Formula& f, std::vector<Pending> pending, int& counter) {
  switch (f.op()) {
    case Op::Atom: {
      Label x("x" + std::to_string(++counter));
      std::vector<FoAtom> atoms;
      for (const auto& p : pending) {
        if (p.target == f.rel()) atoms.push_back({SoPred::univ(p.pred), {x}});
      }
      FoFormula a = FoFormula::as(f.rel(), x);
      return atoms.empty() ? a : FoFormula::filter(a, std::move(atoms));
    }
    case Op::Filter:
      for (const auto& a : f.atoms()) {
        if (!a.pred.is_unary_ext()) not_unary(print_atom(a));
        pending.push_back({a.pred.pred(), a.args[0]});
      }
      return so_push(f.child(), std::move(pending), counter);
    case Op::Or: {
      FoFormula l = so_push(f.left(), pending, counter);
      return FoFormula::or_(l, so_push(f.right(), pending, counter));
    }
    case Op::Seq: {
      FoFormula l = so_push(f.left(), pending, counter);
      return FoFormula::seq(l, so_push(f.right(), pending, counter));
    }
    case Op::Plus: return FoFormula::plus(so_push(f.child(), std::move(pending), counter));
    case Op::In: {
      std::vector<Pending> next;
      const LabelSet assigned = assigned_labels(f.child());
      for (const auto& p : pending) {
        if (p.target != f.label()) {
          next.push_back(p);
          continue;
        }
        for (Label a : assigned) next.push_back({p.pred, a});
      }
      return so_push(f.child(), std::move(next), counter);
    }
    case Op::Rename: {
      const Label from = f.label(), to = f.label_to();
      std::vector<Pending> next;
      for (const auto& p : pending) {
        if (from == to || (p.target != from && p.target != to)) {
          next.push_back(p);
        } else if (p.target == to) {
          next.push_back({p.pred, from});
          next.push_back(p);
        }
        // A filter on the renamed-away label sees an empty set.
      }
      return so_push(f.child(), std::move(next), counter);
    }
    default:
      throw Error(ErrorKind::Unsupported,
                  std::string("only core operators translate to FO-CEL; found ") + op_name(f.op()));
  }
}

}  // namespace

Formula fo_to_so_unary(const FoFormula& f) { return fo_push(f, {}); }

FoFormula so_to_fo_unary(const Formula& f) {
  int counter = 0;
  return so_push(f, {}, counter);
}

}  // namespace socel
