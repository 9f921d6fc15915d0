#include "socel/predicates.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <tuple>

#include <json.hpp>

#include "lexer.hpp"
#include "socel/error.hpp"

namespace socel {

struct Pred::Node {
  Kind kind = Kind::True;
  Label rel;
  std::string attr;
  CmpOp op = CmpOp::Eq;
  Value constant;
  std::vector<Pred> parts;
};

const char* cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

bool compare_values(const Value& a, CmpOp op, const Value& b) {
  if (a.index() != b.index()) return false;
  int c;
  if (a.index() == 0) {
    double x = std::get<double>(a), y = std::get<double>(b);
    c = x < y ? -1 : (x > y ? 1 : 0);
  } else {
    c = std::get<std::string>(a).compare(std::get<std::string>(b));
    c = c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  switch (op) {
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
  }
  return false;
}

namespace {

std::shared_ptr<const Pred::Node> make_node(Pred::Node n) { return std::make_shared<const Pred::Node>(std::move(n)); }

const std::shared_ptr<const Pred::Node>& true_node() {
  static const auto n = make_node(Pred::Node{});
  return n;
}

const std::shared_ptr<const Pred::Node>& false_node() {
  static const auto n = [] {
    Pred::Node f;
    f.kind = Pred::Kind::False;
    return make_node(std::move(f));
  }();
  return n;
}

int cmp_value(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

Pred::Pred() : n_(true_node()) {}
Pred Pred::truth() { return Pred(true_node()); }
Pred Pred::falsity() { return Pred(false_node()); }

Pred Pred::type_is(Label rel) {
  Node n;
  n.kind = Kind::TypeIs;
  n.rel = rel;
  return Pred(make_node(std::move(n)));
}

Pred Pred::compare(std::string attr, CmpOp op, Value constant) {
  Node n;
  n.kind = Kind::Compare;
  n.attr = std::move(attr);
  n.op = op;
  n.constant = std::move(constant);
  return Pred(make_node(std::move(n)));
}

Pred Pred::all_of(std::vector<Pred> parts) {
  std::vector<Pred> flat;
  for (auto& p : parts) {
    if (p.kind() == Kind::And) {
      flat.insert(flat.end(), p.parts().begin(), p.parts().end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return truth();
  if (flat.size() == 1) return flat[0];
  Node n;
  n.kind = Kind::And;
  n.parts = std::move(flat);
  return Pred(make_node(std::move(n)));
}

Pred Pred::any_of(std::vector<Pred> parts) {
  std::vector<Pred> flat;
  for (auto& p : parts) {
    if (p.kind() == Kind::Or) {
      flat.insert(flat.end(), p.parts().begin(), p.parts().end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return falsity();
  if (flat.size() == 1) return flat[0];
  Node n;
  n.kind = Kind::Or;
  n.parts = std::move(flat);
  return Pred(make_node(std::move(n)));
}

Pred Pred::negate(const Pred& p) {
  Node n;
  n.kind = Kind::Not;
  n.parts = {p};
  return Pred(make_node(std::move(n)));
}

Pred::Kind Pred::kind() const { return n_->kind; }
Label Pred::rel() const { return n_->rel; }
const std::string& Pred::attr() const { return n_->attr; }
CmpOp Pred::op() const { return n_->op; }
const Value& Pred::constant() const { return n_->constant; }
const std::vector<Pred>& Pred::parts() const { return n_->parts; }

bool Pred::eval(const Event& e) const {
  const Node& n = *n_;
  switch (n.kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::TypeIs: return e.type() == n.rel;
    case Kind::Compare: {
      const Value* v = e.get(n.attr);
      return v && compare_values(*v, n.op, n.constant);
    }
    case Kind::And:
      for (const auto& p : n.parts) {
        if (!p.eval(e)) return false;
      }
      return true;
    case Kind::Or:
      for (const auto& p : n.parts) {
        if (p.eval(e)) return true;
      }
      return false;
    case Kind::Not: return !n.parts[0].eval(e);
  }
  return false;
}

bool Pred::is_conjunctive() const {
  switch (kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::TypeIs:
    case Kind::Compare: return true;
    case Kind::And:
      return std::all_of(parts().begin(), parts().end(), [](const Pred& p) { return p.is_conjunctive(); });
    default: return false;
  }
}

std::vector<Pred> Pred::conjuncts() const {
  if (kind() == Kind::True) return {};
  if (kind() == Kind::And) return parts();
  return {*this};
}

Pred Pred::simplified() const {
  switch (kind()) {
    case Kind::And: {
      std::vector<Pred> out;
      for (const auto& p : parts()) {
        Pred s = p.simplified();
        if (s.is_false()) return falsity();
        if (!s.is_true()) out.push_back(s);
      }
      return all_of(std::move(out));
    }
    case Kind::Or: {
      std::vector<Pred> out;
      for (const auto& p : parts()) {
        Pred s = p.simplified();
        if (s.is_true()) return truth();
        if (!s.is_false()) out.push_back(s);
      }
      return any_of(std::move(out));
    }
    case Kind::Not: {
      Pred s = parts()[0].simplified();
      if (s.is_true()) return falsity();
      if (s.is_false()) return truth();
      return negate(s);
    }
    default: return *this;
  }
}

Pred Pred::specialize_type(Label r) const {
  switch (kind()) {
    case Kind::TypeIs: return rel() == r ? truth() : falsity();
    case Kind::And:
    case Kind::Or: {
      std::vector<Pred> out;
      for (const auto& p : parts()) out.push_back(p.specialize_type(r));
      return (kind() == Kind::And ? all_of(std::move(out)) : any_of(std::move(out))).simplified();
    }
    case Kind::Not: return negate(parts()[0].specialize_type(r)).simplified();
    default: return *this;
  }
}

namespace {

int precedence(Pred::Kind k) {
  switch (k) {
    case Pred::Kind::Or: return 0;
    case Pred::Kind::And: return 1;
    default: return 2;
  }
}

std::string print_at(const Pred& p, int level) {
  std::string out;
  switch (p.kind()) {
    case Pred::Kind::True: out = "TRUE"; break;
    case Pred::Kind::False: out = "FALSE"; break;
    case Pred::Kind::TypeIs: out = "type = " + p.rel().name(); break;
    case Pred::Kind::Compare:
      out = p.attr() + " " + cmp_symbol(p.op()) + " " + value_to_string(p.constant());
      break;
    case Pred::Kind::And:
    case Pred::Kind::Or: {
      const char* sep = p.kind() == Pred::Kind::And ? " AND " : " OR ";
      int inner = precedence(p.kind()) + 1;
      for (std::size_t i = 0; i < p.parts().size(); ++i) {
        if (i) out += sep;
        out += print_at(p.parts()[i], inner);
      }
      break;
    }
    case Pred::Kind::Not: out = "NOT " + print_at(p.parts()[0], 2); break;
  }
  if (precedence(p.kind()) < level) return "(" + out + ")";
  return out;
}

int cmp_pred(const Pred& a, const Pred& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Pred::Kind::True:
    case Pred::Kind::False: return 0;
    case Pred::Kind::TypeIs: {
      int c = a.rel().name().compare(b.rel().name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Pred::Kind::Compare: {
      int c = a.attr().compare(b.attr());
      if (c) return c < 0 ? -1 : 1;
      if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
      return cmp_value(a.constant(), b.constant());
    }
    default: {
      const auto& pa = a.parts();
      const auto& pb = b.parts();
      for (std::size_t i = 0; i < pa.size() && i < pb.size(); ++i) {
        int c = cmp_pred(pa[i], pb[i]);
        if (c) return c;
      }
      if (pa.size() != pb.size()) return pa.size() < pb.size() ? -1 : 1;
      return 0;
    }
  }
}

}  // namespace

std::string Pred::print() const { return print_at(*this, 0); }

bool operator==(const Pred& a, const Pred& b) { return a.n_ == b.n_ || cmp_pred(a, b) == 0; }
bool operator<(const Pred& a, const Pred& b) { return cmp_pred(a, b) < 0; }

Pred conjoin(const Pred& p, const Pred& q) {
  if (p.is_false() || q.is_false()) return Pred::falsity();
  if (p.is_true()) return q;
  if (q.is_true()) return p;
  // Canonical order and no repeats, so equal conjunctions compare equal.
  std::vector<Pred> parts = Pred::all_of({p, q}).parts();
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  return Pred::all_of(std::move(parts));
}

std::vector<Pred> minterms(const std::vector<Pred>& ps) {
  std::vector<Pred> distinct;
  for (const auto& p : ps) {
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  }
  if (distinct.size() > kMintermCap) {
    throw Error(ErrorKind::Capacity, "minterm construction over " + std::to_string(distinct.size()) +
                                         " predicates exceeds the limit of " + std::to_string(kMintermCap));
  }
  std::vector<Pred> out;
  std::size_t k = distinct.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<Pred> parts;
    for (std::size_t i = 0; i < k; ++i) {
      parts.push_back((mask >> i) & 1 ? Pred::negate(distinct[i]) : distinct[i]);
    }
    out.push_back(Pred::all_of(std::move(parts)));
  }
  return out;
}

Pred parse_predicate(const std::string& text) {
  detail::Lexer lx(text);
  Pred p = detail::parse_pexpr(lx);
  if (lx.peek().kind != detail::Token::Kind::End) lx.fail("unexpected trailing input");
  return p;
}

// ---------------------------------------------------------------- SoPred

SoPred SoPred::univ(Pred p) {
  SoPred s;
  s.kind_ = Kind::UnivExt;
  s.pred_ = std::move(p);
  return s;
}

SoPred SoPred::increasing(std::string attr) {
  SoPred s;
  s.kind_ = Kind::Increasing;
  s.attr_ = std::move(attr);
  return s;
}

SoPred SoPred::attr_compare(std::string attr1, CmpOp op, std::string attr2) {
  SoPred s;
  s.kind_ = Kind::AttrCompare;
  s.attr_ = std::move(attr1);
  s.attr2_ = std::move(attr2);
  s.op_ = op;
  s.arity_ = 2;
  return s;
}

SoPred SoPred::custom(std::string name, int arity, CustomFn fn) {
  SoPred s;
  s.kind_ = Kind::Custom;
  s.attr_ = std::move(name);
  s.arity_ = arity;
  s.fn_ = std::make_shared<CustomFn>(std::move(fn));
  return s;
}

int SoPred::arity() const { return arity_; }

bool SoPred::eval(const std::vector<EventSet>& args) const {
  if (static_cast<int>(args.size()) != arity_) {
    throw Error(ErrorKind::Precondition, "second-order predicate expects " + std::to_string(arity_) + " arguments");
  }
  switch (kind_) {
    case Kind::UnivExt:
      return std::all_of(args[0].begin(), args[0].end(), [&](const auto& pe) { return pred_.eval(*pe.second); });
    case Kind::Increasing: {
      const Value* prev = nullptr;
      for (const auto& [pos, e] : args[0]) {
        const Value* v = e->get(attr_);
        if (!v) return false;
        if (prev && !compare_values(*prev, CmpOp::Lt, *v)) return false;
        prev = v;
      }
      return true;
    }
    case Kind::AttrCompare:
      for (const auto& [p1, x] : args[0]) {
        const Value* a = x->get(attr_);
        for (const auto& [p2, y] : args[1]) {
          const Value* b = y->get(attr2_);
          if (!a || !b || !compare_values(*a, op_, *b)) return false;
        }
      }
      return true;
    case Kind::Custom: return (*fn_)(args);
  }
  return false;
}

bool operator==(const SoPred& a, const SoPred& b) {
  if (a.kind_ != b.kind_ || a.arity_ != b.arity_) return false;
  switch (a.kind_) {
    case SoPred::Kind::UnivExt: return a.pred_ == b.pred_;
    case SoPred::Kind::Increasing: return a.attr_ == b.attr_;
    case SoPred::Kind::AttrCompare: return a.attr_ == b.attr_ && a.op_ == b.op_ && a.attr2_ == b.attr2_;
    case SoPred::Kind::Custom: return a.attr_ == b.attr_ && a.fn_ == b.fn_;
  }
  return false;
}


namespace {

struct Bound {
  bool set = false;
  double v = 0;
  bool strict = false;
};

void apply_compare(CmpOp op, double c, Bound& lo, Bound& hi, std::vector<double>& ne) {
  auto raise = [&](double v, bool strict) {
    if (!lo.set || v > lo.v || (v == lo.v && strict)) lo = {true, v, strict};
  };
  auto lower = [&](double v, bool strict) {
    if (!hi.set || v < hi.v || (v == hi.v && strict)) hi = {true, v, strict};
  };
  switch (op) {
    case CmpOp::Lt: lower(c, true); break;
    case CmpOp::Le: lower(c, false); break;
    case CmpOp::Gt: raise(c, true); break;
    case CmpOp::Ge: raise(c, false); break;
    case CmpOp::Eq: raise(c, false); lower(c, false); break;
    case CmpOp::Ne: ne.push_back(c); break;
  }
}

CmpOp negated(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
  }
  return op;
}

// Conjunction p unsatisfiable by syntactic reasoning on its conjuncts.
bool conjunction_unsat(const Pred& p) {
  // Conjuncts with double negations removed and nested conjunctions flattened.
  std::vector<Pred> lits;
  std::vector<Pred> todo{p};
  while (!todo.empty()) {
    Pred l = todo.back();
    todo.pop_back();
    while (l.kind() == Pred::Kind::Not && l.parts()[0].kind() == Pred::Kind::Not) l = l.parts()[0].parts()[0];
    if (l.kind() == Pred::Kind::And) {
      todo.insert(todo.end(), l.parts().begin(), l.parts().end());
    } else {
      lits.push_back(l);
    }
  }
  std::vector<Label> types;
  std::vector<Pred> positives;
  // Negated comparisons also hold on events lacking the attribute, so a range
  // only counts when some positive comparison forces a numeric value.
  std::map<std::string, std::tuple<Bound, Bound, std::vector<double>, bool>> ranges;
  for (const auto& l : lits) {
    if (l.is_false()) return true;
    bool neg = l.kind() == Pred::Kind::Not;
    const Pred& atom = neg ? l.parts()[0] : l;
    if (atom.is_true() && neg) return true;
    if (!neg) positives.push_back(atom);
    if (atom.kind() == Pred::Kind::TypeIs && !neg) {
      if (!types.empty() && types[0] != atom.rel()) return true;
      types.push_back(atom.rel());
    }
    if (atom.kind() == Pred::Kind::Compare && std::holds_alternative<double>(atom.constant())) {
      auto& [lo, hi, ne, present] = ranges[atom.attr()];
      if (!neg) present = true;
      apply_compare(neg ? negated(atom.op()) : atom.op(), std::get<double>(atom.constant()), lo, hi, ne);
    }
  }
  auto asserted = [&](const Pred& q) { return std::find(positives.begin(), positives.end(), q) != positives.end(); };
  for (const auto& l : lits) {
    if (l.kind() != Pred::Kind::Not) continue;
    const Pred& inner = l.parts()[0];
    if (asserted(inner)) return true;
    if (inner.kind() == Pred::Kind::And &&
        std::all_of(inner.parts().begin(), inner.parts().end(), asserted)) {
      return true;
    }
  }
  for (const auto& [attr, r] : ranges) {
    const auto& [lo, hi, ne, present] = r;
    if (!present || !lo.set || !hi.set) continue;
    if (lo.v > hi.v) return true;
    if (lo.v == hi.v) {
      if (lo.strict || hi.strict) return true;
      if (std::find(ne.begin(), ne.end(), lo.v) != ne.end()) return true;
    }
  }
  return false;
}

void collect_atoms(const Pred& p, std::vector<Pred>& out) {
  switch (p.kind()) {
    case Pred::Kind::TypeIs:
    case Pred::Kind::Compare:
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
      break;
    case Pred::Kind::And:
    case Pred::Kind::Or:
    case Pred::Kind::Not:
      for (const auto& q : p.parts()) collect_atoms(q, out);
      break;
    default: break;
  }
}

bool holds(const Pred& p, const std::vector<Pred>& atoms, std::uint32_t bits) {
  switch (p.kind()) {
    case Pred::Kind::True: return true;
    case Pred::Kind::False: return false;
    case Pred::Kind::And:
      return std::all_of(p.parts().begin(), p.parts().end(), [&](const Pred& q) { return holds(q, atoms, bits); });
    case Pred::Kind::Or:
      return std::any_of(p.parts().begin(), p.parts().end(), [&](const Pred& q) { return holds(q, atoms, bits); });
    case Pred::Kind::Not: return !holds(p.parts()[0], atoms, bits);
    default: {
      const auto i = std::find(atoms.begin(), atoms.end(), p) - atoms.begin();
      return (bits >> i) & 1U;
    }
  }
}

constexpr std::size_t kMaxCaseSplitAtoms = 12;

}  // namespace

bool provably_unsat(const Pred& p) {
  std::vector<Pred> atoms;
  collect_atoms(p, atoms);
  if (atoms.size() > kMaxCaseSplitAtoms) return conjunction_unsat(p);
  // Every truth assignment to the atoms that satisfies p must be inconsistent.
  for (std::uint32_t bits = 0; bits < (1U << atoms.size()); ++bits) {
    if (!holds(p, atoms, bits)) continue;
    std::vector<Pred> lits;
    for (std::size_t i = 0; i < atoms.size(); ++i) lits.push_back((bits >> i) & 1U ? atoms[i] : Pred::negate(atoms[i]));
    if (lits.empty() || !conjunction_unsat(Pred::all_of(lits))) return false;
  }
  return true;
}

bool provably_disjoint(const Pred& p, const Pred& q) { return provably_unsat(conjoin(p, q)); }

}  // namespace socel
