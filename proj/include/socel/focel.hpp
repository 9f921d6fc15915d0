#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "socel/formula.hpp"
#include "socel/model.hpp"
#include "socel/predicates.hpp"

namespace socel {

// Predicate over the events bound to first-order variables. Unary universal
// extensions read as plain unary predicates; attribute comparisons and
// custom predicates see one-element sets.
struct FoAtom {
  SoPred pred;
  std::vector<Label> vars;
  friend bool operator==(const FoAtom& a, const FoAtom& b) { return a.pred == b.pred && a.vars == b.vars; }
};

enum class FoOp { As, Filter, Or, Seq, Plus };

struct FoNode;

class FoFormula {
 public:
  FoFormula() = default;
  static FoFormula as(Label rel, Label var);
  static FoFormula filter(FoFormula f, std::vector<FoAtom> atoms);
  static FoFormula or_(FoFormula a, FoFormula b);
  static FoFormula seq(FoFormula a, FoFormula b);
  static FoFormula plus(FoFormula f);

  bool valid() const { return n_ != nullptr; }
  FoOp op() const;
  const FoNode* id() const { return n_.get(); }
  const FoFormula& child() const;
  const FoFormula& left() const;
  const FoFormula& right() const;
  Label rel() const;
  Label var() const;
  const std::vector<FoAtom>& atoms() const;

 private:
  explicit FoFormula(std::shared_ptr<const FoNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const FoNode> n_;
};

struct FoNode {
  FoOp op = FoOp::As;
  Label rel;
  Label var;
  std::vector<FoAtom> atoms;
  FoFormula left;
  FoFormula right;
};

// Same surface syntax as SO-CEL restricted to AS, FILTER, OR, ';' and '+':
// `(R AS x ; T AS y) FILTER (x.v < 0 AND x.v < y.v)`.
FoFormula parse_focel(const std::string& text, const Schema& schema);
std::string print(const FoFormula& f);

// Variables bound by AS anywhere, and those bound outside every '+'.
LabelSet vdef(const FoFormula& f);
LabelSet vdef_plus(const FoFormula& f);
bool has_only_unary_filters(const FoFormula& f);

// Nonempty, strictly increasing.
using Match = std::vector<Position>;
using MatchSet = std::vector<Match>;  // sorted, unique

// Total valuation: a default position with finitely many overrides.
struct Valuation {
  Position fallback = 0;
  std::map<Label, Position> overrides;
  Position operator()(Label x) const;
  // this[other / vars]
  Valuation override_with(const Valuation& other, const LabelSet& vars) const;
};

// Matches of f over the window [i, j] under the valuation.
MatchSet eval_focel(const FoFormula& f, const Stream& s, Position i, Position j, const Valuation& nu);
// Union over all valuations with range 0..n.
MatchSet eval_focel_at(const FoFormula& f, const Stream& s, Position n);

// Unary translations; both keep the support of every output. Throws
// Error(Unsupported) for filters that are not unary, and fo_to_so_unary also
// for filters on variables the filtered branch does not bind, unless the same
// predicate already holds on a bound variable of that branch.
Formula fo_to_so_unary(const FoFormula& f);
FoFormula so_to_fo_unary(const Formula& f);

// Supports of a complex-event set, as matches (empty supports dropped).
MatchSet supports(const CeSet& s);

}  // namespace socel
