#pragma once

#include <memory>
#include <string>
#include <vector>

#include "socel/model.hpp"
#include "socel/predicates.hpp"

namespace socel {

enum class Op {
  Atom,
  In,
  Rename,
  Filter,
  Or,
  Seq,
  Plus,
  StrictSeq,   // ':'
  StrictPlus,  // '(+)'
  Project,
  Start,
  Strict,
  And,
  All,
  Unless,
};

const char* op_name(Op op);

// One second-order predicate applied to labels, e.g. HS.value >= 20.
struct SoAtom {
  SoPred pred;
  std::vector<Label> args;
  friend bool operator==(const SoAtom& a, const SoAtom& b) { return a.pred == b.pred && a.args == b.args; }
};

struct FormulaNode;

// Immutable, structurally shared formula tree. Node identity (id()) is stable
// for the lifetime of the value and is what evaluators memoize on.
class Formula {
 public:
  Formula() = default;

  static Formula atom(Label rel);
  static Formula in(Formula f, Label a);
  static Formula rename(Formula f, Label from, Label to);
  static Formula filter(Formula f, SoAtom atom);
  static Formula filter(Formula f, std::vector<SoAtom> conjunction);
  static Formula or_(Formula a, Formula b);
  static Formula seq(Formula a, Formula b);
  static Formula plus(Formula f);
  static Formula strict_seq(Formula a, Formula b);
  static Formula strict_plus(Formula f);
  static Formula project(LabelSet keep, Formula f);
  static Formula start(Formula f);
  static Formula strict(Formula f);
  static Formula and_(Formula a, Formula b);
  static Formula all(Formula a, Formula b);
  static Formula unless(Formula a, Formula b);
  static Formula binary(Op op, Formula a, Formula b);
  static Formula unary(Op op, Formula f);

  bool valid() const { return n_ != nullptr; }
  Op op() const;
  const FormulaNode* id() const { return n_.get(); }
  const Formula& child() const;  // unary nodes and left operand
  const Formula& left() const;
  const Formula& right() const;
  Label rel() const;       // Atom
  Label label() const;     // In target, Rename source
  Label label_to() const;  // Rename target
  const std::vector<SoAtom>& atoms() const;  // Filter conjunction
  const LabelSet& keep() const;              // Project

  bool is_unary_op() const;
  bool is_binary_op() const;
  std::size_t size() const;   // node count of the tree (shared subtrees counted per use)
  std::size_t depth() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> n_;
};

struct FormulaNode {
  Op op = Op::Atom;
  Label a;
  Label b;
  std::vector<SoAtom> atoms;
  LabelSet keep;
  Formula left;
  Formula right;
};

struct ParseOptions {
  // Labels with the reserved "_g" prefix are rejected unless set; printed
  // rewrite outputs re-parse with this enabled.
  bool allow_reserved = false;
  // Filters and projections may name labels the formula never assigns (they
  // then constrain nothing). Off for user queries.
  bool allow_unassigned = false;
};

Formula parse(const std::string& text, const Schema& schema, ParseOptions opts = {});
std::string print(const Formula& f);
std::string print_atom(const SoAtom& a);

// Relation names of the schema plus IN and rename targets.
LabelSet label_universe(const Formula& f, const Schema& schema);
// Labels the formula can assign: atom relations, IN and rename targets.
LabelSet assigned_labels(const Formula& f);
// Every label occurring anywhere in the formula.
LabelSet mentioned_labels(const Formula& f);

Formula desugar_conjunctive_filter(const Formula& f);

// Same node as f with new children (right is ignored for unary nodes).
Formula rebuild(const Formula& f, Formula left, Formula right = {});

bool contains_op(const Formula& f, Op op);
bool is_core(const Formula& f);
// Core plus ':', '(+)', PROJECT and START.
bool is_extended(const Formula& f);
// All filters are unary universal extensions.
bool has_only_unary_filters(const Formula& f);

}  // namespace socel
