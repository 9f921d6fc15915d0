#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "socel/model.hpp"

namespace socel {

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };
const char* cmp_symbol(CmpOp op);
bool compare_values(const Value& a, CmpOp op, const Value& b);

// Boolean combination of unary predicates over a single event.
class Pred {
 public:
  enum class Kind { True, False, TypeIs, Compare, And, Or, Not };

  Pred();  // TRUE
  static Pred truth();
  static Pred falsity();
  static Pred type_is(Label rel);
  static Pred compare(std::string attr, CmpOp op, Value constant);
  static Pred all_of(std::vector<Pred> parts);  // flattened conjunction
  static Pred any_of(std::vector<Pred> parts);  // flattened disjunction
  static Pred negate(const Pred& p);

  Kind kind() const;
  Label rel() const;
  const std::string& attr() const;
  CmpOp op() const;
  const Value& constant() const;
  const std::vector<Pred>& parts() const;  // And/Or operands, Not operand

  bool eval(const Event& e) const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  // In the conjunction-closed class: atoms and And of atoms.
  bool is_conjunctive() const;
  // Conjuncts of a conjunctive predicate (TRUE yields an empty list).
  std::vector<Pred> conjuncts() const;
  // Substitute TypeIs(rel) by TRUE and other TypeIs by FALSE, then fold constants.
  Pred specialize_type(Label rel) const;
  Pred simplified() const;

  std::string print() const;

  friend bool operator==(const Pred& a, const Pred& b);
  friend bool operator<(const Pred& a, const Pred& b);

  struct Node;

 private:
  explicit Pred(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

// Logical and; flattens nested conjunctions, drops TRUE, absorbs FALSE.
Pred conjoin(const Pred& p, const Pred& q);

// All 2^k sign combinations of the inputs (duplicates removed first).
// Throws Error(Capacity) when more than kMintermCap distinct predicates are given.
inline constexpr std::size_t kMintermCap = 20;
std::vector<Pred> minterms(const std::vector<Pred>& ps);

// Sound but incomplete: true only when the conjunction of top-level literals
// is contradictory (FALSE, p and NOT p, two relation tests, empty numeric range).
bool provably_unsat(const Pred& p);
bool provably_disjoint(const Pred& p, const Pred& q);

// Syntax: "value < 0 AND NOT type = R", "TRUE", "(a OR b)".
Pred parse_predicate(const std::string& text);

// Events of one argument of a second-order predicate, in position order.
using EventSet = std::vector<std::pair<Position, const Event*>>;

class SoPred {
 public:
  enum class Kind { UnivExt, Increasing, AttrCompare, Custom };
  using CustomFn = std::function<bool(const std::vector<EventSet>&)>;

  static SoPred univ(Pred p);
  static SoPred increasing(std::string attr);
  // Binary universal extension of x.attr1 op y.attr2.
  static SoPred attr_compare(std::string attr1, CmpOp op, std::string attr2);
  static SoPred custom(std::string name, int arity, CustomFn fn);

  Kind kind() const { return kind_; }
  int arity() const;
  const Pred& pred() const { return pred_; }
  const std::string& attr() const { return attr_; }
  const std::string& attr2() const { return attr2_; }
  CmpOp op() const { return op_; }
  const std::string& name() const { return attr_; }
  bool is_unary_ext() const { return kind_ == Kind::UnivExt; }

  bool eval(const std::vector<EventSet>& args) const;

  friend bool operator==(const SoPred& a, const SoPred& b);

 private:
  Kind kind_ = Kind::UnivExt;
  Pred pred_;
  std::string attr_;
  std::string attr2_;
  CmpOp op_ = CmpOp::Eq;
  int arity_ = 1;
  std::shared_ptr<CustomFn> fn_;
};

}  // namespace socel
