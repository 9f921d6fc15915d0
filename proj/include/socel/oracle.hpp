#pragma once

#include <deque>
#include <unordered_map>
#include <vector>

#include "socel/formula.hpp"
#include "socel/model.hpp"

namespace socel {

// Direct evaluation of the formula semantics over one stream, memoized on
// (formula node, i, j). Formulas passed in are kept alive by the index.
class Oracle {
 public:
  explicit Oracle(const Stream& s, bool memoize = true) : s_(s), memoize_(memoize) {}

  // All complex events of f over the window [i, j]; requires 0 <= i <= j < |s|.
  const CeSet& eval(const Formula& f, Position i, Position j);
  CeSet eval_at(const Formula& f, Position n);

  std::size_t memo_size() const;
  // Forgets windows ending at or after `length`. Lets one oracle follow a
  // stream that is extended and cut back (the referenced stream may change
  // beyond that point).
  void truncate(Position length);

 private:
  struct Key {
    const FormulaNode* node;
    Position i;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<const void*>()(k.node);
      return h ^ (static_cast<std::size_t>(k.i) * 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
  };

  const CeSet& get(const Formula& f, Position i, Position j);
  CeSet compute(const Formula& f, Position i, Position j);
  bool filter_holds(const std::vector<SoAtom>& atoms, const ComplexEvent& c) const;

  const Stream& s_;
  bool memoize_;
  std::deque<std::unordered_map<Key, CeSet, KeyHash>> memo_;  // indexed by window end
  std::deque<CeSet> scratch_;
  std::vector<Formula> roots_;
};

CeSet eval_at(const Formula& f, const Stream& s, Position n);
// Results for every n in 0..|s|-1, sharing one memo table.
std::vector<CeSet> eval_all_positions(const Formula& f, const Stream& s);

inline constexpr std::size_t kEnumerateCap = 24;
// Every complex event over the labels with support inside 0..n.
// Throws Error(Capacity) when |labels|*(n+1) exceeds kEnumerateCap.
std::vector<ComplexEvent> enumerate_all_complex_events(const LabelSet& labels, Position n);

}  // namespace socel
