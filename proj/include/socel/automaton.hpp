#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socel/formula.hpp"
#include "socel/model.hpp"
#include "socel/predicates.hpp"

namespace socel {

enum class Semantics { Standard, Star };

struct Transition {
  int from = 0;
  Pred guard;
  LabelSet labels;
  int to = 0;
};

// Unary complex event automaton. States are 0..num_states-1.
struct Ucea {
  int num_states = 0;
  std::vector<Transition> delta;
  std::vector<int> initial;       // sorted, unique
  std::vector<int> final_states;  // sorted, unique
  std::vector<std::string> names;  // optional display names, one per state when nonempty

  int add_state();
  void add(int from, Pred guard, LabelSet labels, int to);
  void set_initial(int q);
  void set_final(int q);
  bool is_initial(int q) const;
  bool is_final(int q) const;
  std::string state_name(int q) const;

  LabelSet labels() const;
  // Transition indices grouped by source state.
  std::vector<std::vector<int>> outgoing() const;
  // Throws Error(Static) on dangling endpoints or invalid initial/final entries.
  void validate() const;
  // Checks guard relations and attributes against the schema.
  void validate(const Schema& schema) const;

  std::string to_json() const;
  std::string to_dot() const;
  static Ucea from_json(std::string_view text);
};

// Keeps states reachable from an initial state and co-reachable to a final one.
Ucea trim(const Ucea& a);

// ---- semantics ---------------------------------------------------------

// Run semantics over a stream prefix that grows and shrinks one event at a
// time, so families of streams can be walked depth first.
class RunSimulator {
 public:
  explicit RunSimulator(const Ucea& a);
  void push(const Event& e);
  void pop();
  Position length() const { return static_cast<Position>(stack_.size()) - 1; }
  // Complex events of accepting runs over the current prefix (n = length-1).
  CeSet accepted() const;

 private:
  struct Config {
    int q;
    std::vector<Mark> marks;
    friend auto operator<=>(const Config&, const Config&) = default;
    friend bool operator==(const Config&, const Config&) = default;
  };
  const Ucea& a_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<Config>> stack_;
};

// *-runs: positions strictly increasing, last one = n, nonempty labels only.
class StarSimulator {
 public:
  explicit StarSimulator(const Ucea& a);
  void push(const Event& e);
  void pop();
  Position length() const { return static_cast<Position>(stack_.size()) - 1; }
  CeSet accepted() const;

 private:
  struct Config {
    int q;
    std::vector<Mark> marks;
    friend auto operator<=>(const Config&, const Config&) = default;
    friend bool operator==(const Config&, const Config&) = default;
  };
  struct Level {
    std::vector<Config> pool;  // runs ending strictly before the next position, plus starts
    std::vector<Config> last;  // runs ending exactly at the latest position
  };
  const Ucea& a_;
  std::vector<std::vector<int>> out_;
  std::vector<Level> stack_;
};

CeSet run_semantics(const Ucea& a, const Stream& s, Position n);
std::vector<CeSet> run_semantics_all(const Ucea& a, const Stream& s);
CeSet star_semantics(const Ucea& a, const Stream& s, Position n);
std::vector<CeSet> star_semantics_all(const Ucea& a, const Stream& s);
// Number of accepting runs at n producing each complex event.
std::map<ComplexEvent, std::uint64_t> run_counts(const Ucea& a, const Stream& s, Position n);

// ---- algebra -----------------------------------------------------------

Ucea union_of(const Ucea& a1, const Ucea& a2);
Ucea product_and(const Ucea& a1, const Ucea& a2);
Ucea product_all(const Ucea& a1, const Ucea& a2);
Ucea unless_monitor(const Ucea& a1, const Ucea& a2);
Ucea io_determinize(const Ucea& a);
Ucea drop_empty_transitions(const Ucea& a);

// First pair of transition indices violating I/O-determinism: same source,
// same label set, guards not provably disjoint. Also reports more than one
// initial state as (-1, -1).
std::optional<std::pair<int, int>> find_nondeterminism(const Ucea& a);

struct StarCounterexample {
  Stream s;
  ComplexEvent c;
  Stream s2;
  ComplexEvent c2;
};

// Searches streams of length 1..bound over the alphabet for an output whose
// *-related neighbour (one padding insertion, one unmarked deletion or one
// unmarked mutation) is not produced.
std::optional<StarCounterexample> check_star_property(const Ucea& a, std::size_t bound,
                                                      const std::vector<Event>& alphabet);

// Kleene-style translation back to a formula. Star mode rejects empty-label
// transitions with Error(Precondition).
Formula state_eliminate_to_formula(const Ucea& a, Semantics mode, const Schema& schema);

// A formula with no complex events: R FILTER FALSE(R) for the first relation.
Formula false_formula(const Schema& schema);

}  // namespace socel
