#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "socel/automaton.hpp"
#include "socel/focel.hpp"
#include "socel/formula.hpp"
#include "socel/model.hpp"

namespace socel::testing {

// Contents of fixtures/<name>.
std::string read_fixture(const std::string& name);
// Temperature (T) and humidity (H) readings from fixtures/.
const Schema& sensor_schema();
const Stream& sensor_stream();
Formula fixture_query(const std::string& name);
Event fig(const std::string& rel, double value);

// Two relations R and T, one numeric attribute v.
const Schema& small_schema();
// R(v=0), R(v=1), T(v=-1), T(v=1).
const std::vector<Event>& alphabet4();
// R(v=0), T(v=1).
const std::vector<Event>& alphabet2();
Event ev(const std::string& rel, double v);

// Visits every stream of length 1..max_len over the alphabet in depth-first
// order. `enter` sees the stream right after an event is appended; `leave`
// runs before it is removed again. Returning false from enter skips the
// extensions of that prefix.
void walk_streams(const std::vector<Event>& alphabet, std::size_t max_len,
                  const std::function<bool(const Stream&)>& enter, const std::function<void()>& leave);

enum class Family {
  Labels,      // IN, rename and filters over atoms
  Or,
  Seq,
  Plus,
  StrictSeq,
  StrictPlus,
  Project,
  Start,
  Strict,
  And,
  All,
  Unless,
};

const std::vector<Family>& all_families();
const std::vector<Family>& core_families();
std::string family_name(Family f);

struct GenOptions {
  std::size_t max_depth = 4;
  std::vector<Op> ops;  // operators allowed below the top node
  bool labels = true;   // allow IN/rename/filter wrappers
};

class FormulaGen {
 public:
  explicit FormulaGen(std::uint64_t seed) : rng_(seed) {}

  // A formula whose top operator belongs to the family.
  Formula generate(Family family, const GenOptions& opts);
  Formula random(std::size_t depth, const GenOptions& opts);
  Formula unit();
  SoAtom unary_filter(Label target);
  Label label();
  std::mt19937_64& rng() { return rng_; }

 private:
  Formula wrap_labels(Formula f, const GenOptions& opts);
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::mt19937_64 rng_;
};

// Random unary FO-CEL formulas with one fresh variable per AS. Filters
// mostly mention variables bound outside loops in the filtered part.
FoFormula random_focel(std::mt19937_64& rng, std::size_t depth);

// Operator sets for the generator.
std::vector<Op> core_ops();
std::vector<Op> extended_ops();
std::vector<Op> full_ops();

// Random automaton over the small schema with up to max_states states.
Ucea random_automaton(std::mt19937_64& rng, int max_states);

// Every complex event with its reserved labels removed.
CeSet without_reserved(const CeSet& s);

std::string describe(const CeSet& s);

// First stream (up to max_len) where the two formulas disagree under the
// oracle at the last position, or "" when none does. Reserved labels are
// removed from both sides before comparing.
std::string oracle_mismatch(const Formula& f, const Formula& g, const std::vector<Event>& alphabet,
                            std::size_t max_len);
// Same, comparing the oracle for f against the run semantics of a.
std::string automaton_mismatch(const Formula& f, const Ucea& a, const std::vector<Event>& alphabet,
                               std::size_t max_len, Semantics mode = Semantics::Standard);
std::string describe(const Stream& s);

}  // namespace socel::testing
