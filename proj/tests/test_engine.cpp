#include <doctest.h>

#include <set>

#include "socel/compile.hpp"
#include "socel/engine.hpp"
#include "socel/error.hpp"
#include "socel/oracle.hpp"
#include "support.hpp"

using namespace socel;
using namespace socel::testing;

namespace {

Formula q(const std::string& text) { return parse(text, small_schema()); }

// Engine output against the naive run simulator on every stream up to
// max_len; duplicates in one enumeration count as a mismatch.
std::string engine_mismatch(const Ucea& a, std::size_t max_len) {
  Ucea det = io_determinize(a);
  std::string bad;
  Stream current;
  RunSimulator sim(a);
  walk_streams(
      alphabet4(), max_len,
      [&](const Stream& s) {
        current = s;
        sim.push(s.back());
        Engine engine(det);
        for (const auto& e : s) engine.step(e);
        std::vector<ComplexEvent> got;
        engine.enumerate([&](const ComplexEvent& c) { got.push_back(c); });
        CeSet unique = got;
        normalize(unique);
        if (unique.size() != got.size()) bad = "duplicates on " + describe(s);
        if (unique != sim.accepted()) bad = "on " + describe(s) + ": " + describe(unique) + " vs " + describe(sim.accepted());
        return bad.empty();
      },
      [&] {
        sim.pop();
        current.pop_back();
      });
  return bad;
}

}  // namespace

TEST_CASE("engine rejects nondeterministic automata") {
  Ucea a;
  a.add_state();
  a.add_state();
  a.set_initial(0);
  a.set_initial(1);
  CHECK_THROWS_AS(Engine{a}, Error);
  Ucea b = compile(q("R OR R"));
  CHECK_THROWS_AS(Engine{b}, Error);
  CHECK_NOTHROW(Engine{io_determinize(b)});
}

TEST_CASE("engine before the first event has no output") {
  Engine engine(io_determinize(compile(q("R"))));
  CHECK(engine.position() == -1);
  CHECK(engine.results().empty());
}

TEST_CASE("engine agrees with the naive simulator") {
  for (const char* text : {"R", "R ; T", "R+", "(R OR T)+ ; T", "R IN A ; (T FILTER T.v >= 0)+", "R : T", "R(+)",
                           "START(R ; T)", "PROJECT[A](R IN A ; T)", "R+ AND (R ; R)", "R ALL T", "R+ UNLESS T"}) {
    CHECK_MESSAGE(engine_mismatch(compile(q(text)), 5).empty(), text);
  }
  FormulaGen gen(11);
  GenOptions opts;
  opts.max_depth = 3;
  opts.ops = full_ops();
  for (int k = 0; k < 40; ++k) {
    Formula f = gen.random(3, opts);
    CHECK_MESSAGE(engine_mismatch(compile(f), 4).empty(), print(f));
  }
}

TEST_CASE("engine snapshots survive later steps and compaction") {
  Engine engine(io_determinize(compile(q("R+"))), 2);
  for (int k = 0; k < 3; ++k) engine.step(ev("R", 0));
  auto snap = engine.snapshot();
  CeSet before = engine.results();
  for (int k = 0; k < 10; ++k) engine.step(ev("R", 0));
  CeSet later;
  snap.enumerate([&](const ComplexEvent& c) { later.push_back(c); });
  normalize(later);
  CHECK(before == later);
  CHECK(before.size() == 4);  // subsets of {0, 1} plus the last position
}

TEST_CASE("compaction keeps results") {
  Ucea a = io_determinize(compile(q("R IN A ; T OR T IN B")));
  Engine small(a, 3);
  Engine none(a, 0);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Event& e = alphabet4()[rng() % 4];
    small.step(e);
    none.step(e);
    REQUIRE(small.results() == none.results());
  }
  CHECK(small.stats().compactions > 0);
  CHECK(small.stats().live_nodes < none.stats().live_nodes);
}

TEST_CASE("engine on the sensor stream") {
  const Stream& s = sensor_stream();
  auto atom = [](const char* rel) { return io_determinize(compile(parse(rel, sensor_schema()))); };

  Engine h(atom("H"));
  h.step(s[0]);
  const int accepting = h.automaton().final_states.at(0);
  CHECK(h.list(accepting).empty());
  CHECK(h.list(h.automaton().initial.at(0)).size() == 1);

  Engine t(atom("T"));
  for (int i = 0; i <= 3; ++i) t.step(s[static_cast<std::size_t>(i)]);
  const auto nodes = t.list(t.automaton().final_states.at(0));
  REQUIRE(nodes.size() == 1);
  CHECK(nodes[0].first == 3);
  CHECK(nodes[0].second == LabelSet{Label("T")});
  CHECK(t.results() == CeSet{ComplexEvent{{"T", {3}}}});

  Engine h_then_t(io_determinize(Ucea::from_json(read_fixture("h_then_t.json"))));
  for (int i = 0; i <= 3; ++i) h_then_t.step(s[static_cast<std::size_t>(i)]);
  CHECK(h_then_t.results() == CeSet{ComplexEvent{{"H", {1}}}, ComplexEvent{{"H", {2}}}});

  Engine freeze(io_determinize(compile(fixture_query("freeze_threshold.cel"))));
  const Formula threshold = fixture_query("freeze_threshold.cel");
  Oracle oracle(s);
  for (Position n = 0; n < 10; ++n) {
    freeze.step(s[static_cast<std::size_t>(n)]);
    CHECK(freeze.results() == oracle.eval_at(threshold, n));
  }
  CHECK(ce_set_contains(freeze.results(),
                        ComplexEvent{{"T", {3}}, {"H", {4, 6, 7, 9}}, {"HS", {4, 6, 7}}, {"HH", {9}}}));
}
