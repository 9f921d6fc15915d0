#include <doctest.h>

#include <algorithm>
#include <functional>

#include "socel/error.hpp"
#include "socel/focel.hpp"
#include "socel/oracle.hpp"
#include "support.hpp"

using namespace socel;
using namespace socel::testing;

namespace {

// Valuation-by-valuation reading of the FO-CEL clauses, with every variable
// ranging over 0..range. Exponential; small formulas only.
struct BruteForce {
  const Stream& s;
  Position range;

  bool holds(const FoAtom& a, const Valuation& nu) const {
    std::vector<EventSet> args;
    for (Label x : a.vars) {
      const Position p = nu(x);
      if (p < 0 || p >= static_cast<Position>(s.size())) return false;
      args.push_back(EventSet{{p, &s[static_cast<std::size_t>(p)]}});
    }
    return a.pred.eval(args);
  }

  bool member(const FoFormula& f, const Match& m, Position i, Position j, const Valuation& nu) const {
    switch (f.op()) {
      case FoOp::As: {
        const Position p = nu(f.var());
        return m == Match{p} && p == j && i <= p && s[static_cast<std::size_t>(p)].type() == f.rel();
      }
      case FoOp::Filter:
        if (!member(f.child(), m, i, j, nu)) return false;
        for (const auto& a : f.atoms()) {
          if (!holds(a, nu)) return false;
        }
        return true;
      case FoOp::Or: return member(f.left(), m, i, j, nu) || member(f.right(), m, i, j, nu);
      case FoOp::Seq:
        for (std::size_t cut = 1; cut < m.size(); ++cut) {
          Match m1(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(cut));
          Match m2(m.begin() + static_cast<std::ptrdiff_t>(cut), m.end());
          for (Position k = i; k < j; ++k) {
            if (member(f.left(), m1, i, k, nu) && member(f.right(), m2, k + 1, j, nu)) return true;
          }
        }
        return false;
      case FoOp::Plus: {
        const LabelSet u = vdef_plus(f.child());
        bool found = false;
        for_each_valuation(u, nu, [&](const Valuation& nu2) {
          if (found) return;
          if (member(f.child(), m, i, j, nu2)) {
            found = true;
            return;
          }
          for (std::size_t cut = 1; cut < m.size() && !found; ++cut) {
            Match m1(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(cut));
            Match m2(m.begin() + static_cast<std::ptrdiff_t>(cut), m.end());
            for (Position k = i; k < j && !found; ++k) {
              found = member(f.child(), m1, i, k, nu2) && member(f, m2, k + 1, j, nu2);
            }
          }
        });
        return found;
      }
    }
    return false;
  }

  void for_each_valuation(const LabelSet& vars, const Valuation& base,
                          const std::function<void(const Valuation&)>& fn) const {
    std::function<void(std::size_t, Valuation&)> go = [&](std::size_t k, Valuation& nu) {
      if (k == vars.size()) {
        fn(nu);
        return;
      }
      for (Position p = 0; p <= range; ++p) {
        nu.overrides[vars[k]] = p;
        go(k + 1, nu);
      }
    };
    Valuation nu = base;
    go(0, nu);
  }
};

LabelSet all_vars(const FoFormula& f) {
  LabelSet out = vdef(f);
  std::function<void(const FoFormula&)> walk = [&](const FoFormula& g) {
    if (g.op() == FoOp::Filter) {
      for (const auto& a : g.atoms()) out = set_union(out, make_label_set(a.vars));
    }
    if (g.op() != FoOp::As) walk(g.left());
    if (g.op() == FoOp::Or || g.op() == FoOp::Seq) walk(g.right());
  };
  walk(f);
  return out;
}

MatchSet brute_force_at(const FoFormula& f, const Stream& s, Position n) {
  BruteForce bf{s, n};
  MatchSet out;
  // Candidate matches: nonempty subsets of 0..n containing n.
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Match m;
    for (Position p = 0; p < n; ++p) {
      if (mask & (1u << p)) m.push_back(p);
    }
    m.push_back(n);
    bool found = false;
    bf.for_each_valuation(all_vars(f), Valuation{}, [&](const Valuation& nu) {
      if (!found) found = bf.member(f, m, 0, n, nu);
    });
    if (found) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string show(const MatchSet& ms) {
  std::string out;
  for (const auto& m : ms) {
    out += "{";
    for (Position p : m) out += std::to_string(p) + (p == m.back() ? "" : ",");
    out += "}";
  }
  return out;
}

FoFormula fo(const std::string& text) { return parse_focel(text, small_schema()); }

}  // namespace

TEST_CASE("FO-CEL atom clause") {
  Stream s{ev("R", 0), ev("T", 1), ev("R", 1)};
  FoFormula f = fo("R AS x");
  Valuation at2;
  at2.overrides[Label("x")] = 2;
  CHECK(eval_focel(f, s, 2, 2, at2) == MatchSet{{2}});
  Valuation at1;
  at1.overrides[Label("x")] = 1;
  CHECK(eval_focel(f, s, 2, 2, at1).empty());
  CHECK(eval_focel_at(f, s, 2) == MatchSet{{2}});
  CHECK(eval_focel_at(f, s, 1).empty());
}

TEST_CASE("FO-CEL print and parse round trip") {
  for (const char* text : {"R AS x FILTER x.v < 0", "(R AS x OR T AS y) FILTER (x.v < 0 AND y.v < 0)",
                           "(R AS x)+ ; T AS y", "(R AS x ; T AS y) FILTER x.v <= y.v"}) {
    FoFormula f = fo(text);
    CHECK(print(fo(print(f))) == print(f));
  }
  CHECK(vdef(fo("(T AS x ; (R AS y)+) FILTER z.v = 1")) == make_label_set({Label("x"), Label("y")}));
  CHECK(vdef_plus(fo("(T AS x ; (R AS y)+) FILTER z.v = 1")) == LabelSet{Label("x")});
}

TEST_CASE("FO-CEL evaluation matches the valuation-by-valuation reading") {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    FoFormula f = random_focel(rng, 3);
    if (all_vars(f).size() > 3) continue;
    ++checked;
    walk_streams(
        alphabet4(), 4,
        [&](const Stream& s) {
          const Position n = static_cast<Position>(s.size()) - 1;
          const MatchSet got = eval_focel_at(f, s, n);
          const MatchSet want = brute_force_at(f, s, n);
          REQUIRE_MESSAGE(got == want, print(f), " on ", describe(s), ": ", show(got), " vs ", show(want));
          return true;
        },
        [] {});
  }
  CHECK(checked >= 10);
  // Global conditions: a filter on a variable the match never binds.
  FoFormula g = fo("(R AS x OR T AS y) FILTER (x.v < 0 AND y.v < 0)");
  Stream s{ev("T", -1), ev("R", 1)};
  CHECK(eval_focel_at(g, s, 1) == brute_force_at(g, s, 1));
}

TEST_CASE("unary translations") {
  CHECK(print(fo_to_so_unary(fo("R AS x FILTER x.v < 0"))) == "R FILTER R.v < 0");
  CHECK(print(fo_to_so_unary(fo("R AS x"))) == "R");
  CHECK(print(so_to_fo_unary(parse("R FILTER R.v < 0", small_schema()))) == "R AS x1 FILTER x1.v < 0");
  CHECK_THROWS_AS(fo_to_so_unary(fo("(R AS x ; T AS y) FILTER x.v <= y.v")), Error);
  CHECK_THROWS_AS(so_to_fo_unary(parse("R : T", small_schema())), Error);

  for (const char* text : {"(R AS x OR T AS y) FILTER (x.v < 0 AND y.v < 0)", "(R AS x ; (T AS y)+) FILTER x.v = 1",
                           "((R AS x FILTER x.v >= 0)+ ; T AS y) FILTER y.type = T"}) {
    FoFormula f = fo(text);
    Formula g = fo_to_so_unary(f);
    walk_streams(
        alphabet4(), 5,
        [&](const Stream& s) {
          const Position n = static_cast<Position>(s.size()) - 1;
          REQUIRE_MESSAGE(eval_focel_at(f, s, n) == supports(eval_at(g, s, n)), text, " on ", describe(s));
          return true;
        },
        [] {});
  }
  for (const char* text : {"(R OR T) FILTER R.v < 0", "(R IN A ; T) FILTER A.v = 1", "R[R -> A] FILTER A.v >= 0",
                           "(R ; T)+ IN B FILTER B.v != 0"}) {
    Formula f = parse(text, small_schema());
    FoFormula g = so_to_fo_unary(f);
    walk_streams(
        alphabet4(), 5,
        [&](const Stream& s) {
          const Position n = static_cast<Position>(s.size()) - 1;
          REQUIRE_MESSAGE(supports(eval_at(f, s, n)) == eval_focel_at(g, s, n), text, " on ", describe(s));
          return true;
        },
        [] {});
  }
}
