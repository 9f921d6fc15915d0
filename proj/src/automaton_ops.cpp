#include <algorithm>
#include <map>
#include <set>

#include "socel/automaton.hpp"
#include "socel/error.hpp"

namespace socel {

namespace {

// Satisfiable-looking sign combinations of the guards; bit i of the mask set
// means guards[i] holds. A positive relation test makes negated tests of other
// relations redundant, so those are left out of the built predicate.
std::vector<std::pair<Pred, std::uint64_t>> minterm_table(const std::vector<Pred>& guards) {
  if (guards.size() > kMintermCap) {
    throw Error(ErrorKind::Capacity, "minterm construction over " + std::to_string(guards.size()) +
                                         " predicates exceeds the limit of " + std::to_string(kMintermCap));
  }
  std::vector<std::pair<Pred, std::uint64_t>> out;
  const std::size_t k = guards.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::vector<Pred> pos, neg;
    std::optional<Label> type;
    for (std::size_t i = 0; i < k; ++i) {
      if ((mask >> i) & 1) {
        pos.push_back(guards[i]);
        if (guards[i].kind() == Pred::Kind::TypeIs) type = guards[i].rel();
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      if ((mask >> i) & 1) continue;
      if (type && guards[i].kind() == Pred::Kind::TypeIs && guards[i].rel() != *type) continue;
      neg.push_back(Pred::negate(guards[i]));
    }
    std::vector<Pred> parts = pos;
    parts.insert(parts.end(), neg.begin(), neg.end());
    Pred g = Pred::all_of(std::move(parts));
    if (provably_unsat(g)) continue;
    out.emplace_back(std::move(g), mask);
  }
  return out;
}

void add_distinct(std::vector<Pred>& v, const Pred& p) {
  if (p.is_true()) return;
  if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(p);
}

std::size_t index_of(const std::vector<Pred>& v, const Pred& p) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), p) - v.begin());
}

bool fires(const Pred& g, const std::vector<Pred>& guards, std::uint64_t mask) {
  if (g.is_true()) return true;
  return (mask >> index_of(guards, g)) & 1;
}

}  // namespace

Ucea union_of(const Ucea& a1, const Ucea& a2) {
  Ucea out = a1;
  if (!out.names.empty() || !a2.names.empty()) {
    out.names.clear();
    for (int q = 0; q < a1.num_states; ++q) out.names.push_back(a1.state_name(q));
    for (int q = 0; q < a2.num_states; ++q) out.names.push_back(a2.state_name(q) + "'");
  }
  const int off = a1.num_states;
  out.num_states += a2.num_states;
  for (const auto& t : a2.delta) out.add(t.from + off, t.guard, t.labels, t.to + off);
  for (int q : a2.initial) out.set_initial(q + off);
  for (int q : a2.final_states) out.set_final(q + off);
  return out;
}

Ucea product_and(const Ucea& a1, const Ucea& a2) {
  Ucea out;
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> work;
  auto state = [&](int p, int q) {
    auto [it, fresh] = index.emplace(std::make_pair(p, q), out.num_states);
    if (fresh) {
      out.add_state();
      work.emplace_back(p, q);
      if (a1.is_final(p) && a2.is_final(q)) out.set_final(it->second);
    }
    return it->second;
  };
  for (int p : a1.initial) {
    for (int q : a2.initial) out.set_initial(state(p, q));
  }
  auto out1 = a1.outgoing();
  auto out2 = a2.outgoing();
  while (!work.empty()) {
    auto [p, q] = work.back();
    work.pop_back();
    int from = index[{p, q}];
    for (int i : out1[static_cast<std::size_t>(p)]) {
      const Transition& t1 = a1.delta[static_cast<std::size_t>(i)];
      for (int j : out2[static_cast<std::size_t>(q)]) {
        const Transition& t2 = a2.delta[static_cast<std::size_t>(j)];
        if (t1.labels != t2.labels) continue;
        Pred g = conjoin(t1.guard, t2.guard);
        if (provably_unsat(g)) continue;
        int to = state(t1.to, t2.to);
        out.add(from, g, t1.labels, to);
      }
    }
  }
  return trim(out);
}

namespace {

// Status of one side in the ALL product.
constexpr int kWaiting = -1;  // window not opened yet
constexpr int kDone = -2;     // accepted earlier, now idle

struct Move {
  Pred guard;
  LabelSet labels;
  int to;
};

std::vector<Move> side_moves(const Ucea& a, const std::vector<std::vector<int>>& out, int status) {
  std::vector<Move> moves;
  auto take = [&](int q) {
    for (int i : out[static_cast<std::size_t>(q)]) {
      const Transition& t = a.delta[static_cast<std::size_t>(i)];
      moves.push_back({t.guard, t.labels, t.to});
    }
  };
  if (status == kWaiting) {
    moves.push_back({Pred::truth(), {}, kWaiting});
    for (int q : a.initial) take(q);
  } else if (status == kDone) {
    moves.push_back({Pred::truth(), {}, kDone});
  } else {
    take(status);
    if (a.is_final(status)) moves.push_back({Pred::truth(), {}, kDone});
  }
  return moves;
}

}  // namespace

Ucea product_all(const Ucea& a1, const Ucea& a2) {
  Ucea out;
  const int start = out.add_state();
  out.set_initial(start);
  std::map<std::pair<int, int>, int> index;
  std::vector<std::pair<int, int>> work;
  auto accepting = [](const Ucea& a, int s) { return s == kDone || (s >= 0 && a.is_final(s)); };
  auto state = [&](int s1, int s2) {
    auto [it, fresh] = index.emplace(std::make_pair(s1, s2), out.num_states);
    if (fresh) {
      out.add_state();
      work.emplace_back(s1, s2);
      if (accepting(a1, s1) && accepting(a2, s2)) out.set_final(it->second);
    }
    return it->second;
  };
  auto out1 = a1.outgoing();
  auto out2 = a2.outgoing();
  auto expand = [&](int from, int s1, int s2, bool opening) {
    for (const auto& m1 : side_moves(a1, out1, s1)) {
      for (const auto& m2 : side_moves(a2, out2, s2)) {
        if (m1.to == kDone && m2.to == kDone) continue;
        // The first event of the window must start at least one side.
        if (opening && m1.to == kWaiting && m2.to == kWaiting) continue;
        Pred g = conjoin(m1.guard, m2.guard);
        if (provably_unsat(g)) continue;
        out.add(from, g, set_union(m1.labels, m2.labels), state(m1.to, m2.to));
      }
    }
  };
  expand(start, kWaiting, kWaiting, true);
  while (!work.empty()) {
    auto [s1, s2] = work.back();
    work.pop_back();
    expand(index[{s1, s2}], s1, s2, false);
  }
  return trim(out);
}

Ucea unless_monitor(const Ucea& a1, const Ucea& a2_in) {
  const Ucea a2 = trim(a2_in);
  auto out1 = a1.outgoing();
  auto out2 = a2.outgoing();
  Ucea out;
  std::map<std::pair<int, std::vector<int>>, int> index;
  std::vector<std::pair<int, std::vector<int>>> work;
  auto state = [&](int q, std::vector<int> m) {
    auto [it, fresh] = index.emplace(std::make_pair(q, m), out.num_states);
    if (fresh) {
      out.add_state();
      if (a1.is_final(q)) out.set_final(it->second);
      work.emplace_back(q, std::move(m));
    }
    return it->second;
  };
  for (int q : a1.initial) out.set_initial(state(q, {}));
  while (!work.empty()) {
    auto [q, m] = work.back();
    work.pop_back();
    const int from = index[{q, m}];
    // Every position may open a new window of the second automaton.
    std::set<int> live(m.begin(), m.end());
    live.insert(a2.initial.begin(), a2.initial.end());
    std::vector<const Transition*> watched;
    std::vector<Pred> guards;
    for (int p : live) {
      for (int i : out2[static_cast<std::size_t>(p)]) {
        watched.push_back(&a2.delta[static_cast<std::size_t>(i)]);
        add_distinct(guards, watched.back()->guard);
      }
    }
    const auto table = minterm_table(guards);
    for (int i : out1[static_cast<std::size_t>(q)]) {
      const Transition& t1 = a1.delta[static_cast<std::size_t>(i)];
      for (const auto& [mg, mask] : table) {
        std::vector<int> next;
        bool hit = false;
        for (const Transition* t : watched) {
          if (!fires(t->guard, guards, mask)) continue;
          next.push_back(t->to);
          if (a2.is_final(t->to)) hit = true;
        }
        if (hit) continue;
        Pred g = conjoin(t1.guard, mg);
        if (provably_unsat(g)) continue;
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        out.add(from, g, t1.labels, state(t1.to, std::move(next)));
      }
    }
  }
  return trim(out);
}

Ucea io_determinize(const Ucea& a) {
  auto outs = a.outgoing();
  Ucea out;
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> work;
  auto state = [&](std::vector<int> s) {
    auto [it, fresh] = index.emplace(s, out.num_states);
    if (fresh) {
      out.add_state();
      if (std::any_of(s.begin(), s.end(), [&](int q) { return a.is_final(q); })) out.set_final(it->second);
      work.push_back(std::move(s));
    }
    return it->second;
  };
  out.set_initial(state(a.initial));
  while (!work.empty()) {
    std::vector<int> s = std::move(work.back());
    work.pop_back();
    const int from = index[s];
    std::map<LabelSet, std::vector<const Transition*>> by_labels;
    for (int q : s) {
      for (int i : outs[static_cast<std::size_t>(q)]) {
        const Transition& t = a.delta[static_cast<std::size_t>(i)];
        by_labels[t.labels].push_back(&t);
      }
    }
    for (const auto& [labels, ts] : by_labels) {
      std::vector<Pred> guards;
      for (const Transition* t : ts) add_distinct(guards, t->guard);
      for (const auto& [g, mask] : minterm_table(guards)) {
        std::vector<int> target;
        for (const Transition* t : ts) {
          if (fires(t->guard, guards, mask)) target.push_back(t->to);
        }
        if (target.empty()) continue;
        std::sort(target.begin(), target.end());
        target.erase(std::unique(target.begin(), target.end()), target.end());
        out.add(from, g, labels, state(std::move(target)));
      }
    }
  }
  return trim(out);
}

Ucea drop_empty_transitions(const Ucea& a) {
  Ucea out = a;
  out.delta.clear();
  for (const auto& t : a.delta) {
    if (!t.labels.empty()) out.delta.push_back(t);
  }
  return out;
}

std::optional<std::pair<int, int>> find_nondeterminism(const Ucea& a) {
  if (a.initial.size() > 1) return std::make_pair(-1, -1);
  auto outs = a.outgoing();
  for (const auto& ts : outs) {
    for (std::size_t x = 0; x < ts.size(); ++x) {
      for (std::size_t y = x + 1; y < ts.size(); ++y) {
        const Transition& t1 = a.delta[static_cast<std::size_t>(ts[x])];
        const Transition& t2 = a.delta[static_cast<std::size_t>(ts[y])];
        if (t1.labels == t2.labels && !provably_disjoint(t1.guard, t2.guard)) return std::make_pair(ts[x], ts[y]);
      }
    }
  }
  return std::nullopt;
}

// ---- *-property search -----------------------------------------------

namespace {

class OutputCache {
 public:
  OutputCache(const Ucea& a, const std::vector<Event>& alphabet) : a_(a), alphabet_(alphabet) {}

  // Union over all n of the automaton's outputs on the stream.
  const CeSet& produced(const std::vector<int>& word) {
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
    RunSimulator sim(a_);
    CeSet all;
    for (int x : word) {
      sim.push(alphabet_[static_cast<std::size_t>(x)]);
      CeSet at = sim.accepted();
      all.insert(all.end(), at.begin(), at.end());
    }
    normalize(all);
    return cache_.emplace(word, std::move(all)).first->second;
  }

 private:
  const Ucea& a_;
  const std::vector<Event>& alphabet_;
  std::map<std::vector<int>, CeSet> cache_;
};

Stream to_stream(const std::vector<int>& word, const std::vector<Event>& alphabet) {
  Stream s;
  for (int x : word) s.push_back(alphabet[static_cast<std::size_t>(x)]);
  return s;
}

ComplexEvent shift_from(const ComplexEvent& c, Position at, Position delta) {
  std::vector<Mark> marks;
  for (const auto& m : c.marks()) marks.push_back({m.pos >= at ? m.pos + delta : m.pos, m.label});
  return ComplexEvent(std::move(marks));
}

}  // namespace

std::optional<StarCounterexample> check_star_property(const Ucea& a, std::size_t bound,
                                                      const std::vector<Event>& alphabet) {
  if (alphabet.empty() || bound == 0) return std::nullopt;
  OutputCache cache(a, alphabet);
  const int m = static_cast<int>(alphabet.size());
  for (std::size_t len = 1; len <= bound; ++len) {
    std::vector<int> word(len, 0);
    while (true) {
      RunSimulator sim(a);
      for (std::size_t n = 0; n < len; ++n) {
        sim.push(alphabet[static_cast<std::size_t>(word[n])]);
        for (const auto& c : sim.accepted()) {
          auto support = c.support();
          auto marked = [&](Position p) { return std::binary_search(support.begin(), support.end(), p); };
          auto check = [&](const std::vector<int>& w2, const ComplexEvent& c2) -> std::optional<StarCounterexample> {
            if (w2.empty() || ce_set_contains(cache.produced(w2), c2)) return std::nullopt;
            return StarCounterexample{to_stream(word, alphabet), c, to_stream(w2, alphabet), c2};
          };
          for (std::size_t gap = 0; gap <= len; ++gap) {
            for (int x = 0; x < m; ++x) {
              std::vector<int> w2 = word;
              w2.insert(w2.begin() + static_cast<std::ptrdiff_t>(gap), x);
              if (auto cex = check(w2, shift_from(c, static_cast<Position>(gap), 1))) return cex;
            }
          }
          for (std::size_t d = 0; d < len; ++d) {
            if (marked(static_cast<Position>(d))) continue;
            std::vector<int> w2 = word;
            w2.erase(w2.begin() + static_cast<std::ptrdiff_t>(d));
            if (auto cex = check(w2, shift_from(c, static_cast<Position>(d) + 1, -1))) return cex;
            for (int x = 0; x < m; ++x) {
              if (x == word[d]) continue;
              std::vector<int> w3 = word;
              w3[d] = x;
              if (auto cex = check(w3, c)) return cex;
            }
          }
        }
      }
      std::size_t i = 0;
      while (i < len && ++word[i] == m) word[i++] = 0;
      if (i == len) break;
    }
  }
  return std::nullopt;
}

}  // namespace socel
