#include <algorithm>
#include <map>

#include "socel/automaton.hpp"
#include "socel/error.hpp"

namespace socel {

namespace {

using Maybe = std::optional<Formula>;  // nullopt stands for FALSE

Maybe or_opt(const Maybe& a, const Maybe& b) {
  if (!a) return b;
  if (!b) return a;
  return Formula::or_(*a, *b);
}

Maybe join_opt(Semantics mode, const Maybe& a, const Maybe& b) {
  if (!a || !b) return std::nullopt;
  return mode == Semantics::Star ? Formula::seq(*a, *b) : Formula::strict_seq(*a, *b);
}

std::vector<Label> relations_by_name(const Schema& schema) {
  std::vector<Label> rels;
  for (const auto& name : schema.relation_names()) rels.push_back(Label(name));
  return rels;
}

std::vector<Label> by_name(const LabelSet& labels) {
  std::vector<Label> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end(), LabelNameLess());
  return out;
}

// One event satisfying the guard, assigned the given labels.
Maybe single_event(const Pred& guard, const LabelSet& labels, Semantics mode, const std::vector<Label>& rels) {
  const std::vector<Label> ordered = by_name(labels);
  Maybe body;
  for (Label r : rels) {
    Pred p = guard.specialize_type(r).simplified();
    if (p.is_false()) continue;
    Formula f = Formula::atom(r);
    if (!p.is_true()) f = Formula::filter(f, SoAtom{SoPred::univ(p), {r}});
    if (mode == Semantics::Star && ordered.front() != r) f = Formula::rename(f, r, ordered.front());
    body = or_opt(body, f);
  }
  if (!body) return std::nullopt;
  Formula f = *body;
  for (std::size_t i = mode == Semantics::Star ? 1 : 0; i < ordered.size(); ++i) f = Formula::in(f, ordered[i]);
  return f;
}

}  // namespace

Formula false_formula(const Schema& schema) {
  auto rels = relations_by_name(schema);
  if (rels.empty()) throw Error(ErrorKind::Precondition, "schema has no relations");
  return Formula::filter(Formula::atom(rels[0]), SoAtom{SoPred::univ(Pred::falsity()), {rels[0]}});
}

Formula state_eliminate_to_formula(const Ucea& a_in, Semantics mode, const Schema& schema) {
  const std::vector<Label> rels = relations_by_name(schema);
  if (rels.empty()) throw Error(ErrorKind::Precondition, "schema has no relations");
  if (mode == Semantics::Star) {
    for (const auto& t : a_in.delta) {
      if (t.labels.empty()) {
        throw Error(ErrorKind::Precondition,
                    "star-mode state elimination needs nonempty label sets on every transition; "
                    "drop empty transitions first");
      }
    }
  }
  Ucea a = trim(a_in);

  // Standard mode marks every consumed position with its relation name and
  // projects those marks away at the end, so automaton labels that coincide
  // with relation names travel under fresh names.
  std::map<Label, Label> aliases;
  LabelSet kept;
  if (mode == Semantics::Standard) {
    for (Label l : a.labels()) {
      if (std::find(rels.begin(), rels.end(), l) != rels.end()) {
        aliases.emplace(l, Label::fresh());
      }
    }
    for (auto& t : a.delta) {
      LabelSet renamed;
      for (Label l : t.labels) {
        auto it = aliases.find(l);
        renamed.push_back(it == aliases.end() ? l : it->second);
      }
      t.labels = make_label_set(std::move(renamed));
    }
    kept = a.labels();
  }

  const auto n = static_cast<std::size_t>(a.num_states);
  std::vector<std::vector<Maybe>> phi(n, std::vector<Maybe>(n));
  for (const auto& t : a.delta) {
    auto& cell = phi[static_cast<std::size_t>(t.from)][static_cast<std::size_t>(t.to)];
    cell = or_opt(cell, single_event(t.guard, t.labels, mode, rels));
  }
  for (std::size_t k = 0; k < n; ++k) {
    Maybe loop;
    if (phi[k][k]) loop = mode == Semantics::Star ? Formula::plus(*phi[k][k]) : Formula::strict_plus(*phi[k][k]);
    std::vector<std::vector<Maybe>> next = phi;
    for (std::size_t i = 0; i < n; ++i) {
      if (!phi[i][k]) continue;
      Maybe into = phi[i][k];
      Maybe into_loop = join_opt(mode, into, loop);
      for (std::size_t j = 0; j < n; ++j) {
        if (!phi[k][j]) continue;
        next[i][j] = or_opt(next[i][j], join_opt(mode, into, phi[k][j]));
        next[i][j] = or_opt(next[i][j], join_opt(mode, into_loop, phi[k][j]));
      }
    }
    phi = std::move(next);
  }

  Maybe result;
  for (int i : a.initial) {
    for (int f : a.final_states) result = or_opt(result, phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)]);
  }
  if (!result) return false_formula(schema);
  if (mode == Semantics::Star) return *result;

  Formula f = Formula::project(kept, Formula::start(*result));
  for (const auto& [original, alias] : aliases) f = Formula::rename(f, alias, original);
  return f;
}

}  // namespace socel
