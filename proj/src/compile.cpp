#include "socel/compile.hpp"

#include "socel/error.hpp"
#include "socel/rewrite.hpp"

namespace socel {

namespace {

[[noreturn]] void unsupported(const std::string& what) { throw Error(ErrorKind::Unsupported, what); }

// Copies states and transitions of src into dst; returns the state offset.
int append(Ucea& dst, const Ucea& src) {
  const int offset = dst.num_states;
  for (int q = 0; q < src.num_states; ++q) dst.add_state();
  for (const auto& t : src.delta) dst.add(t.from + offset, t.guard, t.labels, t.to + offset);
  return offset;
}

Ucea compile_atom(Label rel, Semantics mode) {
  Ucea a;
  const int q0 = a.add_state();
  const int q1 = a.add_state();
  if (mode == Semantics::Standard) a.add(q0, Pred::truth(), {}, q0);
  a.add(q0, Pred::type_is(rel), {rel}, q1);
  a.set_initial(q0);
  a.set_final(q1);
  return a;
}

Ucea map_labels(Ucea a, const auto& fn) {
  for (auto& t : a.delta) {
    if (!t.labels.empty()) t.labels = fn(t.labels);
  }
  return a;
}

Ucea compile_filter(Ucea a, const Formula& f) {
  for (const auto& atom : f.atoms()) {
    if (!atom.pred.is_unary_ext()) {
      unsupported("filter '" + print_atom(atom) +
                  "' is not a unary universal extension; the automaton compiler accepts only predicates "
                  "checked event by event");
    }
    const Label target = atom.args.at(0);
    for (auto& t : a.delta) {
      if (contains(t.labels, target)) t.guard = conjoin(t.guard, atom.pred.pred());
    }
  }
  return a;
}

Ucea compile_seq(const Ucea& a1, const Ucea& a2) {
  Ucea r;
  const int o1 = append(r, a1);
  const int o2 = append(r, a2);
  for (const auto& t : a1.delta) {
    if (!a1.is_final(t.to)) continue;
    for (int q : a2.initial) r.add(t.from + o1, t.guard, t.labels, q + o2);
  }
  for (int q : a1.initial) r.set_initial(q + o1);
  for (int q : a2.final_states) r.set_final(q + o2);
  return r;
}

Ucea compile_plus(const Ucea& a) {
  Ucea r = a;
  // Iterate over the original transitions only, so copies never feed copies.
  for (const auto& t : a.delta) {
    if (!a.is_final(t.to)) continue;
    for (int q : a.initial) r.add(t.from, t.guard, t.labels, q);
  }
  return r;
}

// Adjacent sequencing through one extra state: the left side must mark its
// last position and the right side its first.
Ucea compile_strict_seq(const Ucea& a1, const Ucea& a2) {
  Ucea r;
  const int o1 = append(r, a1);
  const int o2 = append(r, a2);
  const int mid = r.add_state();
  for (const auto& t : a1.delta) {
    if (a1.is_final(t.to) && !t.labels.empty()) r.add(t.from + o1, t.guard, t.labels, mid);
  }
  for (const auto& t : a2.delta) {
    if (a2.is_initial(t.from) && !t.labels.empty()) r.add(mid, t.guard, t.labels, t.to + o2);
  }
  for (int q : a1.initial) r.set_initial(q + o1);
  for (int q : a2.final_states) r.set_final(q + o2);
  return r;
}

Ucea compile_strict_plus(const Ucea& a) {
  Ucea r = a;
  const int mid = r.add_state();
  for (const auto& t : a.delta) {
    if (a.is_final(t.to) && !t.labels.empty()) r.add(t.from, t.guard, t.labels, mid);
    if (a.is_initial(t.from) && !t.labels.empty()) r.add(mid, t.guard, t.labels, t.to);
    // A one-transition round between two junctions.
    if (a.is_initial(t.from) && a.is_final(t.to) && !t.labels.empty()) r.add(mid, t.guard, t.labels, mid);
  }
  return r;
}

Ucea compile_start(const Ucea& a) {
  Ucea r = a;
  r.initial.clear();
  const int s = r.add_state();
  for (const auto& t : a.delta) {
    if (a.is_initial(t.from) && !t.labels.empty()) r.add(s, t.guard, t.labels, t.to);
  }
  r.set_initial(s);
  return r;
}

Ucea build(const Formula& f, const CompileOptions& opts) {
  const Semantics mode = opts.semantics;
  auto rec = [&](const Formula& g) { return build(g, opts); };
  if (mode == Semantics::Star) {
    switch (f.op()) {
      case Op::Atom:
      case Op::In:
      case Op::Rename:
      case Op::Filter:
      case Op::Or:
      case Op::Seq:
      case Op::Plus: break;
      default: unsupported(std::string("star-semantics compilation accepts core operators only; found ") + op_name(f.op()));
    }
  }
  switch (f.op()) {
    case Op::Atom: return compile_atom(f.rel(), mode);
    case Op::In: {
      const Label a = f.label();
      return map_labels(rec(f.child()), [a](const LabelSet& l) { return set_union(l, {a}); });
    }
    case Op::Rename: {
      const Label from = f.label(), to = f.label_to();
      return map_labels(rec(f.child()), [from, to](const LabelSet& l) {
        LabelSet out;
        for (Label x : l) out.push_back(x == from ? to : x);
        return make_label_set(std::move(out));
      });
    }
    case Op::Filter: return compile_filter(rec(f.child()), f);
    case Op::Or: return union_of(rec(f.left()), rec(f.right()));
    case Op::Seq: return compile_seq(rec(f.left()), rec(f.right()));
    case Op::Plus: return compile_plus(rec(f.child()));
    case Op::StrictSeq: return compile_strict_seq(rec(f.left()), rec(f.right()));
    case Op::StrictPlus: return compile_strict_plus(rec(f.child()));
    case Op::Start: return compile_start(rec(f.child()));
    case Op::Project: {
      const LabelSet keep = f.keep();
      Ucea a = rec(f.child());
      for (auto& t : a.delta) t.labels = set_intersection(t.labels, keep);
      return a;
    }
    case Op::Strict: return rec(strict_to_contiguous(f));
    case Op::And:
    case Op::All:
    case Op::Unless: {
      if (opts.binary == BinaryStrategy::Reject) {
        unsupported(std::string(op_name(f.op())) + " is disabled by the compile options");
      }
      Ucea a1 = trim(rec(f.left()));
      Ucea a2 = trim(rec(f.right()));
      if (f.op() == Op::And) return product_and(a1, a2);
      if (f.op() == Op::All) return product_all(a1, a2);
      return unless_monitor(a1, a2);
    }
  }
  unsupported("unknown operator");
}

void reject_unless(const Formula& f) {
  if (contains_op(f, Op::Unless)) {
    throw Error(ErrorKind::Unsupported, "UNLESS cannot be expressed without UNLESS; and_all_eliminate rejects it");
  }
}

}  // namespace

Ucea compile(const Formula& f, const CompileOptions& opts) { return trim(build(f, opts)); }

Ucea compile_binary(const Formula& f, const CompileOptions& opts) {
  if (f.op() != Op::And && f.op() != Op::All && f.op() != Op::Unless) {
    throw Error(ErrorKind::Precondition, "compile_binary expects AND, ALL or UNLESS at the top");
  }
  if (opts.binary != BinaryStrategy::ViaProduct) {
    throw Error(ErrorKind::Precondition, "compile_binary needs the product strategy");
  }
  CompileOptions standard = opts;
  standard.semantics = Semantics::Standard;
  return compile(f, standard);
}

Formula and_all_eliminate(const Formula& f, const Schema& schema) {
  reject_unless(f);
  if (f.op() != Op::And && f.op() != Op::All) {
    throw Error(ErrorKind::Precondition, "and_all_eliminate expects AND or ALL at the top");
  }
  for (Op op : {Op::StrictSeq, Op::StrictPlus, Op::Project, Op::Start, Op::Strict}) {
    if (contains_op(f, op)) {
      throw Error(ErrorKind::Unsupported,
                  std::string("and_all_eliminate expects core operands; found ") + op_name(op));
    }
  }
  Ucea a = drop_empty_transitions(compile(f));
  return state_eliminate_to_formula(a, Semantics::Star, schema);
}

}  // namespace socel
