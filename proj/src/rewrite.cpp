#include "socel/rewrite.hpp"

#include <algorithm>

#include "socel/error.hpp"

namespace socel {

namespace {

[[noreturn]] void unsupported(const std::string& what, const Formula& at) {
  throw Error(ErrorKind::Unsupported, what + " in '" + print(at) + "'");
}

Formula map_children(const Formula& f, const auto& fn) {
  if (f.op() == Op::Atom) return f;
  if (f.is_binary_op()) return rebuild(f, fn(f.left()), fn(f.right()));
  return rebuild(f, fn(f.child()));
}

Label swap_label(Label l, Label from, Label to) { return l == from ? to : l; }

// Atom with any stack of IN, rename and filter: always a single position.
bool is_unit(const Formula& f) {
  switch (f.op()) {
    case Op::Atom: return true;
    case Op::In:
    case Op::Rename:
    case Op::Filter: return is_unit(f.child());
    default: return false;
  }
}

bool filter_mentions(const Formula& f, Label a) {
  for (const auto& atom : f.atoms()) {
    if (std::find(atom.args.begin(), atom.args.end(), a) != atom.args.end()) return true;
  }
  return false;
}

std::vector<SoAtom> substitute_atoms(const std::vector<SoAtom>& atoms, Label from, Label to) {
  std::vector<SoAtom> out = atoms;
  for (auto& atom : out) {
    for (auto& l : atom.args) l = swap_label(l, from, to);
  }
  return out;
}

std::vector<Label> filter_labels(const Formula& f) {
  std::vector<Label> out;
  for (const auto& atom : f.atoms()) out.insert(out.end(), atom.args.begin(), atom.args.end());
  return make_label_set(std::move(out));
}

}  // namespace

Formula substitute_label(const Formula& f, Label from, Label to) {
  auto rec = [&](const Formula& g) { return substitute_label(g, from, to); };
  switch (f.op()) {
    case Op::Atom: return f.rel() == from ? Formula::rename(f, from, to) : f;
    case Op::In: return Formula::in(rec(f.child()), swap_label(f.label(), from, to));
    case Op::Rename:
      return Formula::rename(rec(f.child()), swap_label(f.label(), from, to), swap_label(f.label_to(), from, to));
    case Op::Filter: return Formula::filter(rec(f.child()), substitute_atoms(f.atoms(), from, to));
    case Op::Project: {
      LabelSet keep;
      for (Label l : f.keep()) keep.push_back(swap_label(l, from, to));
      return Formula::project(make_label_set(std::move(keep)), rec(f.child()));
    }
    default: return map_children(f, rec);
  }
}

bool produces_intervals(const Formula& f) {
  switch (f.op()) {
    case Op::Atom:
    case Op::Strict: return true;
    case Op::In:
    case Op::Rename:
    case Op::Filter:
    case Op::Start:
    case Op::StrictPlus: return produces_intervals(f.child());
    case Op::Or:
    case Op::StrictSeq:
    case Op::And: return produces_intervals(f.left()) && produces_intervals(f.right());
    default: return false;
  }
}

// ---- STRICT elimination ----------------------------------------------------

namespace {

// Formula equivalent to STRICT(f) for a STRICT-free f.
Formula make_strict(const Formula& f) {
  switch (f.op()) {
    case Op::Atom: return f;
    case Op::Seq: return Formula::strict_seq(make_strict(f.left()), make_strict(f.right()));
    case Op::Plus: return Formula::strict_plus(make_strict(f.child()));
    case Op::Strict: return make_strict(f.child());
    case Op::Unless: return Formula::unless(make_strict(f.left()), f.right());
    case Op::Project: unsupported("STRICT over PROJECT cannot be pushed down", f);
    case Op::All: unsupported("STRICT over ALL cannot be pushed down", f);
    default: return map_children(f, make_strict);
  }
}

}  // namespace

Formula strict_to_contiguous(const Formula& f) {
  // Measure: number of STRICT nodes; each visit removes one.
  if (f.op() == Op::Strict) return make_strict(strict_to_contiguous(f.child()));
  return map_children(f, strict_to_contiguous);
}

// ---- label pushdown ----------------------------------------------------------

namespace {

Formula push_in(const Formula& f, Label a) {
  if (is_unit(f)) return Formula::in(f, a);
  switch (f.op()) {
    case Op::Seq:
    case Op::StrictSeq:
    case Op::Or: return Formula::binary(f.op(), push_in(f.left(), a), push_in(f.right(), a));
    case Op::Plus:
    case Op::StrictPlus:
    case Op::Strict:
    case Op::Start: return Formula::unary(f.op(), push_in(f.child(), a));
    case Op::Unless: return Formula::unless(push_in(f.left(), a), f.right());
    case Op::In: {
      Formula inner = push_in(f.child(), f.label());
      // A label that stayed above PROJECT, AND or ALL stays there.
      if (inner.op() == Op::In) return Formula::in(inner, a);
      return push_in(inner, a);
    }
    case Op::Filter: {
      if (!filter_mentions(f, a)) return Formula::filter(push_in(f.child(), a), f.atoms());
      Label fresh = Label::fresh();
      Formula body = push_in(substitute_label(f.child(), a, fresh), a);
      return Formula::rename(Formula::filter(body, substitute_atoms(f.atoms(), a, fresh)), fresh, a);
    }
    case Op::Rename: {
      Label from = f.label(), to = f.label_to();
      if (a != from && a != to) return Formula::rename(push_in(f.child(), a), from, to);
      Label fresh = Label::fresh();
      return Formula::rename(push_in(substitute_label(f.child(), from, fresh), a), fresh, to);
    }
    default: return Formula::in(f, a);  // PROJECT, AND, ALL keep the label above
  }
}

}  // namespace

Formula push_labels_down(const Formula& f) {
  if (f.op() == Op::In) return push_in(push_labels_down(f.child()), f.label());
  return map_children(f, push_labels_down);
}

// ---- ':' elimination --------------------------------------------------------

namespace {

bool blocks_junction(Op op) {
  return op == Op::Project || op == Op::And || op == Op::All || op == Op::Unless || op == Op::StrictPlus;
}

// Formula equivalent to a : b, for ':'-free a and b with labels pushed down.
// Each case recurses on a strictly smaller non-interval operand.
Formula junction(const Formula& a, const Formula& b) {
  if (produces_intervals(a) && produces_intervals(b)) return Formula::strict(Formula::seq(a, b));
  if (!produces_intervals(a)) {
    switch (a.op()) {
      case Op::Seq: return Formula::seq(a.left(), junction(a.right(), b));
      case Op::Or: return Formula::or_(junction(a.left(), b), junction(a.right(), b));
      case Op::Plus: {
        Formula last = junction(a.child(), b);
        return Formula::or_(last, Formula::seq(a, last));
      }
      case Op::Start: return Formula::start(junction(a.child(), b));
      case Op::Filter: {
        Formula other = b;
        std::vector<std::pair<Label, Label>> back;
        for (Label l : filter_labels(a)) {
          Label fresh = Label::fresh();
          other = substitute_label(other, l, fresh);
          back.emplace_back(fresh, l);
        }
        Formula out = Formula::filter(junction(a.child(), other), a.atoms());
        for (const auto& [fresh, l] : back) out = Formula::rename(out, fresh, l);
        return out;
      }
      case Op::Rename: {
        if (a.label() == a.label_to()) return junction(a.child(), b);
        Label fresh = Label::fresh();
        Formula out = junction(a.child(), substitute_label(b, a.label(), fresh));
        return Formula::rename(Formula::rename(out, a.label(), a.label_to()), fresh, a.label());
      }
      default: break;
    }
    if (blocks_junction(a.op()) || a.op() == Op::In) unsupported("':' cannot be eliminated over " + std::string(op_name(a.op())), a);
  }
  switch (b.op()) {
    case Op::Seq: return Formula::seq(junction(a, b.left()), b.right());
    case Op::Or: return Formula::or_(junction(a, b.left()), junction(a, b.right()));
    case Op::Plus: {
      Formula first = junction(a, b.child());
      return Formula::or_(first, Formula::seq(first, b));
    }
    // The right operand's window opens at its first position anyway.
    case Op::Start: return junction(a, b.child());
    case Op::Filter: {
      Formula other = a;
      std::vector<std::pair<Label, Label>> back;
      for (Label l : filter_labels(b)) {
        Label fresh = Label::fresh();
        other = substitute_label(other, l, fresh);
        back.emplace_back(fresh, l);
      }
      Formula out = Formula::filter(junction(other, b.child()), b.atoms());
      for (const auto& [fresh, l] : back) out = Formula::rename(out, fresh, l);
      return out;
    }
    case Op::Rename: {
      if (b.label() == b.label_to()) return junction(a, b.child());
      Label fresh = Label::fresh();
      Formula out = junction(substitute_label(a, b.label(), fresh), b.child());
      return Formula::rename(Formula::rename(out, b.label(), b.label_to()), fresh, b.label());
    }
    default: break;
  }
  unsupported("':' cannot be eliminated over " + std::string(op_name(b.op())), b);
}

Formula remove_junctions(const Formula& f) {
  if (f.op() == Op::StrictPlus) unsupported("'(+)' is outside the ':'-elimination fragment", f);
  if (f.op() == Op::StrictSeq) return junction(remove_junctions(f.left()), remove_junctions(f.right()));
  return map_children(f, remove_junctions);
}

}  // namespace

Formula contiguous_seq_to_strict(const Formula& f) {
  if (contains_op(f, Op::StrictPlus)) unsupported("'(+)' is outside the ':'-elimination fragment", f);
  return remove_junctions(push_labels_down(f));
}

// ---- unary '(+)' elimination ------------------------------------------------

namespace {

// x ; y iterated with adjacent rounds: x ; (y OR ((y : x)+ ; y)).
Formula seq_rounds(const Formula& x, const Formula& y) {
  return Formula::seq(x, Formula::or_(y, Formula::seq(Formula::plus(Formula::strict_seq(y, x)), y)));
}

void flatten_or(const Formula& f, std::vector<Formula>& out) {
  if (f.op() == Op::Or) {
    flatten_or(f.left(), out);
    flatten_or(f.right(), out);
  } else {
    out.push_back(f);
  }
}

Formula or_all(const std::vector<Formula>& parts) {
  Formula out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out = Formula::or_(out, parts[i]);
  return out;
}

Formula rounds(const Formula& f);

// (rest OR (r1 ; r2))(+), splitting the iterations into maximal blocks of
// rest-rounds (A) and sequence-rounds (B) that alternate.
Formula rounds_with_sequence(const Formula& rest, const Formula& r1, const Formula& r2) {
  Formula a = rounds(rest);
  Formula tail = Formula::or_(r2, Formula::seq(Formula::plus(Formula::strict_seq(r2, r1)), r2));
  Formula b = Formula::seq(r1, tail);
  Formula ab = seq_rounds(Formula::strict_seq(a, r1), tail);  // (A : B)(+)
  Formula ba = seq_rounds(r1, Formula::strict_seq(tail, a));  // (B : A)(+)
  return or_all({a, b, ab, Formula::strict_seq(a, ba), ba, Formula::strict_seq(b, ab)});
}

// Formula equivalent to f(+), for ':'-free, '(+)'-free f with unary filters
// and labels pushed down. Measure: size of the non-interval disjunct.
Formula rounds(const Formula& f) {
  if (produces_intervals(f)) return Formula::strict(Formula::plus(f));
  switch (f.op()) {
    case Op::In:
    case Op::Rename:
    case Op::Start: return rebuild(f, rounds(f.child()));
    case Op::Filter:
      for (const auto& atom : f.atoms()) {
        if (!atom.pred.is_unary_ext()) unsupported("'(+)' elimination needs unary filters", f);
      }
      return rebuild(f, rounds(f.child()));
    case Op::Seq: return seq_rounds(f.left(), f.right());
    case Op::Plus: return f;
    case Op::Or: {
      std::vector<Formula> parts;
      flatten_or(f, parts);
      auto it = std::find_if(parts.begin(), parts.end(), [](const Formula& p) { return !produces_intervals(p); });
      Formula rho = *it;
      parts.erase(it);
      Formula rest = or_all(parts);
      switch (rho.op()) {
        case Op::Seq: return rounds_with_sequence(rest, rho.left(), rho.right());
        case Op::Plus: return rounds_with_sequence(Formula::or_(rest, rho.child()), rho.child(), rho);
        case Op::Filter: {
          if (rho.atoms().size() != 1 || !rho.atoms()[0].pred.is_unary_ext()) {
            unsupported("'(+)' elimination needs single unary filters", rho);
          }
          Label a = rho.atoms()[0].args[0];
          Label fresh = Label::fresh();
          Formula inner = rounds(Formula::or_(rest, substitute_label(rho.child(), a, fresh)));
          return Formula::rename(Formula::filter(inner, substitute_atoms(rho.atoms(), a, fresh)), fresh, a);
        }
        case Op::Rename: {
          Label fresh = Label::fresh();
          Formula inner = rounds(Formula::or_(rest, substitute_label(rho.child(), rho.label(), fresh)));
          return Formula::rename(inner, fresh, rho.label_to());
        }
        default: unsupported("'(+)' elimination does not cover " + std::string(op_name(rho.op())) + " under OR", rho);
      }
    }
    default: unsupported("'(+)' elimination does not cover " + std::string(op_name(f.op())), f);
  }
}

Formula remove_rounds(const Formula& f) {
  if (f.op() == Op::StrictPlus) {
    Formula body = contiguous_seq_to_strict(remove_rounds(f.child()));
    return rounds(body);
  }
  return map_children(f, remove_rounds);
}

}  // namespace

Formula unary_strictplus_eliminate(const Formula& f) {
  if (!has_only_unary_filters(f)) unsupported("'(+)' elimination needs unary filters", f);
  return contiguous_seq_to_strict(remove_rounds(desugar_conjunctive_filter(f)));
}

}  // namespace socel
