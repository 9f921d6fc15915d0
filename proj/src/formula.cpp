#include "socel/formula.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "lexer.hpp"
#include "socel/error.hpp"

namespace socel {

const char* op_name(Op op) {
  switch (op) {
    case Op::Atom: return "atom";
    case Op::In: return "IN";
    case Op::Rename: return "rename";
    case Op::Filter: return "FILTER";
    case Op::Or: return "OR";
    case Op::Seq: return ";";
    case Op::Plus: return "+";
    case Op::StrictSeq: return ":";
    case Op::StrictPlus: return "(+)";
    case Op::Project: return "PROJECT";
    case Op::Start: return "START";
    case Op::Strict: return "STRICT";
    case Op::And: return "AND";
    case Op::All: return "ALL";
    case Op::Unless: return "UNLESS";
  }
  return "?";
}

// ---------------------------------------------------------------- constructors

namespace {
std::shared_ptr<const FormulaNode> node(FormulaNode n) { return std::make_shared<const FormulaNode>(std::move(n)); }
}  // namespace

Formula Formula::atom(Label rel) {
  FormulaNode n;
  n.op = Op::Atom;
  n.a = rel;
  return Formula(node(std::move(n)));
}

Formula Formula::in(Formula f, Label a) {
  FormulaNode n;
  n.op = Op::In;
  n.a = a;
  n.left = std::move(f);
  return Formula(node(std::move(n)));
}

Formula Formula::rename(Formula f, Label from, Label to) {
  FormulaNode n;
  n.op = Op::Rename;
  n.a = from;
  n.b = to;
  n.left = std::move(f);
  return Formula(node(std::move(n)));
}

Formula Formula::filter(Formula f, SoAtom atom) { return filter(std::move(f), std::vector<SoAtom>{std::move(atom)}); }

Formula Formula::filter(Formula f, std::vector<SoAtom> conjunction) {
  if (conjunction.empty()) return f;
  for (const auto& a : conjunction) {
    if (static_cast<int>(a.args.size()) != a.pred.arity()) {
      throw Error(ErrorKind::Static, "filter predicate applied to the wrong number of labels");
    }
  }
  FormulaNode n;
  n.op = Op::Filter;
  n.atoms = std::move(conjunction);
  n.left = std::move(f);
  return Formula(node(std::move(n)));
}

Formula Formula::binary(Op op, Formula a, Formula b) {
  FormulaNode n;
  n.op = op;
  n.left = std::move(a);
  n.right = std::move(b);
  return Formula(node(std::move(n)));
}

Formula Formula::unary(Op op, Formula f) {
  FormulaNode n;
  n.op = op;
  n.left = std::move(f);
  return Formula(node(std::move(n)));
}

Formula Formula::or_(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
Formula Formula::seq(Formula a, Formula b) { return binary(Op::Seq, std::move(a), std::move(b)); }
Formula Formula::plus(Formula f) { return unary(Op::Plus, std::move(f)); }
Formula Formula::strict_seq(Formula a, Formula b) { return binary(Op::StrictSeq, std::move(a), std::move(b)); }
Formula Formula::strict_plus(Formula f) { return unary(Op::StrictPlus, std::move(f)); }
Formula Formula::start(Formula f) { return unary(Op::Start, std::move(f)); }
Formula Formula::strict(Formula f) { return unary(Op::Strict, std::move(f)); }
Formula Formula::and_(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
Formula Formula::all(Formula a, Formula b) { return binary(Op::All, std::move(a), std::move(b)); }
Formula Formula::unless(Formula a, Formula b) { return binary(Op::Unless, std::move(a), std::move(b)); }

Formula Formula::project(LabelSet keep, Formula f) {
  FormulaNode n;
  n.op = Op::Project;
  n.keep = make_label_set(std::move(keep));
  n.left = std::move(f);
  return Formula(node(std::move(n)));
}

Op Formula::op() const { return n_->op; }
const Formula& Formula::child() const { return n_->left; }
const Formula& Formula::left() const { return n_->left; }
const Formula& Formula::right() const { return n_->right; }
Label Formula::rel() const { return n_->a; }
Label Formula::label() const { return n_->a; }
Label Formula::label_to() const { return n_->b; }
const std::vector<SoAtom>& Formula::atoms() const { return n_->atoms; }
const LabelSet& Formula::keep() const { return n_->keep; }

bool Formula::is_binary_op() const {
  switch (op()) {
    case Op::Or:
    case Op::Seq:
    case Op::StrictSeq:
    case Op::And:
    case Op::All:
    case Op::Unless: return true;
    default: return false;
  }
}

bool Formula::is_unary_op() const { return op() != Op::Atom && !is_binary_op(); }

std::size_t Formula::size() const {
  if (op() == Op::Atom) return 1;
  std::size_t s = 1 + child().size();
  if (is_binary_op()) s += right().size();
  return s;
}

std::size_t Formula::depth() const {
  if (op() == Op::Atom) return 0;
  std::size_t d = child().depth();
  if (is_binary_op()) d = std::max(d, right().depth());
  return d + 1;
}

bool operator==(const Formula& x, const Formula& y) {
  if (x.n_ == y.n_) return true;
  if (!x.n_ || !y.n_) return false;
  const FormulaNode& a = *x.n_;
  const FormulaNode& b = *y.n_;
  if (a.op != b.op || a.a != b.a || a.b != b.b || a.keep != b.keep || !(a.atoms == b.atoms)) return false;
  if (a.op == Op::Atom) return true;
  if (!(a.left == b.left)) return false;
  return !x.is_binary_op() || a.right == b.right;
}

// ---------------------------------------------------------------- printing

namespace {

int level(const Formula& f) {
  switch (f.op()) {
    case Op::Or:
    case Op::And:
    case Op::All:
    case Op::Unless: return 0;
    case Op::Filter: return 1;
    case Op::Seq:
    case Op::StrictSeq: return 2;
    case Op::In:
    case Op::Rename:
    case Op::Plus:
    case Op::StrictPlus: return 3;
    default: return 4;
  }
}

std::string print_at(const Formula& f, int min_level);

std::string print_conj(const std::vector<SoAtom>& atoms) {
  if (atoms.size() == 1) return print_atom(atoms[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += " AND ";
    out += print_atom(atoms[i]);
  }
  return out + ")";
}

std::string print_body(const Formula& f) {
  switch (f.op()) {
    case Op::Atom: return f.rel().name();
    case Op::In: return print_at(f.child(), 3) + " IN " + f.label().name();
    case Op::Rename: return print_at(f.child(), 3) + "[" + f.label().name() + "->" + f.label_to().name() + "]";
    case Op::Plus: return print_at(f.child(), 3) + "+";
    case Op::StrictPlus: return print_at(f.child(), 3) + "(+)";
    case Op::Filter: return print_at(f.child(), 1) + " FILTER " + print_conj(f.atoms());
    case Op::Seq: return print_at(f.left(), 2) + " ; " + print_at(f.right(), 3);
    case Op::StrictSeq: return print_at(f.left(), 2) + " : " + print_at(f.right(), 3);
    case Op::Or:
    case Op::And:
    case Op::All:
    case Op::Unless:
      return print_at(f.left(), 0) + " " + op_name(f.op()) + " " + print_at(f.right(), 1);
    case Op::Project: {
      std::string out = "PROJECT[";
      auto names = names_sorted(f.keep());
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ",";
        out += names[i];
      }
      return out + "](" + print_at(f.child(), 0) + ")";
    }
    case Op::Start: return "START(" + print_at(f.child(), 0) + ")";
    case Op::Strict: return "STRICT(" + print_at(f.child(), 0) + ")";
  }
  return "?";
}

std::string print_at(const Formula& f, int min_level) {
  std::string body = print_body(f);
  return level(f) < min_level ? "(" + body + ")" : body;
}

}  // namespace

std::string print_atom(const SoAtom& a) {
  const SoPred& p = a.pred;
  switch (p.kind()) {
    case SoPred::Kind::UnivExt: {
      const Pred& q = p.pred();
      const std::string& l = a.args[0].name();
      switch (q.kind()) {
        case Pred::Kind::True: return "TRUE(" + l + ")";
        case Pred::Kind::False: return "FALSE(" + l + ")";
        case Pred::Kind::TypeIs: return l + ".type = " + q.rel().name();
        case Pred::Kind::Compare:
          return l + "." + q.attr() + " " + cmp_symbol(q.op()) + " " + value_to_string(q.constant());
        default: return "EACH(" + l + ", " + q.print() + ")";
      }
    }
    case SoPred::Kind::Increasing: return "INCR(" + a.args[0].name() + "." + p.attr() + ")";
    case SoPred::Kind::AttrCompare:
      return a.args[0].name() + "." + p.attr() + " " + cmp_symbol(p.op()) + " " + a.args[1].name() + "." + p.attr2();
    case SoPred::Kind::Custom: {
      std::string out = p.name() + "(";
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ", ";
        out += a.args[i].name();
      }
      return out + ")";
    }
  }
  return "?";
}

std::string print(const Formula& f) { return print_at(f, 0); }

// ---------------------------------------------------------------- parsing

namespace {

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> k{"IN",    "FILTER", "OR",   "AND",   "ALL",  "UNLESS", "PROJECT", "START",
                                                 "STRICT", "AS",    "INCR", "TRUE",  "FALSE", "EACH",  "NOT"};
  return k;
}

class Parser {
 public:
  Parser(const std::string& text, const Schema& schema, ParseOptions opts)
      : lx_(text), schema_(schema), opts_(opts) {}

  Formula parse_all() {
    Formula f = parse_binary();
    if (lx_.peek().kind != detail::Token::Kind::End) lx_.fail("unexpected trailing input");
    return f;
  }

 private:
  Label name(const char* what) {
    const auto& t = lx_.peek();
    if (t.kind != detail::Token::Kind::Ident) lx_.fail(std::string("expected ") + what);
    if (keywords().count(t.text)) lx_.fail(std::string("expected ") + what + " (keyword is not a name)");
    if (!opts_.allow_reserved && std::string_view(t.text).starts_with(kReservedPrefix)) {
      lx_.fail("names starting with '_g' are reserved");
    }
    return Label(lx_.next().text);
  }

  Formula parse_binary() {
    Formula f = parse_filter();
    for (;;) {
      Op op;
      if (lx_.accept_ident("OR")) {
        op = Op::Or;
      } else if (lx_.accept_ident("AND")) {
        op = Op::And;
      } else if (lx_.accept_ident("ALL")) {
        op = Op::All;
      } else if (lx_.accept_ident("UNLESS")) {
        op = Op::Unless;
      } else {
        return f;
      }
      f = Formula::binary(op, f, parse_filter());
    }
  }

  Formula parse_filter() {
    Formula f = parse_seq();
    while (lx_.accept_ident("FILTER")) {
      std::vector<SoAtom> conj;
      if (lx_.accept_sym("(")) {
        conj.push_back(parse_so_atom());
        while (lx_.accept_ident("AND")) conj.push_back(parse_so_atom());
        lx_.expect_sym(")");
      } else {
        conj.push_back(parse_so_atom());
      }
      f = Formula::filter(f, std::move(conj));
    }
    return f;
  }

  Formula parse_seq() {
    Formula f = parse_postfix();
    for (;;) {
      if (lx_.accept_sym(";")) {
        f = Formula::seq(f, parse_postfix());
      } else if (lx_.accept_sym(":")) {
        f = Formula::strict_seq(f, parse_postfix());
      } else {
        return f;
      }
    }
  }

  Formula parse_postfix() {
    Formula f = parse_primary();
    for (;;) {
      if (lx_.accept_sym("+")) {
        f = Formula::plus(f);
      } else if (lx_.accept_sym("(+)")) {
        f = Formula::strict_plus(f);
      } else if (lx_.accept_ident("IN")) {
        f = Formula::in(f, name("a label"));
      } else if (lx_.accept_sym("[")) {
        Label a = name("a label");
        lx_.expect_sym("->");
        Label b = name("a label");
        lx_.expect_sym("]");
        f = Formula::rename(f, a, b);
      } else {
        return f;
      }
    }
  }

  Formula parse_primary() {
    if (lx_.accept_sym("(")) {
      Formula f = parse_binary();
      lx_.expect_sym(")");
      return f;
    }
    if (lx_.accept_ident("PROJECT")) {
      lx_.expect_sym("[");
      std::vector<Label> keep;
      if (!lx_.at_sym("]")) {
        keep.push_back(name("a label"));
        while (lx_.accept_sym(",")) keep.push_back(name("a label"));
      }
      lx_.expect_sym("]");
      lx_.expect_sym("(");
      Formula f = parse_binary();
      lx_.expect_sym(")");
      return Formula::project(make_label_set(std::move(keep)), f);
    }
    for (auto [kw, op] : {std::pair{"START", Op::Start}, std::pair{"STRICT", Op::Strict}}) {
      if (lx_.accept_ident(kw)) {
        lx_.expect_sym("(");
        Formula f = parse_binary();
        lx_.expect_sym(")");
        return Formula::unary(op, f);
      }
    }
    const auto tok = lx_.peek();
    Label rel = name("a relation name or '('");
    if (!schema_.has_relation(rel.name())) lx_.fail_at(tok, "unknown relation '" + rel.name() + "'");
    return Formula::atom(rel);
  }

  void check_attr(const detail::Token& at, const std::string& attr) {
    if (!schema_.has_attribute(attr)) lx_.fail_at(at, "no relation declares attribute '" + attr + "'");
  }

  void check_pred(const detail::Token& at, const Pred& p) {
    switch (p.kind()) {
      case Pred::Kind::TypeIs:
        if (!schema_.has_relation(p.rel().name())) lx_.fail_at(at, "unknown relation '" + p.rel().name() + "'");
        break;
      case Pred::Kind::Compare: check_attr(at, p.attr()); break;
      default:
        for (const auto& q : p.parts()) check_pred(at, q);
    }
  }

  SoAtom parse_so_atom() {
    const auto start = lx_.peek();
    if (lx_.accept_ident("INCR")) {
      lx_.expect_sym("(");
      Label l = name("a label");
      lx_.expect_sym(".");
      const auto at = lx_.peek();
      std::string attr = lx_.expect_ident("an attribute name");
      check_attr(at, attr);
      lx_.expect_sym(")");
      return {SoPred::increasing(attr), {l}};
    }
    for (auto [kw, truth] : {std::pair{"TRUE", true}, std::pair{"FALSE", false}}) {
      if (lx_.accept_ident(kw)) {
        lx_.expect_sym("(");
        Label l = name("a label");
        lx_.expect_sym(")");
        return {SoPred::univ(truth ? Pred::truth() : Pred::falsity()), {l}};
      }
    }
    if (lx_.accept_ident("EACH")) {
      lx_.expect_sym("(");
      Label l = name("a label");
      lx_.expect_sym(",");
      Pred p = detail::parse_pexpr(lx_);
      check_pred(start, p);
      lx_.expect_sym(")");
      return {SoPred::univ(p), {l}};
    }
    Label l = name("a label");
    lx_.expect_sym(".");
    if (lx_.accept_ident("type")) {
      lx_.expect_sym("=");
      const auto at = lx_.peek();
      Label r = name("a relation name");
      if (!schema_.has_relation(r.name())) lx_.fail_at(at, "unknown relation '" + r.name() + "'");
      return {SoPred::univ(Pred::type_is(r)), {l}};
    }
    const auto at = lx_.peek();
    std::string attr = lx_.expect_ident("an attribute name");
    check_attr(at, attr);
    CmpOp op = detail::parse_cmp_op(lx_);
    if (lx_.peek().kind == detail::Token::Kind::Ident) {
      Label l2 = name("a label");
      lx_.expect_sym(".");
      const auto at2 = lx_.peek();
      std::string attr2 = lx_.expect_ident("an attribute name");
      check_attr(at2, attr2);
      return {SoPred::attr_compare(attr, op, attr2), {l, l2}};
    }
    return {SoPred::univ(Pred::compare(attr, op, detail::parse_literal(lx_))), {l}};
  }

  detail::Lexer lx_;
  const Schema& schema_;
  ParseOptions opts_;
};

}  // namespace

Formula parse(const std::string& text, const Schema& schema, ParseOptions opts) {
  Formula f = Parser(text, schema, opts).parse_all();
  if (opts.allow_unassigned) return f;
  const LabelSet universe = set_union(schema.relation_labels(), assigned_labels(f));
  std::function<void(const Formula&)> check = [&](const Formula& g) {
    if (g.op() == Op::Project) {
      for (Label l : g.keep()) {
        if (!contains(universe, l)) {
          throw Error(ErrorKind::Static, "projection keeps label '" + l.name() + "' that the formula never assigns");
        }
      }
    }
    if (g.op() == Op::Filter) {
      for (const auto& a : g.atoms()) {
        for (Label l : a.args) {
          if (!contains(universe, l)) {
            throw Error(ErrorKind::Static, "filter mentions label '" + l.name() + "' that the formula never assigns");
          }
        }
      }
    }
    if (g.op() != Op::Atom) check(g.child());
    if (g.is_binary_op()) check(g.right());
  };
  check(f);
  return f;
}

// ---------------------------------------------------------------- analyses

namespace {

void collect(const Formula& f, std::vector<Label>& out, bool assigned_only) {
  switch (f.op()) {
    case Op::Atom: out.push_back(f.rel()); return;
    case Op::In: out.push_back(f.label()); break;
    case Op::Rename:
      if (!assigned_only) out.push_back(f.label());
      out.push_back(f.label_to());
      break;
    case Op::Project:
      if (!assigned_only) out.insert(out.end(), f.keep().begin(), f.keep().end());
      break;
    case Op::Filter:
      if (!assigned_only) {
        for (const auto& a : f.atoms()) out.insert(out.end(), a.args.begin(), a.args.end());
      }
      break;
    default: break;
  }
  collect(f.child(), out, assigned_only);
  if (f.is_binary_op()) collect(f.right(), out, assigned_only);
}

}  // namespace

LabelSet label_universe(const Formula& f, const Schema& schema) {
  std::vector<Label> out;
  collect(f, out, true);
  return set_union(make_label_set(std::move(out)), schema.relation_labels());
}

LabelSet assigned_labels(const Formula& f) {
  std::vector<Label> out;
  collect(f, out, true);
  return make_label_set(std::move(out));
}

LabelSet mentioned_labels(const Formula& f) {
  std::vector<Label> out;
  collect(f, out, false);
  return make_label_set(std::move(out));
}

Formula desugar_conjunctive_filter(const Formula& f) {
  switch (f.op()) {
    case Op::Atom: return f;
    case Op::Filter: {
      Formula g = desugar_conjunctive_filter(f.child());
      for (const auto& a : f.atoms()) g = Formula::filter(g, a);
      return g;
    }
    case Op::In: return Formula::in(desugar_conjunctive_filter(f.child()), f.label());
    case Op::Rename: return Formula::rename(desugar_conjunctive_filter(f.child()), f.label(), f.label_to());
    case Op::Project: return Formula::project(f.keep(), desugar_conjunctive_filter(f.child()));
    default:
      if (f.is_binary_op()) {
        return Formula::binary(f.op(), desugar_conjunctive_filter(f.left()), desugar_conjunctive_filter(f.right()));
      }
      return Formula::unary(f.op(), desugar_conjunctive_filter(f.child()));
  }
}

bool contains_op(const Formula& f, Op op) {
  if (f.op() == op) return true;
  if (f.op() == Op::Atom) return false;
  if (contains_op(f.child(), op)) return true;
  return f.is_binary_op() && contains_op(f.right(), op);
}

namespace {
bool all_ops_in(const Formula& f, std::initializer_list<Op> ops) {
  if (std::find(ops.begin(), ops.end(), f.op()) == ops.end()) return false;
  if (f.op() == Op::Atom) return true;
  if (!all_ops_in(f.child(), ops)) return false;
  return !f.is_binary_op() || all_ops_in(f.right(), ops);
}
}  // namespace

bool is_core(const Formula& f) {
  return all_ops_in(f, {Op::Atom, Op::In, Op::Rename, Op::Filter, Op::Or, Op::Seq, Op::Plus});
}

bool is_extended(const Formula& f) {
  return all_ops_in(f, {Op::Atom, Op::In, Op::Rename, Op::Filter, Op::Or, Op::Seq, Op::Plus, Op::StrictSeq,
                        Op::StrictPlus, Op::Project, Op::Start});
}

bool has_only_unary_filters(const Formula& f) {
  if (f.op() == Op::Filter) {
    for (const auto& a : f.atoms()) {
      if (!a.pred.is_unary_ext()) return false;
    }
  }
  if (f.op() == Op::Atom) return true;
  if (!has_only_unary_filters(f.child())) return false;
  return !f.is_binary_op() || has_only_unary_filters(f.right());
}

Formula rebuild(const Formula& f, Formula left, Formula right) {
  switch (f.op()) {
    case Op::Atom: return f;
    case Op::In: return Formula::in(std::move(left), f.label());
    case Op::Rename: return Formula::rename(std::move(left), f.label(), f.label_to());
    case Op::Filter: return Formula::filter(std::move(left), f.atoms());
    case Op::Project: return Formula::project(f.keep(), std::move(left));
    case Op::Plus:
    case Op::StrictPlus:
    case Op::Start:
    case Op::Strict: return Formula::unary(f.op(), std::move(left));
    default: return Formula::binary(f.op(), std::move(left), std::move(right));
  }
}

}  // namespace socel
