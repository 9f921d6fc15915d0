#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "socel/oracle.hpp"

namespace socel::testing {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(SOCEL_SOURCE_DIR) + "/fixtures/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const Schema& sensor_schema() {
  static const Schema s = Schema::from_json(read_fixture("schema.json"));
  return s;
}

const Stream& sensor_stream() {
  static const Stream s = read_stream(read_fixture("sensor_stream.jsonl"), sensor_schema());
  return s;
}

Formula fixture_query(const std::string& name) { return parse(read_fixture(name), sensor_schema()); }

Event fig(const std::string& rel, double value) { return Event(rel, {{"value", value}}); }

const Schema& small_schema() {
  static const Schema schema = [] {
    Schema s;
    s.add_relation("R", {{"v", ValueType::Number}});
    s.add_relation("T", {{"v", ValueType::Number}});
    return s;
  }();
  return schema;
}

Event ev(const std::string& rel, double v) { return Event(rel, {{"v", Value(v)}}); }

const std::vector<Event>& alphabet4() {
  static const std::vector<Event> a{ev("R", 0), ev("R", 1), ev("T", -1), ev("T", 1)};
  return a;
}

const std::vector<Event>& alphabet2() {
  static const std::vector<Event> a{ev("R", 0), ev("T", 1)};
  return a;
}

void walk_streams(const std::vector<Event>& alphabet, std::size_t max_len,
                  const std::function<bool(const Stream&)>& enter, const std::function<void()>& leave) {
  Stream s;
  s.reserve(max_len);
  std::function<void()> go = [&] {
    if (s.size() == max_len) return;
    for (const auto& e : alphabet) {
      s.push_back(e);
      if (enter(s)) go();
      leave();
      s.pop_back();
    }
  };
  go();
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> f{Family::Labels,  Family::Or,      Family::Seq,   Family::Plus,
                                     Family::StrictSeq, Family::StrictPlus, Family::Project, Family::Start,
                                     Family::Strict,  Family::And,     Family::All,   Family::Unless};
  return f;
}

const std::vector<Family>& core_families() {
  static const std::vector<Family> f{Family::Labels, Family::Or, Family::Seq, Family::Plus};
  return f;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Labels: return "labels";
    case Family::Or: return "or";
    case Family::Seq: return "seq";
    case Family::Plus: return "plus";
    case Family::StrictSeq: return "contiguous-seq";
    case Family::StrictPlus: return "contiguous-plus";
    case Family::Project: return "project";
    case Family::Start: return "start";
    case Family::Strict: return "strict";
    case Family::And: return "and";
    case Family::All: return "all";
    case Family::Unless: return "unless";
  }
  return "?";
}

std::vector<Op> core_ops() { return {Op::Or, Op::Seq, Op::Plus}; }

std::vector<Op> extended_ops() {
  return {Op::Or, Op::Seq, Op::Plus, Op::StrictSeq, Op::StrictPlus, Op::Project, Op::Start};
}

std::vector<Op> full_ops() {
  return {Op::Or,    Op::Seq,    Op::Plus, Op::StrictSeq, Op::StrictPlus, Op::Project, Op::Start,
          Op::Strict, Op::And,   Op::All,  Op::Unless};
}

Label FormulaGen::label() {
  static const Label names[] = {Label("A"), Label("B")};
  return names[below(2)];
}

SoAtom FormulaGen::unary_filter(Label target) {
  static const CmpOp ops[] = {CmpOp::Ge, CmpOp::Le, CmpOp::Eq, CmpOp::Ne};
  const std::size_t pick = below(5);
  if (pick == 4) return SoAtom{SoPred::univ(Pred::type_is(Label(below(2) ? "R" : "T"))), {target}};
  const double c = static_cast<double>(below(3)) - 1.0;
  return SoAtom{SoPred::univ(Pred::compare("v", ops[pick], Value(c))), {target}};
}

Formula FormulaGen::unit() { return Formula::atom(Label(below(2) ? "R" : "T")); }

Formula FormulaGen::wrap_labels(Formula f, const GenOptions& opts) {
  if (!opts.labels) return f;
  static const Label pool[] = {Label("R"), Label("T"), Label("A"), Label("B")};
  const std::size_t layers = below(3);
  for (std::size_t k = 0; k < layers; ++k) {
    switch (below(3)) {
      case 0: f = Formula::in(f, label()); break;
      case 1: {
        Label from = pool[below(4)];
        Label to = pool[below(4)];
        if (from != to) f = Formula::rename(f, from, to);
        break;
      }
      default: f = Formula::filter(f, unary_filter(pool[below(4)])); break;
    }
  }
  return f;
}

namespace {

bool is_binary(Op op) {
  switch (op) {
    case Op::Or:
    case Op::Seq:
    case Op::StrictSeq:
    case Op::And:
    case Op::All:
    case Op::Unless: return true;
    default: return false;
  }
}

GenOptions without(GenOptions opts, std::initializer_list<Op> drop) {
  std::erase_if(opts.ops, [&](Op op) { return std::find(drop.begin(), drop.end(), op) != drop.end(); });
  return opts;
}

}  // namespace

Formula FormulaGen::random(std::size_t depth, const GenOptions& opts) {
  if (depth <= 1 || opts.ops.empty() || below(4) == 0) return wrap_labels(unit(), opts);
  const Op op = opts.ops[below(opts.ops.size())];
  Formula f;
  if (is_binary(op)) {
    f = Formula::binary(op, random(depth - 1, opts), random(depth - 1, opts));
  } else if (op == Op::Project) {
    static const Label pool[] = {Label("R"), Label("T"), Label("A"), Label("B")};
    LabelSet keep;
    for (Label l : pool) {
      if (below(2)) keep.push_back(l);
    }
    f = Formula::project(make_label_set(std::move(keep)), random(depth - 1, opts));
  } else if (op == Op::Strict) {
    f = Formula::strict(random(depth - 1, without(opts, {Op::Project, Op::All})));
  } else {
    f = Formula::unary(op, random(depth - 1, opts));
  }
  return below(3) == 0 ? wrap_labels(f, opts) : f;
}

Formula FormulaGen::generate(Family family, const GenOptions& opts) {
  const std::size_t d = opts.max_depth > 1 ? opts.max_depth - 1 : 1;
  auto child = [&](const GenOptions& o) { return random(d, o); };
  switch (family) {
    case Family::Labels: {
      GenOptions o = opts;
      o.labels = true;
      Formula f = child(opts);
      while (f.op() != Op::In && f.op() != Op::Rename && f.op() != Op::Filter) f = wrap_labels(f, o);
      return f;
    }
    case Family::Or: return Formula::or_(child(opts), child(opts));
    case Family::Seq: return Formula::seq(child(opts), child(opts));
    case Family::Plus: return Formula::plus(child(opts));
    case Family::StrictSeq: return Formula::strict_seq(child(opts), child(opts));
    case Family::StrictPlus: return Formula::strict_plus(child(opts));
    case Family::Project: {
      LabelSet keep{label()};
      if (below(2)) keep.push_back(Label(below(2) ? "R" : "T"));
      return Formula::project(make_label_set(std::move(keep)), child(opts));
    }
    case Family::Start: return Formula::start(child(opts));
    case Family::Strict: {
      const GenOptions o = without(opts, {Op::Project, Op::All});
      const std::size_t dd = d > 1 ? d - 1 : 1;
      switch (below(3)) {
        case 0: return Formula::strict(Formula::seq(random(dd, o), random(dd, o)));
        case 1: return Formula::strict(Formula::plus(random(dd, o)));
        default: return Formula::strict(child(o));
      }
    }
    case Family::And:
    case Family::All: {
      // Independent operands rarely share complex events; half the time the
      // right operand is derived from the left one.
      Formula l = child(opts);
      Formula r;
      switch (below(4)) {
        case 0: r = Formula::or_(l, child(opts)); break;
        case 1: r = Formula::filter(l, unary_filter(Label(below(2) ? "R" : "T"))); break;
        default: r = child(opts);
      }
      return family == Family::And ? Formula::and_(l, r) : Formula::all(l, r);
    }
    case Family::Unless: return Formula::unless(child(opts), random(below(2) + 1, opts));
  }
  return unit();
}

namespace {

FoFormula focel_rec(std::mt19937_64& rng, std::size_t depth, int& next_var) {
  auto below = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  if (depth <= 1 || below(4) == 0) {
    return FoFormula::as(Label(below(2) ? "R" : "T"), Label("x" + std::to_string(++next_var)));
  }
  switch (below(4)) {
    case 0: {
      FoFormula l = focel_rec(rng, depth - 1, next_var);
      return FoFormula::or_(l, focel_rec(rng, depth - 1, next_var));
    }
    case 1: {
      FoFormula l = focel_rec(rng, depth - 1, next_var);
      return FoFormula::seq(l, focel_rec(rng, depth - 1, next_var));
    }
    case 2: return FoFormula::plus(focel_rec(rng, depth - 1, next_var));
    default: {
      FoFormula g = focel_rec(rng, depth - 1, next_var);
      LabelSet bound = vdef_plus(g);
      if (bound.empty()) return g;
      FormulaGen atoms(rng());
      std::vector<FoAtom> conj;
      const std::size_t k = 1 + below(2);
      for (std::size_t i = 0; i < k; ++i) {
        SoAtom a = atoms.unary_filter(bound[below(bound.size())]);
        conj.push_back({a.pred, a.args});
      }
      return FoFormula::filter(g, std::move(conj));
    }
  }
}

}  // namespace

FoFormula random_focel(std::mt19937_64& rng, std::size_t depth) {
  int next_var = 0;
  return focel_rec(rng, depth, next_var);
}

Ucea random_automaton(std::mt19937_64& rng, int max_states) {
  auto below = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  static const Label labels[] = {Label("A"), Label("B")};
  const Pred guards[] = {
      Pred::truth(),
      Pred::type_is(Label("R")),
      Pred::type_is(Label("T")),
      Pred::compare("v", CmpOp::Ge, Value(0.0)),
      Pred::all_of({Pred::type_is(Label("T")), Pred::compare("v", CmpOp::Le, Value(0.0))}),
  };
  Ucea a;
  const int n = 1 + below(max_states);
  for (int q = 0; q < n; ++q) a.add_state();
  a.set_initial(0);
  for (int q = 0; q < n; ++q) {
    if (below(2) || q == n - 1) a.set_final(q);
  }
  const int edges = 1 + below(2 * n + 1);
  for (int k = 0; k < edges; ++k) {
    LabelSet ls;
    const int pick = below(4);
    if (pick & 1) ls.push_back(labels[0]);
    if (pick & 2) ls.push_back(labels[1]);
    a.add(below(n), guards[below(5)], make_label_set(std::move(ls)), below(n));
  }
  return a;
}

CeSet without_reserved(const CeSet& s) {
  CeSet out;
  out.reserve(s.size());
  for (const auto& c : s) out.push_back(drop_reserved(c));
  normalize(out);
  return out;
}

std::string describe(const CeSet& s) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? ", " : "") << s[i].to_json();
  os << "}";
  return os.str();
}

std::string describe(const Stream& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i].to_string();
  return os.str();
}

std::string oracle_mismatch(const Formula& f, const Formula& g, const std::vector<Event>& alphabet,
                            std::size_t max_len) {
  Stream current;
  Oracle of(current);
  Oracle og(current);
  std::string bad;
  walk_streams(
      alphabet, max_len,
      [&](const Stream& s) {
        current = s;
        const Position n = static_cast<Position>(s.size()) - 1;
        CeSet want = without_reserved(of.eval(f, 0, n));
        CeSet got = without_reserved(og.eval(g, 0, n));
        if (want != got) bad = "on " + describe(s) + ": " + describe(want) + " vs " + describe(got);
        return bad.empty();
      },
      [&] {
        const Position cut = static_cast<Position>(current.size()) - 1;
        of.truncate(cut);
        og.truncate(cut);
        current.pop_back();
      });
  return bad;
}

std::string automaton_mismatch(const Formula& f, const Ucea& a, const std::vector<Event>& alphabet,
                               std::size_t max_len, Semantics mode) {
  Stream current;
  Oracle oracle(current);
  RunSimulator run(a);
  StarSimulator star(a);
  std::string bad;
  walk_streams(
      alphabet, max_len,
      [&](const Stream& s) {
        current = s;
        const Position n = static_cast<Position>(s.size()) - 1;
        CeSet want = oracle.eval(f, 0, n);
        CeSet got;
        if (mode == Semantics::Standard) {
          run.push(s.back());
          got = run.accepted();
        } else {
          star.push(s.back());
          got = star.accepted();
        }
        if (want != got) bad = "on " + describe(s) + ": oracle " + describe(want) + " automaton " + describe(got);
        return bad.empty();
      },
      [&] {
        if (mode == Semantics::Standard) {
          run.pop();
        } else {
          star.pop();
        }
        oracle.truncate(static_cast<Position>(current.size()) - 1);
        current.pop_back();
      });
  return bad;
}

}  // namespace socel::testing
