#include "socel/automaton.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "socel/error.hpp"

namespace socel {

using json = nlohmann::json;

int Ucea::add_state() {
  if (!names.empty()) names.push_back("q" + std::to_string(num_states));
  return num_states++;
}

void Ucea::add(int from, Pred guard, LabelSet labels, int to) {
  delta.push_back({from, std::move(guard), std::move(labels), to});
}

namespace {

void insert_sorted(std::vector<int>& v, int q) {
  auto it = std::lower_bound(v.begin(), v.end(), q);
  if (it == v.end() || *it != q) v.insert(it, q);
}

bool has_sorted(const std::vector<int>& v, int q) { return std::binary_search(v.begin(), v.end(), q); }

}  // namespace

void Ucea::set_initial(int q) { insert_sorted(initial, q); }
void Ucea::set_final(int q) { insert_sorted(final_states, q); }
bool Ucea::is_initial(int q) const { return has_sorted(initial, q); }
bool Ucea::is_final(int q) const { return has_sorted(final_states, q); }

std::string Ucea::state_name(int q) const {
  if (static_cast<std::size_t>(q) < names.size()) return names[static_cast<std::size_t>(q)];
  return "q" + std::to_string(q);
}

LabelSet Ucea::labels() const {
  LabelSet out;
  for (const auto& t : delta) out.insert(out.end(), t.labels.begin(), t.labels.end());
  return make_label_set(std::move(out));
}

std::vector<std::vector<int>> Ucea::outgoing() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_states));
  for (std::size_t i = 0; i < delta.size(); ++i) out[static_cast<std::size_t>(delta[i].from)].push_back(static_cast<int>(i));
  return out;
}

void Ucea::validate() const {
  auto bad = [&](int q) { return q < 0 || q >= num_states; };
  for (const auto& t : delta) {
    if (bad(t.from) || bad(t.to)) throw Error(ErrorKind::Static, "automaton: transition endpoint outside the state set");
  }
  for (int q : initial) {
    if (bad(q)) throw Error(ErrorKind::Static, "automaton: unknown initial state");
  }
  for (int q : final_states) {
    if (bad(q)) throw Error(ErrorKind::Static, "automaton: unknown final state");
  }
  if (!names.empty() && names.size() != static_cast<std::size_t>(num_states)) {
    throw Error(ErrorKind::Static, "automaton: state name table does not match the state count");
  }
}

namespace {

void check_pred(const Pred& p, const Schema& schema) {
  switch (p.kind()) {
    case Pred::Kind::TypeIs:
      if (!schema.has_relation(p.rel().name())) {
        throw Error(ErrorKind::Static, "automaton guard: unknown relation '" + p.rel().name() + "'");
      }
      break;
    case Pred::Kind::Compare:
      if (!schema.has_attribute(p.attr())) {
        throw Error(ErrorKind::Static, "automaton guard: unknown attribute '" + p.attr() + "'");
      }
      break;
    case Pred::Kind::And:
    case Pred::Kind::Or:
    case Pred::Kind::Not:
      for (const auto& q : p.parts()) check_pred(q, schema);
      break;
    default: break;
  }
}

}  // namespace

void Ucea::validate(const Schema& schema) const {
  validate();
  for (const auto& t : delta) check_pred(t.guard, schema);
}

std::string Ucea::to_json() const {
  json j;
  j["states"] = json::array();
  for (int q = 0; q < num_states; ++q) j["states"].push_back(state_name(q));
  j["initial"] = json::array();
  for (int q : initial) j["initial"].push_back(state_name(q));
  j["final"] = json::array();
  for (int q : final_states) j["final"].push_back(state_name(q));
  j["transitions"] = json::array();
  for (const auto& t : delta) {
    j["transitions"].push_back({{"from", state_name(t.from)},
                                {"guard", t.guard.print()},
                                {"labels", names_sorted(t.labels)},
                                {"to", state_name(t.to)}});
  }
  return j.dump(2);
}

std::string Ucea::to_dot() const {
  std::ostringstream os;
  os << "digraph ucea {\n  rankdir=LR;\n";
  for (int q = 0; q < num_states; ++q) {
    os << "  \"" << state_name(q) << "\" [shape=" << (is_final(q) ? "doublecircle" : "circle") << "];\n";
  }
  for (int q : initial) os << "  \"_init" << q << "\" [shape=point];\n  \"_init" << q << "\" -> \"" << state_name(q) << "\";\n";
  for (const auto& t : delta) {
    std::string labels;
    for (const auto& n : names_sorted(t.labels)) labels += (labels.empty() ? "" : ",") + n;
    std::string text = t.guard.print() + " | {" + labels + "}";
    std::string escaped;
    for (char c : text) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    os << "  \"" << state_name(t.from) << "\" -> \"" << state_name(t.to) << "\" [label=\"" << escaped << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

Ucea Ucea::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, std::string("automaton JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("states") || !j["states"].is_array()) {
    throw Error(ErrorKind::Syntax, "automaton JSON: expected an object with a \"states\" array");
  }
  Ucea a;
  std::unordered_map<std::string, int> index;
  auto key = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw Error(ErrorKind::Syntax, "automaton JSON: state names must be strings or integers");
  };
  for (const auto& s : j["states"]) {
    std::string name = key(s);
    if (!index.emplace(name, a.num_states).second) {
      throw Error(ErrorKind::Static, "automaton JSON: duplicate state '" + name + "'");
    }
    a.names.push_back(name);
    ++a.num_states;
  }
  auto state = [&](const json& v) {
    auto it = index.find(key(v));
    if (it == index.end()) throw Error(ErrorKind::Static, "automaton JSON: unknown state '" + key(v) + "'");
    return it->second;
  };
  for (const auto& q : j.value("initial", json::array())) a.set_initial(state(q));
  for (const auto& q : j.value("final", json::array())) a.set_final(state(q));
  for (const auto& t : j.value("transitions", json::array())) {
    if (!t.is_object() || !t.contains("from") || !t.contains("to")) {
      throw Error(ErrorKind::Syntax, "automaton JSON: transition needs \"from\" and \"to\"");
    }
    Pred guard = t.contains("guard") ? parse_predicate(t["guard"].get<std::string>()) : Pred::truth();
    LabelSet labels;
    for (const auto& l : t.value("labels", json::array())) {
      std::string name = l.get<std::string>();
      if (name.empty()) throw Error(ErrorKind::Syntax, "automaton JSON: empty label name");
      labels.push_back(Label(name));
    }
    a.add(state(t["from"]), guard, make_label_set(std::move(labels)), state(t["to"]));
  }
  a.validate();
  return a;
}

Ucea trim(const Ucea& a) {
  auto n = static_cast<std::size_t>(a.num_states);
  std::vector<char> fwd(n, 0), bwd(n, 0);
  std::vector<std::vector<int>> succ(n), pred(n);
  for (const auto& t : a.delta) {
    succ[static_cast<std::size_t>(t.from)].push_back(t.to);
    pred[static_cast<std::size_t>(t.to)].push_back(t.from);
  }
  auto flood = [](std::vector<char>& seen, const std::vector<int>& seeds, const std::vector<std::vector<int>>& g) {
    std::vector<int> work;
    for (int q : seeds) {
      if (!seen[static_cast<std::size_t>(q)]) {
        seen[static_cast<std::size_t>(q)] = 1;
        work.push_back(q);
      }
    }
    while (!work.empty()) {
      int q = work.back();
      work.pop_back();
      for (int r : g[static_cast<std::size_t>(q)]) {
        if (!seen[static_cast<std::size_t>(r)]) {
          seen[static_cast<std::size_t>(r)] = 1;
          work.push_back(r);
        }
      }
    }
  };
  flood(fwd, a.initial, succ);
  flood(bwd, a.final_states, pred);
  std::vector<int> remap(n, -1);
  Ucea out;
  for (std::size_t q = 0; q < n; ++q) {
    if (fwd[q] && bwd[q]) {
      remap[q] = out.num_states++;
      if (!a.names.empty()) out.names.push_back(a.names[q]);
    }
  }
  for (const auto& t : a.delta) {
    int f = remap[static_cast<std::size_t>(t.from)];
    int g = remap[static_cast<std::size_t>(t.to)];
    if (f >= 0 && g >= 0) out.add(f, t.guard, t.labels, g);
  }
  for (int q : a.initial) {
    if (remap[static_cast<std::size_t>(q)] >= 0) out.set_initial(remap[static_cast<std::size_t>(q)]);
  }
  for (int q : a.final_states) {
    if (remap[static_cast<std::size_t>(q)] >= 0) out.set_final(remap[static_cast<std::size_t>(q)]);
  }
  return out;
}

// ---- run semantics -------------------------------------------------------

namespace {

template <class Config>
void dedupe(std::vector<Config>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void append_marks(std::vector<Mark>& marks, Position p, const LabelSet& labels) {
  for (Label l : labels) marks.push_back({p, l});
}

}  // namespace

RunSimulator::RunSimulator(const Ucea& a) : a_(a), out_(a.outgoing()) {
  std::vector<Config> start;
  for (int q : a.initial) start.push_back({q, {}});
  stack_.push_back(std::move(start));
}

void RunSimulator::push(const Event& e) {
  const Position p = length();
  std::vector<Config> next;
  for (const auto& c : stack_.back()) {
    for (int ti : out_[static_cast<std::size_t>(c.q)]) {
      const Transition& t = a_.delta[static_cast<std::size_t>(ti)];
      if (!t.guard.eval(e)) continue;
      Config d{t.to, c.marks};
      append_marks(d.marks, p, t.labels);
      next.push_back(std::move(d));
    }
  }
  dedupe(next);
  stack_.push_back(std::move(next));
}

void RunSimulator::pop() {
  if (stack_.size() > 1) stack_.pop_back();
}

CeSet RunSimulator::accepted() const {
  CeSet out;
  if (stack_.size() < 2) return out;
  for (const auto& c : stack_.back()) {
    if (a_.is_final(c.q)) out.emplace_back(c.marks);
  }
  normalize(out);
  return out;
}

StarSimulator::StarSimulator(const Ucea& a) : a_(a), out_(a.outgoing()) {
  Level base;
  for (int q : a.initial) base.pool.push_back({q, {}});
  stack_.push_back(std::move(base));
}

void StarSimulator::push(const Event& e) {
  const Position p = length();
  const Level& top = stack_.back();
  Level next;
  for (const auto& c : top.pool) {
    for (int ti : out_[static_cast<std::size_t>(c.q)]) {
      const Transition& t = a_.delta[static_cast<std::size_t>(ti)];
      if (t.labels.empty() || !t.guard.eval(e)) continue;
      Config d{t.to, c.marks};
      append_marks(d.marks, p, t.labels);
      next.last.push_back(std::move(d));
    }
  }
  dedupe(next.last);
  next.pool = top.pool;
  next.pool.insert(next.pool.end(), next.last.begin(), next.last.end());
  dedupe(next.pool);
  stack_.push_back(std::move(next));
}

void StarSimulator::pop() {
  if (stack_.size() > 1) stack_.pop_back();
}

CeSet StarSimulator::accepted() const {
  CeSet out;
  for (const auto& c : stack_.back().last) {
    if (a_.is_final(c.q)) out.emplace_back(c.marks);
  }
  normalize(out);
  return out;
}

namespace {

void check_position(const Stream& s, Position n) {
  if (n < 0 || n >= static_cast<Position>(s.size())) throw Error(ErrorKind::Range, "position outside the stream");
}

}  // namespace

CeSet run_semantics(const Ucea& a, const Stream& s, Position n) {
  check_position(s, n);
  RunSimulator sim(a);
  for (Position p = 0; p <= n; ++p) sim.push(s[static_cast<std::size_t>(p)]);
  return sim.accepted();
}

std::vector<CeSet> run_semantics_all(const Ucea& a, const Stream& s) {
  RunSimulator sim(a);
  std::vector<CeSet> out;
  for (const auto& e : s) {
    sim.push(e);
    out.push_back(sim.accepted());
  }
  return out;
}

CeSet star_semantics(const Ucea& a, const Stream& s, Position n) {
  check_position(s, n);
  StarSimulator sim(a);
  for (Position p = 0; p <= n; ++p) sim.push(s[static_cast<std::size_t>(p)]);
  return sim.accepted();
}

std::vector<CeSet> star_semantics_all(const Ucea& a, const Stream& s) {
  StarSimulator sim(a);
  std::vector<CeSet> out;
  for (const auto& e : s) {
    sim.push(e);
    out.push_back(sim.accepted());
  }
  return out;
}

std::map<ComplexEvent, std::uint64_t> run_counts(const Ucea& a, const Stream& s, Position n) {
  check_position(s, n);
  auto out = a.outgoing();
  std::map<std::pair<int, std::vector<Mark>>, std::uint64_t> cur;
  for (int q : a.initial) cur[{q, {}}] += 1;
  for (Position p = 0; p <= n; ++p) {
    const Event& e = s[static_cast<std::size_t>(p)];
    std::map<std::pair<int, std::vector<Mark>>, std::uint64_t> next;
    for (const auto& [cfg, count] : cur) {
      for (int ti : out[static_cast<std::size_t>(cfg.first)]) {
        const Transition& t = a.delta[static_cast<std::size_t>(ti)];
        if (!t.guard.eval(e)) continue;
        std::vector<Mark> marks = cfg.second;
        append_marks(marks, p, t.labels);
        next[{t.to, std::move(marks)}] += count;
      }
    }
    cur = std::move(next);
  }
  std::map<ComplexEvent, std::uint64_t> result;
  for (const auto& [cfg, count] : cur) {
    if (a.is_final(cfg.first)) result[ComplexEvent(cfg.second)] += count;
  }
  return result;
}

}  // namespace socel
