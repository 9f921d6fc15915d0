#include "socel/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "socel/error.hpp"

namespace socel {

using json = nlohmann::json;

namespace {

struct LabelRegistry {
  std::shared_mutex mu;
  std::deque<std::string> names{""};
  std::unordered_map<std::string, std::uint32_t> ids{{"", 0}};
};

LabelRegistry& registry() {
  static LabelRegistry r;
  return r;
}

std::atomic<std::uint64_t> fresh_counter{0};

}  // namespace

Label::Label(std::string_view name) {
  auto& r = registry();
  std::string key(name);
  {
    std::shared_lock lock(r.mu);
    auto it = r.ids.find(key);
    if (it != r.ids.end()) {
      id_ = it->second;
      return;
    }
  }
  std::unique_lock lock(r.mu);
  auto [it, inserted] = r.ids.emplace(key, static_cast<std::uint32_t>(r.names.size()));
  if (inserted) r.names.push_back(key);
  id_ = it->second;
}

const std::string& Label::name() const {
  auto& r = registry();
  std::shared_lock lock(r.mu);
  return r.names[id_];
}

bool Label::reserved() const { return name().starts_with(kReservedPrefix); }

Label Label::fresh() {
  auto& r = registry();
  for (;;) {
    std::string name = std::string(kReservedPrefix) + std::to_string(++fresh_counter);
    std::unique_lock lock(r.mu);
    if (r.ids.count(name)) continue;
    auto id = static_cast<std::uint32_t>(r.names.size());
    r.ids.emplace(name, id);
    r.names.push_back(name);
    Label l;
    l.id_ = id;
    return l;
  }
}

LabelSet make_label_set(std::vector<Label> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

bool contains(const LabelSet& s, Label l) { return std::binary_search(s.begin(), s.end(), l); }

LabelSet set_union(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

LabelSet set_intersection(const LabelSet& a, const LabelSet& b) {
  LabelSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::string> names_sorted(const LabelSet& s) {
  std::vector<std::string> out;
  for (Label l : s) out.push_back(l.name());
  std::sort(out.begin(), out.end());
  return out;
}

std::string value_to_string(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isfinite(*d) && std::floor(*d) == *d && std::fabs(*d) < 1e15) {
      return std::to_string(static_cast<long long>(*d));
    }
    std::ostringstream os;
    os.precision(17);
    os << *d;
    return os.str();
  }
  return json(std::get<std::string>(v)).dump();
}

// ---------------------------------------------------------------- Schema

void Schema::add_relation(const std::string& name, std::vector<Attribute> attrs) {
  if (name.empty()) throw Error(ErrorKind::Static, "schema: empty relation name");
  if (rels_.count(name)) throw Error(ErrorKind::Static, "schema: duplicate relation '" + name + "'");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == "type") throw Error(ErrorKind::Static, "schema: attribute name 'type' is reserved");
    for (std::size_t j = 0; j < i; ++j) {
      if (attrs[i].name == attrs[j].name) {
        throw Error(ErrorKind::Static, "schema: duplicate attribute '" + attrs[i].name + "' in " + name);
      }
    }
  }
  rels_.emplace(name, std::move(attrs));
}

bool Schema::has_relation(std::string_view name) const { return rels_.find(name) != rels_.end(); }

const std::vector<Attribute>& Schema::attributes(std::string_view rel) const {
  auto it = rels_.find(rel);
  if (it == rels_.end()) throw Error(ErrorKind::Static, "unknown relation '" + std::string(rel) + "'");
  return it->second;
}

bool Schema::has_attribute(std::string_view attr) const {
  for (const auto& [_, attrs] : rels_) {
    for (const auto& a : attrs) {
      if (a.name == attr) return true;
    }
  }
  return false;
}

std::vector<std::string> Schema::relation_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : rels_) out.push_back(name);
  return out;
}

LabelSet Schema::relation_labels() const {
  std::vector<Label> out;
  for (const auto& [name, _] : rels_) out.emplace_back(name);
  return make_label_set(std::move(out));
}

Schema Schema::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Static, std::string("schema: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("relations") || !j["relations"].is_object()) {
    throw Error(ErrorKind::Static, "schema: expected {\"relations\": {...}}");
  }
  Schema s;
  for (const auto& [rel, attrs] : j["relations"].items()) {
    if (!attrs.is_array()) throw Error(ErrorKind::Static, "schema: attributes of " + rel + " must be an array");
    std::vector<Attribute> out;
    for (const auto& a : attrs) {
      if (a.is_string()) {
        out.push_back({a.get<std::string>(), ValueType::Number});
      } else if (a.is_object() && a.contains("name") && a["name"].is_string()) {
        Attribute attr{a["name"].get<std::string>(), ValueType::Number};
        if (a.contains("type")) {
          auto t = a["type"].get<std::string>();
          if (t == "string") {
            attr.type = ValueType::String;
          } else if (t != "number") {
            throw Error(ErrorKind::Static, "schema: unknown attribute type '" + t + "'");
          }
        }
        out.push_back(attr);
      } else {
        throw Error(ErrorKind::Static, "schema: bad attribute entry in " + rel);
      }
    }
    s.add_relation(rel, std::move(out));
  }
  return s;
}

std::string Schema::to_json() const {
  json rels = json::object();
  for (const auto& [name, attrs] : rels_) {
    json arr = json::array();
    for (const auto& a : attrs) {
      arr.push_back({{"name", a.name}, {"type", a.type == ValueType::Number ? "number" : "string"}});
    }
    rels[name] = arr;
  }
  return json{{"relations", rels}}.dump();
}

// ---------------------------------------------------------------- Event

Event::Event(std::string_view rel, std::vector<std::pair<std::string, Value>> attrs)
    : type_(rel), attrs_(std::move(attrs)) {
  std::sort(attrs_.begin(), attrs_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

const Value* Event::get(std::string_view attr) const {
  for (const auto& [name, v] : attrs_) {
    if (name == attr) return &v;
  }
  return nullptr;
}

void Event::validate(const Schema& schema) const {
  if (!schema.has_relation(rel())) throw Error(ErrorKind::Stream, "unknown relation '" + rel() + "'");
  const auto& decl = schema.attributes(rel());
  if (decl.size() != attrs_.size()) {
    throw Error(ErrorKind::Stream, "event of type " + rel() + " has " + std::to_string(attrs_.size()) +
                                       " attributes, schema declares " + std::to_string(decl.size()));
  }
  for (const auto& a : decl) {
    const Value* v = get(a.name);
    if (!v) throw Error(ErrorKind::Stream, "event of type " + rel() + " lacks attribute '" + a.name + "'");
    bool is_num = std::holds_alternative<double>(*v);
    if (is_num != (a.type == ValueType::Number)) {
      throw Error(ErrorKind::Stream, "attribute '" + a.name + "' of " + rel() + " has the wrong value type");
    }
  }
}

Event Event::from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Stream, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorKind::Stream, "event must be an object with a string \"type\"");
  }
  std::vector<std::pair<std::string, Value>> attrs;
  for (const auto& [k, v] : j.items()) {
    if (k == "type") continue;
    if (v.is_number()) {
      attrs.emplace_back(k, v.get<double>());
    } else if (v.is_string()) {
      attrs.emplace_back(k, v.get<std::string>());
    } else {
      throw Error(ErrorKind::Stream, "attribute '" + k + "' must be a number or a string");
    }
  }
  return Event(j["type"].get<std::string>(), std::move(attrs));
}

std::string Event::to_json() const {
  json j = json::object();
  j["type"] = rel();
  for (const auto& [k, v] : attrs_) {
    if (const auto* d = std::get_if<double>(&v)) {
      if (std::floor(*d) == *d && std::fabs(*d) < 1e15) {
        j[k] = static_cast<long long>(*d);
      } else {
        j[k] = *d;
      }
    } else {
      j[k] = std::get<std::string>(v);
    }
  }
  return j.dump();
}

std::string Event::to_string() const {
  std::string out = rel();
  for (const auto& [k, v] : attrs_) {
    out += (attrs_.size() == 1 ? ":" : ":" + k + "=") + value_to_string(v);
  }
  return out;
}

Stream read_stream(std::string_view text, const Schema& schema) {
  Stream out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      Event e = Event::from_json(line);
      e.validate(schema);
      out.push_back(std::move(e));
    } catch (const Error& err) {
      throw Error(ErrorKind::Stream, "line " + std::to_string(line_no) + ": " + err.what());
    }
    if (end == text.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------- ComplexEvent

ComplexEvent::ComplexEvent(std::initializer_list<std::pair<std::string_view, std::vector<Position>>> entries) {
  for (const auto& [name, ps] : entries) {
    Label l(name);
    for (Position p : ps) marks_.push_back({p, l});
  }
  std::sort(marks_.begin(), marks_.end());
  marks_.erase(std::unique(marks_.begin(), marks_.end()), marks_.end());
}

ComplexEvent::ComplexEvent(std::vector<Mark> marks) : marks_(std::move(marks)) {
  std::sort(marks_.begin(), marks_.end());
  marks_.erase(std::unique(marks_.begin(), marks_.end()), marks_.end());
}

void ComplexEvent::insert(Label label, Position pos) {
  Mark m{pos, label};
  auto it = std::lower_bound(marks_.begin(), marks_.end(), m);
  if (it == marks_.end() || *it != m) marks_.insert(it, m);
}

std::vector<Position> ComplexEvent::positions(Label label) const {
  std::vector<Position> out;
  for (const auto& m : marks_) {
    if (m.label == label) out.push_back(m.pos);
  }
  return out;
}

bool ComplexEvent::has(Label label, Position pos) const {
  return std::binary_search(marks_.begin(), marks_.end(), Mark{pos, label});
}

std::vector<Position> ComplexEvent::support() const {
  std::vector<Position> out;
  for (const auto& m : marks_) {
    if (out.empty() || out.back() != m.pos) out.push_back(m.pos);
  }
  return out;
}

LabelSet ComplexEvent::labels() const {
  std::vector<Label> out;
  for (const auto& m : marks_) out.push_back(m.label);
  return make_label_set(std::move(out));
}

LabelSet ComplexEvent::labels_at(Position pos) const {
  LabelSet out;
  auto it = std::lower_bound(marks_.begin(), marks_.end(), Mark{pos, Label()});
  for (; it != marks_.end() && it->pos == pos; ++it) out.push_back(it->label);
  return out;
}

std::map<std::string, std::vector<Position>> ComplexEvent::to_map() const {
  std::map<std::string, std::vector<Position>> out;
  for (const auto& m : marks_) out[m.label.name()].push_back(m.pos);
  return out;
}

std::string ComplexEvent::to_json() const {
  json j = json::object();
  for (const auto& [name, ps] : to_map()) j[name] = ps;
  return j.dump();
}

void normalize(CeSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

bool ce_set_contains(const CeSet& s, const ComplexEvent& c) { return std::binary_search(s.begin(), s.end(), c); }

std::optional<ComplexEvent> concat(const ComplexEvent& c1, const ComplexEvent& c2) {
  if (!(c1.max() < c2.min())) return std::nullopt;
  std::vector<Mark> marks = c1.marks();
  marks.insert(marks.end(), c2.marks().begin(), c2.marks().end());
  return ComplexEvent(std::move(marks));
}

ComplexEvent extend(const ComplexEvent& c, Label a) {
  std::vector<Mark> marks = c.marks();
  for (Position p : c.support()) marks.push_back({p, a});
  return ComplexEvent(std::move(marks));
}

ComplexEvent rename(const ComplexEvent& c, Label a, Label b) {
  if (a == b) return c;
  std::vector<Mark> marks = c.marks();
  for (auto& m : marks) {
    if (m.label == a) m.label = b;
  }
  return ComplexEvent(std::move(marks));
}

ComplexEvent project(const ComplexEvent& c, const LabelSet& keep) {
  std::vector<Mark> marks;
  for (const auto& m : c.marks()) {
    if (contains(keep, m.label)) marks.push_back(m);
  }
  return ComplexEvent(std::move(marks));
}

ComplexEvent unite(const ComplexEvent& c1, const ComplexEvent& c2) {
  std::vector<Mark> marks = c1.marks();
  marks.insert(marks.end(), c2.marks().begin(), c2.marks().end());
  return ComplexEvent(std::move(marks));
}

ComplexEvent drop_reserved(const ComplexEvent& c) {
  std::vector<Mark> marks;
  for (const auto& m : c.marks()) {
    if (!m.label.reserved()) marks.push_back(m);
  }
  return ComplexEvent(std::move(marks));
}

bool support_is_interval(const ComplexEvent& c) {
  auto sup = c.support();
  return sup.empty() || sup.back() - sup.front() + 1 == static_cast<Position>(sup.size());
}

namespace {
void check_range(const ComplexEvent& c, const Stream& s) {
  if (!c.empty() && (c.min() < 0 || c.max() >= static_cast<Position>(s.size()))) {
    throw Error(ErrorKind::Range, "complex event position outside the stream");
  }
}
}  // namespace

std::vector<Event> select_tuples(const ComplexEvent& c, const Stream& s, Label a) {
  check_range(c, s);
  std::vector<Event> out;
  for (Position p : c.positions(a)) {
    const Event& e = s[static_cast<std::size_t>(p)];
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  return out;
}

Stream induced_subsequence(const Stream& s, const ComplexEvent& c) {
  check_range(c, s);
  Stream out;
  for (Position p : c.support()) out.push_back(s[static_cast<std::size_t>(p)]);
  return out;
}

bool star_related(const Stream& s1, const ComplexEvent& c1, const Stream& s2, const ComplexEvent& c2) {
  auto sup1 = c1.support();
  auto sup2 = c2.support();
  if (sup1.size() != sup2.size()) return false;
  if (induced_subsequence(s1, c1) != induced_subsequence(s2, c2)) return false;
  for (std::size_t k = 0; k < sup1.size(); ++k) {
    if (c1.labels_at(sup1[k]) != c2.labels_at(sup2[k])) return false;
  }
  return true;
}

std::string output_record(Position at, const ComplexEvent& c) {
  return "{\"at\":" + std::to_string(at) + ",\"event\":" + c.to_json() + "}";
}

}  // namespace socel
