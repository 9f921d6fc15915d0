#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace socel {

using Position = std::int64_t;
inline constexpr Position kPosInf = std::numeric_limits<Position>::max();
inline constexpr Position kNegInf = std::numeric_limits<Position>::min();

// Interned identifier. Relation names and second-order labels share one
// namespace. Ordering is by interning order, not by name; use by_name() where
// a stable textual order is needed.
class Label {
 public:
  Label() = default;
  explicit Label(std::string_view name);

  const std::string& name() const;
  std::uint32_t id() const { return id_; }
  bool valid() const { return id_ != 0; }
  // Names starting with "_g" are reserved for labels generated by rewrites.
  bool reserved() const;

  static Label fresh();

  friend bool operator==(Label a, Label b) { return a.id_ == b.id_; }
  friend std::strong_ordering operator<=>(Label a, Label b) { return a.id_ <=> b.id_; }

 private:
  std::uint32_t id_ = 0;
};

inline constexpr std::string_view kReservedPrefix = "_g";

struct LabelNameLess {
  bool operator()(Label a, Label b) const { return a.name() < b.name(); }
};

// Sorted (by id), duplicate free.
using LabelSet = std::vector<Label>;
LabelSet make_label_set(std::vector<Label> labels);
bool contains(const LabelSet& s, Label l);
LabelSet set_union(const LabelSet& a, const LabelSet& b);
LabelSet set_intersection(const LabelSet& a, const LabelSet& b);
std::vector<std::string> names_sorted(const LabelSet& s);

using Value = std::variant<double, std::string>;
std::string value_to_string(const Value& v);

enum class ValueType { Number, String };

struct Attribute {
  std::string name;
  ValueType type = ValueType::Number;
};

class Schema {
 public:
  void add_relation(const std::string& name, std::vector<Attribute> attrs);
  bool has_relation(std::string_view name) const;
  const std::vector<Attribute>& attributes(std::string_view rel) const;
  // True if some relation declares the attribute.
  bool has_attribute(std::string_view attr) const;
  std::vector<std::string> relation_names() const;
  LabelSet relation_labels() const;
  const std::map<std::string, std::vector<Attribute>, std::less<>>& relations() const { return rels_; }

  static Schema from_json(std::string_view text);
  std::string to_json() const;

 private:
  std::map<std::string, std::vector<Attribute>, std::less<>> rels_;
};

class Event {
 public:
  Event() = default;
  Event(std::string_view rel, std::vector<std::pair<std::string, Value>> attrs);

  Label type() const { return type_; }
  const std::string& rel() const { return type_.name(); }
  const Value* get(std::string_view attr) const;
  const std::vector<std::pair<std::string, Value>>& attrs() const { return attrs_; }

  // Throws Error(Stream) when the event does not match the schema.
  void validate(const Schema& schema) const;

  static Event from_json(std::string_view line);
  std::string to_json() const;
  std::string to_string() const;  // "T:-2" style, for diagnostics

  friend bool operator==(const Event& a, const Event& b) { return a.type_ == b.type_ && a.attrs_ == b.attrs_; }

 private:
  Label type_;
  std::vector<std::pair<std::string, Value>> attrs_;  // sorted by name
};

using Stream = std::vector<Event>;

// Reads newline-delimited JSON; errors name the 1-based line number.
Stream read_stream(std::string_view text, const Schema& schema);

struct Mark {
  Position pos;
  Label label;
  friend auto operator<=>(const Mark&, const Mark&) = default;
  friend bool operator==(const Mark&, const Mark&) = default;
};

// Finite map from labels to position sets, stored as the sorted set of
// (position, label) pairs. Empty entries are never stored, so structural
// equality is semantic equality.
class ComplexEvent {
 public:
  ComplexEvent() = default;
  ComplexEvent(std::initializer_list<std::pair<std::string_view, std::vector<Position>>> entries);
  explicit ComplexEvent(std::vector<Mark> marks);  // any order, duplicates allowed

  static ComplexEvent single(Label label, Position pos) { return ComplexEvent(std::vector<Mark>{{pos, label}}); }

  void insert(Label label, Position pos);
  bool empty() const { return marks_.empty(); }
  const std::vector<Mark>& marks() const { return marks_; }
  std::vector<Position> positions(Label label) const;
  bool has(Label label, Position pos) const;
  std::vector<Position> support() const;
  LabelSet labels() const;
  LabelSet labels_at(Position pos) const;
  Position min() const { return marks_.empty() ? kPosInf : marks_.front().pos; }
  Position max() const { return marks_.empty() ? kNegInf : marks_.back().pos; }

  std::map<std::string, std::vector<Position>> to_map() const;
  std::string to_json() const;  // canonical: sorted keys, sorted arrays

  friend auto operator<=>(const ComplexEvent&, const ComplexEvent&) = default;
  friend bool operator==(const ComplexEvent&, const ComplexEvent&) = default;

 private:
  std::vector<Mark> marks_;
};

// Sorted, duplicate-free set of complex events.
using CeSet = std::vector<ComplexEvent>;
void normalize(CeSet& s);
bool ce_set_contains(const CeSet& s, const ComplexEvent& c);

std::optional<ComplexEvent> concat(const ComplexEvent& c1, const ComplexEvent& c2);
ComplexEvent extend(const ComplexEvent& c, Label a);
ComplexEvent rename(const ComplexEvent& c, Label a, Label b);
ComplexEvent project(const ComplexEvent& c, const LabelSet& keep);
ComplexEvent unite(const ComplexEvent& c1, const ComplexEvent& c2);
ComplexEvent drop_reserved(const ComplexEvent& c);
bool support_is_interval(const ComplexEvent& c);

// Events of the stream at the positions of label a (duplicates collapsed).
std::vector<Event> select_tuples(const ComplexEvent& c, const Stream& s, Label a);
Stream induced_subsequence(const Stream& s, const ComplexEvent& c);
bool star_related(const Stream& s1, const ComplexEvent& c1, const Stream& s2, const ComplexEvent& c2);

// {"at": n, "event": {...}}
std::string output_record(Position at, const ComplexEvent& c);

}  // namespace socel
