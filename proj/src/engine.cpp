#include "socel/engine.hpp"

#include <algorithm>
#include <map>

#include "socel/error.hpp"

namespace socel {

Engine::Engine(Ucea a, std::size_t compact_every) : a_(std::move(a)), compact_every_(compact_every) {
  a_.validate();
  if (a_.initial.size() > 1) {
    throw Error(ErrorKind::Precondition, "the engine needs a single initial state; determinize first");
  }
  if (auto bad = find_nondeterminism(a_)) {
    const auto& t1 = a_.delta[static_cast<std::size_t>(bad->first)];
    const auto& t2 = a_.delta[static_cast<std::size_t>(bad->second)];
    throw Error(ErrorKind::Precondition,
                "automaton is not I/O-deterministic: transitions " + std::to_string(bad->first) + " and " +
                    std::to_string(bad->second) + " leave " + a_.state_name(t1.from) + " with the same labels [" +
                    [&] {
                      std::string s;
                      for (const auto& n : names_sorted(t1.labels)) s += (s.empty() ? "" : ",") + n;
                      return s;
                    }() +
                    "] and guards '" + t1.guard.print() + "', '" + t2.guard.print() + "' that may overlap");
  }
  out_ = a_.outgoing();
  std::map<LabelSet, int> index;
  for (const auto& t : a_.delta) {
    auto [it, fresh] = index.emplace(t.labels, static_cast<int>(label_sets_.size()));
    if (fresh) label_sets_.push_back(t.labels);
    transition_labels_.push_back(it->second);
  }
  label_sets_.push_back({});
  nodes_.push_back(Node{-1, static_cast<int>(label_sets_.size()) - 1, kNone, kNone, kNone});
  lists_.assign(static_cast<std::size_t>(a_.num_states), {kNone, kNone});
  staged_ = lists_;
  // An automaton trimmed to nothing has no initial state and no output.
  if (!a_.initial.empty()) lists_[static_cast<std::size_t>(a_.initial[0])] = {0, 0};
  stats_.live_nodes = 1;
}

Engine::~Engine() = default;

void Engine::append_node(std::vector<std::pair<int, int>>& lists, int q, int node) {
  auto& [first, last] = lists[static_cast<std::size_t>(q)];
  if (first == kNone) {
    first = last = node;
  } else {
    nodes_[static_cast<std::size_t>(last)].next = node;
    last = node;
  }
}

// At most one empty-label transition fires per source state and event, so
// each list is spliced into at most one new list and a tail's `next` is
// written at most once.
void Engine::append_list(std::vector<std::pair<int, int>>& lists, int q, std::pair<int, int> seg) {
  auto& [first, last] = lists[static_cast<std::size_t>(q)];
  if (first == kNone) {
    first = seg.first;
  } else {
    nodes_[static_cast<std::size_t>(last)].next = seg.first;
  }
  last = seg.second;
}

void Engine::step(const Event& e) {
  ++n_;
  std::uint64_t ops = 0;
  for (int p = 0; p < a_.num_states; ++p) {
    const auto seg = lists_[static_cast<std::size_t>(p)];
    if (seg.first == kNone) continue;
    for (int ti : out_[static_cast<std::size_t>(p)]) {
      const Transition& t = a_.delta[static_cast<std::size_t>(ti)];
      ++ops;
      if (!t.guard.eval(e)) continue;
      ++ops;
      if (t.labels.empty()) {
        append_list(staged_, t.to, seg);
      } else {
        nodes_.push_back(Node{n_, transition_labels_[static_cast<std::size_t>(ti)], seg.first, seg.second, kNone});
        ++stats_.nodes_allocated;
        append_node(staged_, t.to, static_cast<int>(nodes_.size()) - 1);
      }
    }
  }
  lists_.swap(staged_);
  std::fill(staged_.begin(), staged_.end(), std::pair<int, int>{kNone, kNone});
  ++stats_.events;
  stats_.ops += ops;
  stats_.last_ops = ops;
  if (compact_every_ != 0 && stats_.events % compact_every_ == 0 && live_snapshots_ == 0) compact();
  stats_.live_nodes = nodes_.size();
}

std::size_t Engine::walk(const std::vector<std::pair<int, int>>& lists,
                         const std::function<void(const ComplexEvent&)>& out) const {
  struct Frame {
    int cur;
    int last;
    std::size_t marks;  // marks pushed by the node that opened this frame
  };
  std::size_t count = 0;
  std::vector<Mark> marks;
  std::vector<Frame> stack;
  for (int q : a_.final_states) {
    const auto [first, last] = lists[static_cast<std::size_t>(q)];
    if (first == kNone) continue;
    stack.push_back({first, last, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.cur == kNone) {
        marks.resize(marks.size() - f.marks);
        stack.pop_back();
        continue;
      }
      const Node& node = nodes_[static_cast<std::size_t>(f.cur)];
      f.cur = f.cur == f.last ? kNone : node.next;
      if (node.top == kNone) {
        out(ComplexEvent(marks));
        ++count;
        continue;
      }
      const LabelSet& ls = label_sets_[static_cast<std::size_t>(node.labels)];
      for (Label l : ls) marks.push_back({node.time, l});
      stack.push_back({node.top, node.bot, ls.size()});
    }
  }
  return count;
}

std::size_t Engine::enumerate(const std::function<void(const ComplexEvent&)>& out) const {
  if (n_ < 0) return 0;
  return walk(lists_, out);
}

CeSet Engine::results() const {
  CeSet out;
  enumerate([&](const ComplexEvent& c) { out.push_back(c); });
  normalize(out);
  return out;
}

Engine::Snapshot::Snapshot(const Engine* e, Position at, std::vector<std::pair<int, int>> lists)
    : engine_(e), at_(at), lists_(std::move(lists)) {
  ++engine_->live_snapshots_;
}

Engine::Snapshot::Snapshot(Snapshot&& o) noexcept : engine_(o.engine_), at_(o.at_), lists_(std::move(o.lists_)) {
  o.engine_ = nullptr;
}

Engine::Snapshot::~Snapshot() {
  if (engine_ != nullptr) --engine_->live_snapshots_;
}

std::size_t Engine::Snapshot::enumerate(const std::function<void(const ComplexEvent&)>& out) const {
  if (at_ < 0) return 0;
  return engine_->walk(lists_, out);
}

Engine::Snapshot Engine::snapshot() const { return Snapshot(this, n_, lists_); }

std::vector<std::pair<Position, LabelSet>> Engine::list(int q) const {
  std::vector<std::pair<Position, LabelSet>> out;
  auto [cur, last] = lists_.at(static_cast<std::size_t>(q));
  while (cur != kNone) {
    const Node& node = nodes_[static_cast<std::size_t>(cur)];
    out.emplace_back(node.time, label_sets_[static_cast<std::size_t>(node.labels)]);
    cur = cur == last ? kNone : node.next;
  }
  return out;
}

// Keeps the nodes reachable from the current lists and renumbers them in
// their original order, so the sentinel stays at index 0.
void Engine::compact() {
  std::vector<char> keep(nodes_.size(), 0);
  keep[0] = 1;
  std::vector<std::pair<int, int>> work;
  for (const auto& seg : lists_) {
    if (seg.first != kNone) work.push_back(seg);
  }
  while (!work.empty()) {
    auto [cur, last] = work.back();
    work.pop_back();
    while (cur != kNone) {
      const Node& node = nodes_[static_cast<std::size_t>(cur)];
      if (!keep[static_cast<std::size_t>(cur)]) {
        keep[static_cast<std::size_t>(cur)] = 1;
        if (node.top != kNone) work.emplace_back(node.top, node.bot);
      }
      cur = cur == last ? kNone : node.next;
    }
  }
  std::vector<int> remap(nodes_.size(), kNone);
  std::vector<Node> kept;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (keep[i]) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(nodes_[i]);
    }
  }
  auto fix = [&](int i) { return i == kNone ? kNone : remap[static_cast<std::size_t>(i)]; };
  for (auto& node : kept) {
    node.top = fix(node.top);
    node.bot = fix(node.bot);
    node.next = fix(node.next);  // dangling links are never followed
  }
  for (auto& seg : lists_) seg = {fix(seg.first), fix(seg.second)};
  nodes_ = std::move(kept);
  ++stats_.compactions;
}

}  // namespace socel
