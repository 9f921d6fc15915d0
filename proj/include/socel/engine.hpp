#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "socel/automaton.hpp"
#include "socel/model.hpp"

namespace socel {

struct EngineStats {
  std::uint64_t events = 0;
  std::uint64_t ops = 0;        // list operations and guard checks, all steps
  std::uint64_t last_ops = 0;   // same, latest step only
  std::uint64_t nodes_allocated = 0;
  std::uint64_t live_nodes = 0;  // arena size after the latest compaction or step
  std::uint64_t compactions = 0;
};

// Streaming evaluation of an I/O-deterministic automaton with a single
// initial state. After each step, the complex events of accepting runs over
// the prefix can be listed with delay proportional to their size.
class Engine {
 public:
  // Throws Error(Precondition) naming the offending transitions when the
  // automaton is not I/O-deterministic or has no single initial state.
  explicit Engine(Ucea a, std::size_t compact_every = 4096);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void step(const Event& e);
  // Position of the latest event, -1 before the first.
  Position position() const { return n_; }

  // Calls out once per complex event; returns the count. Order: final
  // states by id, then list order.
  std::size_t enumerate(const std::function<void(const ComplexEvent&)>& out) const;
  CeSet results() const;

  // Captured list heads of the final states. While any snapshot is alive the
  // engine skips compaction, so it can be enumerated after later steps.
  class Snapshot {
   public:
    Snapshot(Snapshot&&) noexcept;
    Snapshot& operator=(Snapshot&&) = delete;
    ~Snapshot();
    Position position() const { return at_; }
    std::size_t enumerate(const std::function<void(const ComplexEvent&)>& out) const;

   private:
    friend class Engine;
    Snapshot(const Engine* e, Position at, std::vector<std::pair<int, int>> lists);
    const Engine* engine_;
    Position at_;
    std::vector<std::pair<int, int>> lists_;
  };
  Snapshot snapshot() const;

  const EngineStats& stats() const { return stats_; }
  const Ucea& automaton() const { return a_; }
  // (time, labels) of the nodes in the current list of state q.
  std::vector<std::pair<Position, LabelSet>> list(int q) const;

 private:
  struct Node {
    Position time;
    int labels;  // index into label_sets_
    int top;
    int bot;
    int next;
  };
  static constexpr int kNone = -1;

  void append_node(std::vector<std::pair<int, int>>& lists, int q, int node);
  void append_list(std::vector<std::pair<int, int>>& lists, int q, std::pair<int, int> seg);
  std::size_t walk(const std::vector<std::pair<int, int>>& lists,
                   const std::function<void(const ComplexEvent&)>& out) const;
  void compact();

  Ucea a_;
  std::vector<std::vector<int>> out_;
  std::vector<int> transition_labels_;
  std::vector<LabelSet> label_sets_;
  std::vector<Node> nodes_;  // nodes_[0] is the run-start sentinel
  std::vector<std::pair<int, int>> lists_;   // (first, last) per state
  std::vector<std::pair<int, int>> staged_;
  Position n_ = -1;
  std::size_t compact_every_;
  mutable int live_snapshots_ = 0;
  EngineStats stats_;
};

}  // namespace socel
