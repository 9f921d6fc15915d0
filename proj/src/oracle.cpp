#include "socel/oracle.hpp"

#include <algorithm>

#include "socel/error.hpp"

namespace socel {

const CeSet& Oracle::eval(const Formula& f, Position i, Position j) {
  if (i < 0 || i > j || j >= static_cast<Position>(s_.size())) {
    throw Error(ErrorKind::Range, "evaluation window outside the stream");
  }
  if (roots_.empty() || roots_.back().id() != f.id()) roots_.push_back(f);
  return get(f, i, j);
}

CeSet Oracle::eval_at(const Formula& f, Position n) {
  if (!memoize_) scratch_.clear();
  return eval(f, 0, n);
}

const CeSet& Oracle::get(const Formula& f, Position i, Position j) {
  if (!memoize_) {
    scratch_.push_back(compute(f, i, j));
    return scratch_.back();
  }
  const auto end = static_cast<std::size_t>(j);
  if (memo_.size() <= end) memo_.resize(end + 1);
  Key key{f.id(), i};
  auto it = memo_[end].find(key);
  if (it != memo_[end].end()) return it->second;
  CeSet value = compute(f, i, j);
  return memo_[end].emplace(key, std::move(value)).first->second;
}

std::size_t Oracle::memo_size() const {
  std::size_t n = 0;
  for (const auto& bucket : memo_) n += bucket.size();
  return n;
}

void Oracle::truncate(Position length) {
  const auto keep = static_cast<std::size_t>(std::max<Position>(length, 0));
  if (memo_.size() > keep) memo_.resize(keep);
}

bool Oracle::filter_holds(const std::vector<SoAtom>& atoms, const ComplexEvent& c) const {
  for (const auto& atom : atoms) {
    if (atom.pred.kind() == SoPred::Kind::UnivExt) {
      Label a = atom.args[0];
      for (const auto& m : c.marks()) {
        if (m.label == a && !atom.pred.pred().eval(s_[static_cast<std::size_t>(m.pos)])) return false;
      }
      continue;
    }
    std::vector<EventSet> args;
    for (Label a : atom.args) {
      EventSet set;
      for (const auto& m : c.marks()) {
        if (m.label == a) set.emplace_back(m.pos, &s_[static_cast<std::size_t>(m.pos)]);
      }
      args.push_back(std::move(set));
    }
    if (!atom.pred.eval(args)) return false;
  }
  return true;
}

namespace {

void append_concats(const CeSet& left, const CeSet& right, CeSet& out) {
  for (const auto& c1 : left) {
    for (const auto& c2 : right) {
      if (auto c = concat(c1, c2)) out.push_back(std::move(*c));
    }
  }
}

// ':' junction: left parts end exactly at k, right parts start at k + 1.
void append_adjacent(const CeSet& left, const CeSet& right, Position k, CeSet& out) {
  for (const auto& c1 : left) {
    if (c1.empty() || c1.max() != k) continue;
    for (const auto& c2 : right) {
      if (c2.empty() || c2.min() != k + 1) continue;
      if (auto c = concat(c1, c2)) out.push_back(std::move(*c));
    }
  }
}

}  // namespace

CeSet Oracle::compute(const Formula& f, Position i, Position j) {
  CeSet out;
  switch (f.op()) {
    case Op::Atom:
      if (s_[static_cast<std::size_t>(j)].type() == f.rel()) out.push_back(ComplexEvent::single(f.rel(), j));
      return out;
    case Op::In:
      for (const auto& c : get(f.child(), i, j)) out.push_back(extend(c, f.label()));
      break;
    case Op::Rename:
      for (const auto& c : get(f.child(), i, j)) out.push_back(rename(c, f.label(), f.label_to()));
      break;
    case Op::Filter:
      for (const auto& c : get(f.child(), i, j)) {
        if (filter_holds(f.atoms(), c)) out.push_back(c);
      }
      return out;
    case Op::Project:
      for (const auto& c : get(f.child(), i, j)) out.push_back(project(c, f.keep()));
      break;
    case Op::Start:
      for (const auto& c : get(f.child(), i, j)) {
        if (c.min() == i) out.push_back(c);
      }
      return out;
    case Op::Strict:
      for (const auto& c : get(f.child(), i, j)) {
        if (support_is_interval(c)) out.push_back(c);
      }
      return out;
    case Op::Or: {
      const CeSet& a = get(f.left(), i, j);
      const CeSet& b = get(f.right(), i, j);
      std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
      return out;
    }
    case Op::And: {
      const CeSet& a = get(f.left(), i, j);
      const CeSet& b = get(f.right(), i, j);
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
      return out;
    }
    case Op::Seq:
      for (Position k = i; k < j; ++k) {
        const CeSet& left = get(f.left(), i, k);
        if (left.empty()) continue;
        append_concats(left, get(f.right(), k + 1, j), out);
      }
      break;
    case Op::Plus:
      out = get(f.child(), i, j);
      for (Position k = i; k < j; ++k) {
        const CeSet& left = get(f.child(), i, k);
        if (left.empty()) continue;
        append_concats(left, get(f, k + 1, j), out);
      }
      break;
    case Op::StrictSeq:
      for (Position k = i; k < j; ++k) {
        const CeSet& left = get(f.left(), i, k);
        if (left.empty()) continue;
        append_adjacent(left, get(f.right(), k + 1, j), k, out);
      }
      break;
    case Op::StrictPlus:
      out = get(f.child(), i, j);
      for (Position k = i; k < j; ++k) {
        const CeSet& left = get(f.child(), i, k);
        if (left.empty()) continue;
        append_adjacent(left, get(f, k + 1, j), k, out);
      }
      break;
    case Op::All:
      for (Position i1 = i; i1 <= j; ++i1) {
        for (Position j1 = i1; j1 <= j; ++j1) {
          const CeSet& a = get(f.left(), i1, j1);
          if (a.empty()) continue;
          for (Position i2 = i; i2 <= j; ++i2) {
            if (std::min(i1, i2) != i) continue;
            for (Position j2 = i2; j2 <= j; ++j2) {
              if (std::max(j1, j2) != j) continue;
              for (const auto& c2 : get(f.right(), i2, j2)) {
                for (const auto& c1 : a) out.push_back(unite(c1, c2));
              }
            }
          }
        }
      }
      break;
    case Op::Unless:
      for (Position i2 = i; i2 <= j; ++i2) {
        for (Position j2 = i2; j2 <= j; ++j2) {
          if (!get(f.right(), i2, j2).empty()) return out;
        }
      }
      return get(f.left(), i, j);
  }
  normalize(out);
  return out;
}

CeSet eval_at(const Formula& f, const Stream& s, Position n) {
  Oracle o(s);
  return o.eval_at(f, n);
}

std::vector<CeSet> eval_all_positions(const Formula& f, const Stream& s) {
  Oracle o(s);
  std::vector<CeSet> out;
  for (Position n = 0; n < static_cast<Position>(s.size()); ++n) out.push_back(o.eval_at(f, n));
  return out;
}

std::vector<ComplexEvent> enumerate_all_complex_events(const LabelSet& labels, Position n) {
  std::size_t bits = labels.size() * static_cast<std::size_t>(n + 1);
  if (n < 0 || bits > kEnumerateCap) {
    throw Error(ErrorKind::Capacity, "complex-event enumeration over " + std::to_string(bits) +
                                         " (label, position) pairs exceeds the limit of " +
                                         std::to_string(kEnumerateCap));
  }
  std::vector<ComplexEvent> out;
  out.reserve(std::size_t{1} << bits);
  for (std::size_t mask = 0; mask < (std::size_t{1} << bits); ++mask) {
    std::vector<Mark> marks;
    for (std::size_t b = 0; b < bits; ++b) {
      if ((mask >> b) & 1) {
        marks.push_back({static_cast<Position>(b / labels.size()), labels[b % labels.size()]});
      }
    }
    out.emplace_back(std::move(marks));
  }
  return out;
}

}  // namespace socel
