#include "abstain/version_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace abstain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Far corner used as the "all zero" box when no positive has been seen.
constexpr double kFarAway = std::numeric_limits<double>::max();

}  // namespace

VersionSpace::VersionSpace(std::shared_ptr<const HypothesisFamily> family)
    : family_(std::move(family)) {
  if (!family_) throw std::invalid_argument("VersionSpace: null family");
  switch (family_->kind()) {
    case FamilyKind::Finite: {
      Bitset mask(family_->as<FiniteFamily>().rows.size());
      mask.set();
      state_ = FiniteState{std::move(mask)};
      break;
    }
    case FamilyKind::Threshold:
      state_ = ThresholdState{-kInf, kInf};
      break;
    case FamilyKind::IntervalUnion:
      state_ = IntervalState{std::make_shared<std::map<double, Label>>(), 0};
      break;
    case FamilyKind::Tree:
      state_ = TreeState{std::vector<signed char>(family_->as<TreeFamily>().size(), -1),
                         std::nullopt};
      break;
    case FamilyKind::Rectangle:
      state_ = RectangleState{};
      break;
  }
}

VersionSpace::VersionSpace(std::shared_ptr<const HypothesisFamily> family,
                           std::span<const LabeledExample> dataset)
    : VersionSpace(std::move(family)) {
  for (const auto& e : dataset) add(e);
}

std::vector<LabeledExample> VersionSpace::dataset() const {
  std::vector<LabeledExample> out;
  out.reserve(size_);
  for_each_example([&](const LabeledExample& e) { out.push_back(e); });
  std::reverse(out.begin(), out.end());
  return out;
}

void VersionSpace::add(const LabeledExample& example) {
  family_->check_point(example.point);
  if (!conflict_ && !std::holds_alternative<FiniteState>(state_) &&
      !feasible(std::span(&example, 1))) {
    conflict_ = true;
  }
  const Point& x = example.point;
  const Label y = example.label;
  std::visit(
      [&](auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FiniteState>) {
          const auto& col = family_->as<FiniteFamily>().columns[x.node_id()];
          if (y == Label::One) {
            s.mask &= col;
          } else {
            s.mask -= col;
          }
        } else if constexpr (std::is_same_v<S, ThresholdState>) {
          if (y == Label::One) {
            s.min_positive = std::min(s.min_positive, x.x());
          } else {
            s.max_negative = std::max(s.max_negative, x.x());
          }
        } else if constexpr (std::is_same_v<S, TreeState>) {
          const auto& tree = family_->as<TreeFamily>();
          const NodeId v = x.node_id();
          const Label on_chain = y ^ tree.reference(v);
          const signed char bit = static_cast<signed char>(as_int(on_chain));
          if (s.label[v] >= 0 && s.label[v] != bit) conflict_ = true;
          s.label[v] = bit;
          if (on_chain == Label::One &&
              (!s.deepest_positive || tree.depth(v) > tree.depth(*s.deepest_positive))) {
            s.deepest_positive = v;
          }
        } else if constexpr (std::is_same_v<S, IntervalState>) {
          interval_add(s, example);
        } else if constexpr (std::is_same_v<S, RectangleState>) {
          if (y == Label::One) {
            if (!s.closure) {
              auto c = x.coords();
              s.closure = Box{{c.begin(), c.end()}, {c.begin(), c.end()}};
            } else {
              auto c = x.coords();
              for (std::size_t i = 0; i < c.size(); ++i) {
                s.closure->lower[i] = std::min(s.closure->lower[i], c[i]);
                s.closure->upper[i] = std::max(s.closure->upper[i], c[i]);
              }
            }
          }
        }
      },
      state_);
  head_ = std::make_shared<const Node>(Node{example, head_});
  ++size_;
}

VersionSpace VersionSpace::restricted(const LabeledExample& example) const {
  VersionSpace copy = *this;
  copy.add(example);
  return copy;
}

bool VersionSpace::is_consistent() const {
  if (const auto* f = std::get_if<FiniteState>(&state_)) return f->mask.any();
  return !conflict_;
}

bool VersionSpace::feasible_with(const Point& x, Label y) const {
  LabeledExample e{x, y};
  return feasible(std::span(&e, 1));
}

bool VersionSpace::feasible(std::span<const LabeledExample> extra) const {
  if (!is_consistent()) return false;
  for (const auto& e : extra) family_->check_point(e.point);
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FiniteState>) {
          const auto& fam = family_->as<FiniteFamily>();
          Bitset m = s.mask;
          for (const auto& e : extra) {
            if (e.label == Label::One) {
              m &= fam.columns[e.point.node_id()];
            } else {
              m -= fam.columns[e.point.node_id()];
            }
          }
          return m.any();
        } else if constexpr (std::is_same_v<S, ThresholdState>) {
          double lo = s.max_negative;
          double hi = s.min_positive;
          for (const auto& e : extra) {
            if (e.label == Label::One) {
              hi = std::min(hi, e.point.x());
            } else {
              lo = std::max(lo, e.point.x());
            }
          }
          // Need t in (lo, hi] with 0 <= t <= 1.
          const double top = std::min(hi, 1.0);
          return top >= 0.0 && top > lo;
        } else if constexpr (std::is_same_v<S, IntervalState>) {
          return interval_feasible(s, extra);
        } else if constexpr (std::is_same_v<S, TreeState>) {
          return tree_feasible(s, extra);
        } else {
          return rectangle_feasible(s, extra);
        }
      },
      state_);
}

bool VersionSpace::tree_feasible(const TreeState& s, std::span<const LabeledExample> extra) const {
  const auto& tree = family_->as<TreeFamily>();
  std::optional<NodeId> deepest = s.deepest_positive;
  for (const auto& e : extra) {
    const NodeId v = e.point.node_id();
    if ((e.label ^ tree.reference(v)) != Label::One) continue;
    if (!deepest || tree.depth(v) > tree.depth(*deepest)) deepest = v;
  }
  if (!deepest) return true;  // the empty chain fits every negative
  if (s.deepest_positive && !tree.is_ancestor_or_self(*s.deepest_positive, *deepest)) return false;
  for (const auto& e : extra) {
    const NodeId v = e.point.node_id();
    const bool on_chain = (e.label ^ tree.reference(v)) == Label::One;
    const bool under = tree.is_ancestor_or_self(v, *deepest);
    if (on_chain && !under) return false;
    if (!on_chain && under) return false;
  }
  for (std::optional<NodeId> v = deepest; v; v = tree.parent(*v)) {
    if (s.label[*v] == 0) return false;
  }
  return true;
}

namespace {

// Change in the number of 1-runs when (v, y) is inserted between neighbours
// labeled `left` and `right` (absent neighbours count as 0).
long run_delta(bool left, bool right, Label y) {
  if (y == Label::One) return (left || right) ? (left && right ? -1 : 0) : 1;
  return (left && right) ? 1 : 0;
}

template <class Lookup>
bool neighbour_is_one(const std::map<double, Label>& m, double v, bool below, Lookup&& overlay) {
  std::optional<std::pair<double, Label>> best;
  auto consider = [&](const std::map<double, Label>& src) {
    if (below) {
      auto it = src.lower_bound(v);
      if (it == src.begin()) return;
      --it;
      if (!best || it->first > best->first) best = *it;
    } else {
      auto it = src.upper_bound(v);
      if (it == src.end()) return;
      if (!best || it->first < best->first) best = *it;
    }
  };
  consider(m);
  overlay(consider);
  return best && best->second == Label::One;
}

}  // namespace

bool VersionSpace::interval_feasible(const IntervalState& s,
                                     std::span<const LabeledExample> extra) const {
  const std::size_t d = family_->as<IntervalUnionFamily>().max_intervals;
  std::map<double, Label> added;
  auto with_added = [&](auto&& consider) { consider(added); };
  long runs = static_cast<long>(s.runs);
  for (const auto& e : extra) {
    const double v = e.point.x();
    if (e.label == Label::One && (v < 0.0 || v > 1.0)) return false;
    if (auto it = s.points->find(v); it != s.points->end()) {
      if (it->second != e.label) return false;
      continue;
    }
    if (auto it = added.find(v); it != added.end()) {
      if (it->second != e.label) return false;
      continue;
    }
    const bool left = neighbour_is_one(*s.points, v, true, with_added);
    const bool right = neighbour_is_one(*s.points, v, false, with_added);
    runs += run_delta(left, right, e.label);
    added.emplace(v, e.label);
  }
  return runs <= static_cast<long>(d);
}

void VersionSpace::interval_add(IntervalState& s, const LabeledExample& e) {
  const double v = e.point.x();
  if (auto it = s.points->find(v); it != s.points->end()) return;
  auto none = [](auto&&) {};
  const bool left = neighbour_is_one(*s.points, v, true, none);
  const bool right = neighbour_is_one(*s.points, v, false, none);
  s.runs = static_cast<std::size_t>(static_cast<long>(s.runs) + run_delta(left, right, e.label));
  if (s.points.use_count() > 1) s.points = std::make_shared<std::map<double, Label>>(*s.points);
  s.points->emplace(v, e.label);
}

bool VersionSpace::rectangle_feasible(const RectangleState& s,
                                      std::span<const LabeledExample> extra) const {
  std::optional<Box> closure = s.closure;
  for (const auto& e : extra) {
    if (e.label != Label::One) continue;
    auto c = e.point.coords();
    if (!closure) {
      closure = Box{{c.begin(), c.end()}, {c.begin(), c.end()}};
      continue;
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
      closure->lower[i] = std::min(closure->lower[i], c[i]);
      closure->upper[i] = std::max(closure->upper[i], c[i]);
    }
  }
  if (!closure) return true;
  for (const auto& e : extra) {
    if (e.label == Label::Zero && box_contains(*closure, e.point)) return false;
  }
  bool ok = true;
  for_each_example([&](const LabeledExample& e) {
    if (ok && e.label == Label::Zero && box_contains(*closure, e.point)) ok = false;
  });
  return ok;
}

DisagreementStatus VersionSpace::disagreement_status(const Point& x) const {
  if (!is_consistent()) throw EmptyVersionSpace();
  const bool can_zero = feasible_with(x, Label::Zero);
  const bool can_one = feasible_with(x, Label::One);
  if (can_zero && can_one) return DisagreementStatus::disagreement();
  return DisagreementStatus::agreed_on(can_one ? Label::One : Label::Zero);
}

bool VersionSpace::shatters(std::span<const Point> points) const {
  const auto pts = distinct_points(points);
  if (pts.empty()) throw std::invalid_argument("shatters: empty point set");
  for (const auto& p : pts) family_->check_point(p);
  if (!is_consistent()) return false;
  if (const auto* f = std::get_if<FiniteState>(&state_)) {
    std::vector<NodeId> ids;
    ids.reserve(pts.size());
    for (const auto& p : pts) ids.push_back(p.node_id());
    return rows_shatter(family_->as<FiniteFamily>().rows, f->mask, ids);
  }
  const std::size_t k = pts.size();
  if (k >= 32) throw std::invalid_argument("shatters: too many points");
  std::vector<LabeledExample> pattern;
  pattern.reserve(k);
  for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
    pattern.clear();
    for (std::size_t j = 0; j < k; ++j) pattern.push_back({pts[j], label_of((bits >> j) & 1U)});
    if (!feasible(pattern)) return false;
  }
  return true;
}

Hypothesis VersionSpace::canonical_hypothesis() const {
  if (!is_consistent()) throw EmptyVersionSpace();
  return std::visit(
      [&](const auto& s) -> Hypothesis {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FiniteState>) {
          return FiniteRow{s.mask.find_first()};
        } else if constexpr (std::is_same_v<S, ThresholdState>) {
          if (s.max_negative < 0.0) return Threshold{0.0};
          return Threshold{std::nextafter(s.max_negative, kInf)};
        } else if constexpr (std::is_same_v<S, IntervalState>) {
          IntervalSet out;
          bool in_run = false;
          for (const auto& [x, y] : *s.points) {
            if (y == Label::One) {
              if (!in_run) out.intervals.emplace_back(x, x);
              out.intervals.back().second = x;
              in_run = true;
            } else {
              in_run = false;
            }
          }
          return out;
        } else if constexpr (std::is_same_v<S, TreeState>) {
          return TreeChain{s.deepest_positive};
        } else {
          if (s.closure) return *s.closure;
          const auto p = family_->as<RectangleFamily>().dimension;
          return Box{std::vector<double>(p, kFarAway), std::vector<double>(p, kFarAway)};
        }
      },
      state_);
}

const Bitset& VersionSpace::consistent_rows() const {
  if (const auto* f = std::get_if<FiniteState>(&state_)) return f->mask;
  throw std::logic_error("consistent_rows: not a finite family");
}

VersionSpace restrict(const VersionSpace& vs, const LabeledExample& example) {
  return vs.restricted(example);
}

DisagreementStatus disagreement_status(const VersionSpace& vs, const Point& x) {
  return vs.disagreement_status(x);
}

bool shatters(const VersionSpace& vs, std::span<const Point> points) {
  return vs.shatters(points);
}

std::vector<Point> distinct_points(std::span<const Point> points) {
  std::vector<Point> out(points.begin(), points.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace abstain
