#include "abstain/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "abstain/gamma.hpp"

namespace abstain {

std::string_view to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::None: return "none";
    case AdversaryKind::FixedSchedule: return "fixed_schedule";
    case AdversaryKind::BoundaryAttack: return "boundary_attack";
    case AdversaryKind::AttackabilitySearch: return "attackability_search";
    case AdversaryKind::RectangleProbe: return "rectangle_probe";
    case AdversaryKind::Custom: return "custom";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(std::string_view text) {
  for (auto k : {AdversaryKind::None, AdversaryKind::FixedSchedule, AdversaryKind::BoundaryAttack,
                 AdversaryKind::AttackabilitySearch, AdversaryKind::RectangleProbe,
                 AdversaryKind::Custom}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown adversary '" + std::string(text) + "'");
}

std::vector<std::pair<std::size_t, Point>> load_injection_file(const std::string& path,
                                                               PointKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open injection file '" + path + "'");
  std::vector<std::pair<std::size_t, Point>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::size_t t = 0;
    std::string point;
    if (!(ss >> t)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected a round number");
    }
    if (!(ss >> point)) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": missing point");
    out.emplace_back(t, parse_point(point, kind));
  }
  return out;
}

namespace {

bool learner_abstains(const VersionSpace& vs, const TreeGammaIndex& gamma, const TreeFamily& tree,
                      const Point& x, double alpha, Vc1Rule rule) {
  if (!vs.disagreement_status(x).in_disagreement()) return false;
  const std::size_t g0 = gamma.count(LabeledExample{x, Label::Zero});
  const std::size_t g1 = gamma.count(LabeledExample{x, Label::One});
  if (rule == Vc1Rule::MainText) {
    const std::size_t a0 = tree.reference(x.node_id()) == Label::One ? g1 : g0;
    return static_cast<double>(a0) < alpha;
  }
  return static_cast<double>(std::max(g0, g1)) < alpha;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t j = k;
  while (j > 0 && idx[j - 1] == n - k + j - 1) --j;
  if (j == 0) return false;
  ++idx[j - 1];
  for (std::size_t r = j; r < k; ++r) idx[r] = idx[r - 1] + 1;
  return true;
}

class NoAdversary : public Adversary {
 public:
  InjectionDecision decide(const AdversaryView&) override { return {}; }
  std::string_view name() const override { return "none"; }
};

class ScheduledAdversary : public Adversary {
 public:
  ScheduledAdversary(std::vector<std::pair<std::size_t, Point>> schedule, std::string name,
                     std::shared_ptr<const HypothesisFamily> family)
      : name_(std::move(name)) {
    for (auto& [t, p] : schedule) {
      family->check_point(p);
      if (!schedule_.emplace(t, std::move(p)).second) {
        throw std::invalid_argument("injection schedule lists round " + std::to_string(t) + " twice");
      }
    }
  }
  InjectionDecision decide(const AdversaryView& view) override {
    auto it = schedule_.find(view.t);
    if (it == schedule_.end()) return {};
    return {it->second};
  }
  std::string_view name() const override { return name_; }

 private:
  std::map<std::size_t, Point> schedule_;
  std::string name_;
};

class BoundaryAttack : public Adversary {
 public:
  BoundaryAttack(std::shared_ptr<const HypothesisFamily> family, Hypothesis target, double rate, Rng rng)
      : family_(std::move(family)), target_(std::move(target)), rate_(rate), rng_(std::move(rng)) {}

  InjectionDecision decide(const AdversaryView& view) override {
    if (!rng_.bernoulli(rate_)) return {};
    switch (family_->kind()) {
      case FamilyKind::Threshold: return threshold(view);
      case FamilyKind::IntervalUnion: return intervals(view);
      case FamilyKind::Finite:
      case FamilyKind::Tree: return disagreement_point(view);
      case FamilyKind::Rectangle: break;
    }
    return {};
  }
  std::string_view name() const override { return "boundary_attack"; }

 private:
  InjectionDecision threshold(const AdversaryView& view) {
    for (; consumed_ < view.history.size(); ++consumed_) {
      const auto& e = view.history[consumed_];
      const double v = e.point.x();
      if (e.label == Label::One) {
        hi_ = std::min(hi_, v);
      } else {
        lo_ = std::max(lo_, v);
      }
    }
    return {Point::scalar(lo_ + (hi_ - lo_) / 2.0)};
  }

  void absorb_intervals(const AdversaryView& view) {
    for (; consumed_ < view.history.size(); ++consumed_) {
      const auto& e = view.history[consumed_];
      auto [it, fresh] = seen_.emplace(e.point.x(), e.label);
      if (!fresh) continue;
      if (it != seen_.begin()) {
        auto prev = std::prev(it);
        mixed_.erase(prev->first);
        if (prev->second != it->second) mixed_.insert(prev->first);
      }
      auto next = std::next(it);
      if (next != seen_.end() && next->second != it->second) mixed_.insert(it->first);
    }
  }
  // First a target region no seen point has hit whose seen neighbours both
  // carry the other label; failing that, the gap between adjacent seen
  // points of different labels.
  InjectionDecision intervals(const AdversaryView& view) {
    absorb_intervals(view);
    const auto& seen = seen_;
    const auto& ivs = std::get<IntervalSet>(target_).intervals;

    std::vector<std::pair<double, double>> regions;  // maximal constant stretches of f*
    std::vector<Label> region_label;
    double cursor = 0.0;
    for (const auto& [a, b] : ivs) {
      if (a > cursor) {
        regions.emplace_back(cursor, a);
        region_label.push_back(Label::Zero);
      }
      regions.emplace_back(a, b);
      region_label.push_back(Label::One);
      cursor = b;
    }
    if (cursor < 1.0) {
      regions.emplace_back(cursor, 1.0);
      region_label.push_back(Label::Zero);
    }
    for (std::size_t r = 0; r < regions.size(); ++r) {
      const auto [a, b] = regions[r];
      const double mid = a + (b - a) / 2.0;
      if (evaluate(*family_, target_, Point::scalar(mid)) != region_label[r]) continue;
      auto right = seen.lower_bound(a);
      if (right != seen.end() && right->first <= b) continue;
      if (right == seen.end() || right == seen.begin()) continue;
      auto left = std::prev(right);
      if (left->second == right->second && left->second != region_label[r]) return {Point::scalar(mid)};
    }
    if (!mixed_.empty()) {
      auto it = seen.find(*mixed_.begin());
      auto next = std::next(it);
      return {Point::scalar(it->first + (next->first - it->first) / 2.0)};
    }
    if (seen.empty() && !ivs.empty()) return {Point::scalar(ivs[0].first + (ivs[0].second - ivs[0].first) / 2.0)};
    return {Point::scalar(rng_.uniform())};
  }

  InjectionDecision disagreement_point(const AdversaryView& view) {
    const std::size_t n = family_->finite_domain_size();
    std::vector<NodeId> dis;
    for (NodeId v = 0; v < n; ++v) {
      if (view.version_space->disagreement_status(Point::node(v)).in_disagreement()) dis.push_back(v);
    }
    if (dis.empty()) return {};
    return {Point::node(dis[rng_.index(dis.size())])};
  }

  std::shared_ptr<const HypothesisFamily> family_;
  Hypothesis target_;
  double rate_;
  Rng rng_;
  std::size_t consumed_ = 0;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::map<double, Label> seen_;
  std::set<double> mixed_;  // keys whose successor carries the other label
};

class AttackabilityAdversary : public Adversary {
 public:
  AttackabilityAdversary(std::shared_ptr<const HypothesisFamily> family, Hypothesis target,
                         DomainDistribution dist, AttackTarget learner, double rate,
                         std::size_t evaluations, Rng rng)
      : family_(std::move(family)),
        target_(std::move(target)),
        dist_(std::move(dist)),
        learner_(learner),
        rate_(rate),
        evaluations_(evaluations),
        rng_(std::move(rng)) {
    if (family_->kind() != FamilyKind::Tree) {
      throw std::invalid_argument("attackability_search: requires a tree family");
    }
  }

  InjectionDecision decide(const AdversaryView& view) override {
    if (!rng_.bernoulli(rate_)) return {};
    if (queue_.empty()) {
      const Point x = dist_.sample(rng_);
      AttackSearchOptions opts;
      opts.rule = learner_.rule;
      opts.max_evaluations = evaluations_;
      auto res = vc1_attack_search(x, view.history, family_, target_, learner_.alpha, opts);
      if (res.status == AttackStatus::Found) {
        for (auto& e : res.attack) queue_.push_back(std::move(e.point));
      }
    }
    if (!queue_.empty()) {
      Point p = std::move(queue_.front());
      queue_.pop_front();
      return {p};
    }
    const std::size_t n = family_->finite_domain_size();
    std::vector<NodeId> dis;
    for (NodeId v = 0; v < n; ++v) {
      if (view.version_space->disagreement_status(Point::node(v)).in_disagreement()) dis.push_back(v);
    }
    if (dis.empty()) return {};
    return {Point::node(dis[rng_.index(dis.size())])};
  }
  std::string_view name() const override { return "attackability_search"; }

 private:
  std::shared_ptr<const HypothesisFamily> family_;
  Hypothesis target_;
  DomainDistribution dist_;
  AttackTarget learner_;
  double rate_;
  std::size_t evaluations_;
  Rng rng_;
  std::deque<Point> queue_;
};

class RectangleProbe : public Adversary {
 public:
  RectangleProbe(std::shared_ptr<const HypothesisFamily> family, Hypothesis target, double rate, Rng rng)
      : family_(std::move(family)), target_(std::get<Box>(target)), rate_(rate), rng_(std::move(rng)) {
    if (family_->kind() != FamilyKind::Rectangle) {
      throw std::invalid_argument("rectangle_probe: requires a rectangle family");
    }
  }

  // Places a point between a closure face and the matching target face,
  // so the point is positive but outside the closure.
  InjectionDecision decide(const AdversaryView& view) override {
    if (!rng_.bernoulli(rate_)) return {};
    const std::size_t p = target_.lower.size();
    std::vector<Point> positives;
    for (const auto& e : view.history) {
      if (e.label == Label::One) positives.push_back(e.point);
    }
    std::vector<double> centre(p);
    if (positives.empty()) {
      for (std::size_t i = 0; i < p; ++i) centre[i] = target_.lower[i] + (target_.upper[i] - target_.lower[i]) / 2.0;
      return {Point::vector(std::move(centre))};
    }
    const Box closure = closure_rectangle(positives);
    std::vector<std::pair<std::size_t, bool>> faces;  // (coordinate, upper side)
    for (std::size_t i = 0; i < p; ++i) {
      centre[i] = closure.lower[i] + (closure.upper[i] - closure.lower[i]) / 2.0;
      if (target_.lower[i] < closure.lower[i]) faces.emplace_back(i, false);
      if (closure.upper[i] < target_.upper[i]) faces.emplace_back(i, true);
    }
    if (faces.empty()) return {};
    const auto [i, upper] = faces[rng_.index(faces.size())];
    centre[i] = upper ? closure.upper[i] + (target_.upper[i] - closure.upper[i]) / 2.0
                      : target_.lower[i] + (closure.lower[i] - target_.lower[i]) / 2.0;
    return {Point::vector(std::move(centre))};
  }
  std::string_view name() const override { return "rectangle_probe"; }

 private:
  std::shared_ptr<const HypothesisFamily> family_;
  Box target_;
  double rate_;
  Rng rng_;
};

class Budgeted : public Adversary {
 public:
  Budgeted(std::unique_ptr<Adversary> inner, std::size_t budget)
      : inner_(std::move(inner)), budget_(budget) {}
  InjectionDecision decide(const AdversaryView& view) override {
    if (used_ >= budget_) return {};
    auto d = inner_->decide(view);
    if (d.inject()) ++used_;
    return d;
  }
  std::string_view name() const override { return inner_->name(); }

 private:
  std::unique_ptr<Adversary> inner_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

}  // namespace

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config,
                                          std::shared_ptr<const HypothesisFamily> family,
                                          const Hypothesis& target, const DomainDistribution& dist,
                                          const AttackTarget& learner, Rng rng) {
  if (!(config.rate >= 0.0 && config.rate <= 1.0)) {
    throw std::invalid_argument("adversary rate must lie in [0, 1]");
  }
  std::unique_ptr<Adversary> adv;
  switch (config.strategy) {
    case AdversaryKind::None:
      adv = std::make_unique<NoAdversary>();
      break;
    case AdversaryKind::FixedSchedule:
      adv = std::make_unique<ScheduledAdversary>(config.schedule, "fixed_schedule", family);
      break;
    case AdversaryKind::Custom:
      adv = std::make_unique<ScheduledAdversary>(load_injection_file(config.file, family->point_kind()),
                                                 "custom", family);
      break;
    case AdversaryKind::BoundaryAttack:
      if (family->kind() == FamilyKind::Rectangle) {
        throw std::invalid_argument("boundary_attack: use rectangle_probe for rectangles");
      }
      adv = std::make_unique<BoundaryAttack>(family, target, config.rate, std::move(rng));
      break;
    case AdversaryKind::AttackabilitySearch:
      adv = std::make_unique<AttackabilityAdversary>(family, target, dist, learner, config.rate,
                                                     config.search_evaluations, std::move(rng));
      break;
    case AdversaryKind::RectangleProbe:
      adv = std::make_unique<RectangleProbe>(family, target, config.rate, std::move(rng));
      break;
  }
  if (config.budget) adv = std::make_unique<Budgeted>(std::move(adv), *config.budget);
  return adv;
}

AttackResult vc1_attack_search(const Point& x, std::span<const LabeledExample> dataset,
                               std::shared_ptr<const HypothesisFamily> family,
                               const Hypothesis& target, double alpha,
                               const AttackSearchOptions& options) {
  if (family->kind() != FamilyKind::Tree) {
    throw std::invalid_argument("vc1_attack_search: requires a tree family");
  }
  family->check_point(x);
  const auto& tree = family->as<TreeFamily>();
  VersionSpace base(family, dataset);
  if (!base.is_consistent()) throw std::invalid_argument("vc1_attack_search: dataset is not realizable");
  TreeGammaIndex base_gamma(tree);
  std::vector<char> present(tree.size(), 0);
  for (const auto& e : dataset) {
    base_gamma.add(e);
    present[e.point.node_id()] = 1;
  }

  std::vector<LabeledExample> candidates;
  for (NodeId v : tree.depth_order()) {
    if (v == x.node_id() || present[v]) continue;
    const Label y = evaluate(*family, target, Point::node(v));
    if (options.positives_only && y == tree.reference(v)) continue;
    candidates.push_back({Point::node(v), y});
  }
  const std::size_t cap = std::min(
      options.cap.value_or(static_cast<std::size_t>(std::floor(2.0 * std::max(alpha, 0.0)))),
      candidates.size());

  AttackResult result;
  for (std::size_t size = 0; size <= cap; ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t j = 0; j < size; ++j) idx[j] = j;
    do {
      if (result.evaluations++ >= options.max_evaluations) {
        result.status = AttackStatus::CapExceeded;
        return result;
      }
      VersionSpace vs = base;
      TreeGammaIndex gamma = base_gamma;
      for (auto i : idx) {
        vs.add(candidates[i]);
        gamma.add(candidates[i]);
      }
      if (learner_abstains(vs, gamma, tree, x, alpha, options.rule)) {
        result.status = AttackStatus::Found;
        for (auto i : idx) result.attack.push_back(candidates[i]);
        return result;
      }
    } while (size > 0 && next_combination(idx, candidates.size()));
  }
  result.status = AttackStatus::NotAttackable;
  return result;
}

}  // namespace abstain
