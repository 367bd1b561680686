#include "abstain/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abstain {

std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::Zero: return "0";
    case Prediction::One: return "1";
    case Prediction::Abstain: return "abstain";
  }
  return "?";
}

Prediction parse_prediction(std::string_view text) {
  if (text == "0") return Prediction::Zero;
  if (text == "1") return Prediction::One;
  if (text == "abstain") return Prediction::Abstain;
  throw std::invalid_argument("unknown prediction '" + std::string(text) + "'");
}

// ---- disagreement ----------------------------------------------------------

DisagreementLearner::DisagreementLearner(std::shared_ptr<const HypothesisFamily> family)
    : vs_(std::move(family)) {}

Prediction DisagreementLearner::predict(const Point& x) {
  const auto status = vs_.disagreement_status(x);
  return status.agreed ? predict_label(*status.agreed) : Prediction::Abstain;
}

void DisagreementLearner::observe(const Point& x, Label y) { vs_.add({x, y}); }

// ---- intervals -------------------------------------------------------------

Prediction IntervalLearner::predict(const Point& x) {
  const double v = x.x();
  auto right = seen_.lower_bound(v);
  if (right != seen_.end() && right->first == v) return predict_label(right->second);
  if (right == seen_.end() || right == seen_.begin()) return Prediction::Abstain;
  auto left = std::prev(right);
  if (left->second != right->second) return Prediction::Abstain;
  return predict_label(left->second);
}

void IntervalLearner::observe(const Point& x, Label y) { seen_[x.x()] = y; }

// ---- level-based -----------------------------------------------------------

std::vector<double> default_level_thresholds(std::size_t d, std::size_t horizon,
                                             std::optional<double> delta) {
  if (horizon == 0) throw std::invalid_argument("default_level_thresholds: horizon must be positive");
  double base = static_cast<double>(horizon);
  if (delta) {
    if (!(*delta > 0.0 && *delta < 1.0)) {
      throw std::invalid_argument("default_level_thresholds: delta must lie in (0, 1)");
    }
    base = 12.0 * static_cast<double>(horizon) * static_cast<double>(std::max<std::size_t>(d, 1)) / *delta;
  }
  std::vector<double> out(d);
  for (std::size_t k = 1; k <= d; ++k) out[k - 1] = std::pow(base, -static_cast<double>(k));
  return out;
}

LevelLearner::LevelLearner(std::shared_ptr<const HypothesisFamily> family, DomainDistribution dist,
                           LevelConfig config, Rng rng)
    : vs_(std::move(family)),
      oracle_(std::move(dist), config.rho),
      config_(std::move(config)),
      rng_(std::move(rng)),
      level_(config_.start_level) {
  if (!(config_.eta > 0.5 && config_.eta <= 1.0)) {
    throw std::invalid_argument("level learner: eta must lie in (0.5, 1]");
  }
  if (config_.alpha.size() < level_) {
    throw std::invalid_argument("level learner: need one threshold per level");
  }
  for (std::size_t k = 1; k <= level_; ++k) {
    if (!oracle_.exact_for(k) && config_.rho.mc_samples == 0) {
      throw std::invalid_argument(
          "level learner: requires an enumerable pmf within budget or mc_samples > 0");
    }
  }
  phases_.push_back({level_, 0, 0});
}

double LevelLearner::rho(const VersionSpace& vs) { return oracle_(vs, level_, rng_).value; }

double LevelLearner::current_rho() {
  if (!rho_now_) rho_now_ = rho(vs_);
  return *rho_now_;
}

void LevelLearner::enter_level(std::size_t k) {
  level_ = k;
  rho_now_.reset();
  phases_.back().end = round_;
  phases_.push_back({k, round_, round_});
}

Prediction LevelLearner::predict(const Point& x) {
  vs_.family().check_point(x);
  last_ = {};
  last_.level = level_;
  cached_point_.reset();
  if (level_ == 0) {
    const auto status = vs_.disagreement_status(x);
    last_prediction_ = status.agreed ? predict_label(*status.agreed) : Prediction::Abstain;
    return last_prediction_;
  }
  const double r = current_rho();
  const double r0 = rho(vs_.restricted({x, Label::Zero}));
  const double r1 = rho(vs_.restricted({x, Label::One}));
  cached_point_ = x;
  cached_rho_[0] = r0;
  cached_rho_[1] = r1;
  last_.rho_k = r;
  if (std::min(r0, r1) >= config_.eta * r) {
    last_prediction_ = Prediction::Abstain;
  } else {
    last_prediction_ = r1 > r0 ? Prediction::One : Prediction::Zero;
  }
  return last_prediction_;
}

void LevelLearner::observe(const Point& x, Label y) {
  ++round_;
  const bool skip = !config_.labels_on_abstain && last_prediction_ == Prediction::Abstain;
  if (!skip) {
    if (level_ > 0 && cached_point_ && *cached_point_ == x) {
      rho_now_ = cached_rho_[as_int(y)];
    } else {
      rho_now_.reset();
    }
    vs_.add({x, y});
  }
  cached_point_.reset();
  if (level_ > 0 && current_rho() <= config_.alpha[level_ - 1]) {
    enter_level(level_ - 1);
    while (config_.cascade && level_ > 0 && current_rho() <= config_.alpha[level_ - 1]) {
      enter_level(level_ - 1);
    }
  }
  phases_.back().end = round_;
}

// ---- VC dimension one ------------------------------------------------------

std::string_view to_string(Vc1Rule r) { return r == Vc1Rule::MainText ? "main_text" : "symmetric"; }

Vc1Learner::Vc1Learner(std::shared_ptr<const HypothesisFamily> family, double alpha, Vc1Rule rule)
    : vs_(family),
      tree_(family->kind() == FamilyKind::Tree
                ? &family->as<TreeFamily>()
                : throw std::invalid_argument("vc1 learner: requires a tree family")),
      gamma_(*tree_),
      alpha_(alpha),
      rule_(rule) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("vc1 learner: alpha must be a finite nonnegative number");
  }
}

Prediction Vc1Learner::predict(const Point& x) {
  const auto status = vs_.disagreement_status(x);
  const std::size_t g0 = gamma_.count(LabeledExample{x, Label::Zero});
  const std::size_t g1 = gamma_.count(LabeledExample{x, Label::One});
  last_ = {};
  last_.gamma0 = g0;
  last_.gamma1 = g1;
  if (status.agreed) return predict_label(*status.agreed);
  if (rule_ == Vc1Rule::MainText) {
    const Label fx = tree_->reference(x.node_id());
    const std::size_t a0 = fx == Label::One ? g1 : g0;
    return static_cast<double>(a0) >= alpha_ ? predict_label(fx) : Prediction::Abstain;
  }
  if (static_cast<double>(std::max(g0, g1)) < alpha_) return Prediction::Abstain;
  return g1 > g0 ? Prediction::One : Prediction::Zero;
}

void Vc1Learner::observe(const Point& x, Label y) {
  vs_.add({x, y});
  gamma_.add({x, y});
}

// ---- rectangles ------------------------------------------------------------

RectangleLearner::RectangleLearner(std::shared_ptr<const HypothesisFamily> family, double alpha)
    : vs_(family), alpha_(alpha) {
  if (family->kind() != FamilyKind::Rectangle) {
    throw std::invalid_argument("rectangle learner: requires a rectangle family");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("rectangle learner: alpha must be a finite nonnegative number");
  }
}

std::size_t RectangleLearner::witnesses(const Point& x) const {
  if (!closure_) return 0;
  const auto c = x.coords();
  const auto& a = closure_->lower;
  const auto& b = closure_->upper;
  std::size_t n = 0;
  for (const auto& h : history_) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if ((c[i] < a[i] && c[i] <= h[i] && h[i] < a[i]) ||
          (c[i] > b[i] && b[i] < h[i] && h[i] <= c[i])) {
        ++n;
        break;
      }
    }
  }
  return n;
}

Prediction RectangleLearner::predict(const Point& x) {
  vs_.family().check_point(x);
  if (!closure_) return Prediction::Zero;
  const auto status = vs_.disagreement_status(x);
  if (status.agreed) return predict_label(*status.agreed);
  return static_cast<double>(witnesses(x)) >= alpha_ ? Prediction::Zero : Prediction::Abstain;
}

void RectangleLearner::observe(const Point& x, Label y) {
  vs_.add({x, y});
  const auto c = x.coords();
  history_.emplace_back(c.begin(), c.end());
  if (y != Label::One) return;
  if (!closure_) {
    closure_ = Box{history_.back(), history_.back()};
    return;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    closure_->lower[i] = std::min(closure_->lower[i], c[i]);
    closure_->upper[i] = std::max(closure_->upper[i], c[i]);
  }
}

// ---- ERM -------------------------------------------------------------------

ErmLearner::ErmLearner(std::shared_ptr<const HypothesisFamily> family) : vs_(std::move(family)) {}

Prediction ErmLearner::predict(const Point& x) {
  return predict_label(evaluate(vs_.family(), vs_.canonical_hypothesis(), x));
}

void ErmLearner::observe(const Point& x, Label y) { vs_.add({x, y}); }

// ---- factory ---------------------------------------------------------------

std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::Disagreement: return "disagreement";
    case LearnerKind::Interval: return "interval";
    case LearnerKind::Level: return "level";
    case LearnerKind::Vc1: return "vc1";
    case LearnerKind::Rectangle: return "rectangle";
    case LearnerKind::Erm: return "erm";
  }
  return "?";
}

LearnerKind parse_learner_kind(std::string_view text) {
  for (auto k : {LearnerKind::Disagreement, LearnerKind::Interval, LearnerKind::Level,
                 LearnerKind::Vc1, LearnerKind::Rectangle, LearnerKind::Erm}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown learner '" + std::string(text) + "'");
}

std::size_t family_vc_dimension(const HypothesisFamily& family) {
  switch (family.kind()) {
    case FamilyKind::Finite: return vc_dimension(family.as<FiniteFamily>());
    case FamilyKind::Threshold: return 1;
    case FamilyKind::IntervalUnion: return 2 * family.as<IntervalUnionFamily>().max_intervals;
    case FamilyKind::Tree: return 1;
    case FamilyKind::Rectangle: return 2 * family.as<RectangleFamily>().dimension;
  }
  return 0;
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec,
                                      std::shared_ptr<const HypothesisFamily> family,
                                      const DomainDistribution& dist, Rng rng) {
  switch (spec.kind) {
    case LearnerKind::Disagreement:
      return std::make_unique<DisagreementLearner>(std::move(family));
    case LearnerKind::Interval:
      if (family->kind() != FamilyKind::IntervalUnion && family->kind() != FamilyKind::Threshold) {
        throw std::invalid_argument("interval learner: requires a one-dimensional family");
      }
      return std::make_unique<IntervalLearner>();
    case LearnerKind::Level: {
      LevelConfig cfg = spec.level;
      if (cfg.start_level == 0) cfg.start_level = family_vc_dimension(*family);
      return std::make_unique<LevelLearner>(std::move(family), dist, std::move(cfg), std::move(rng));
    }
    case LearnerKind::Vc1:
      return std::make_unique<Vc1Learner>(std::move(family), spec.alpha, spec.rule);
    case LearnerKind::Rectangle:
      return std::make_unique<RectangleLearner>(std::move(family), spec.alpha);
    case LearnerKind::Erm:
      return std::make_unique<ErmLearner>(std::move(family));
  }
  throw std::invalid_argument("make_learner: unknown learner");
}

}  // namespace abstain
