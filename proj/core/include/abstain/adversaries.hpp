#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "abstain/distribution.hpp"
#include "abstain/family.hpp"
#include "abstain/learners.hpp"
#include "abstain/rng.hpp"
#include "abstain/version_space.hpp"

namespace abstain {

/// What an adversary may look at before round t: every earlier example with
/// its label, plus the learner's earlier outputs. Never the current iid draw.
struct AdversaryView {
  std::size_t t = 0;
  std::span<const LabeledExample> history;
  std::span<const Prediction> predictions;
  const VersionSpace* version_space = nullptr;
};

struct InjectionDecision {
  std::optional<Point> point;
  bool inject() const { return point.has_value(); }
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual InjectionDecision decide(const AdversaryView& view) = 0;
  virtual std::string_view name() const = 0;
};

enum class AdversaryKind { None, FixedSchedule, BoundaryAttack, AttackabilitySearch, RectangleProbe, Custom };

std::string_view to_string(AdversaryKind k);
AdversaryKind parse_adversary_kind(std::string_view text);

struct AdversaryConfig {
  AdversaryKind strategy = AdversaryKind::None;
  /// Maximum number of injections; unlimited when absent.
  std::optional<std::size_t> budget;
  /// Per-round injection probability for the randomized strategies.
  double rate = 0.5;
  /// (round, point) pairs for FixedSchedule; Custom loads them from `file`.
  std::vector<std::pair<std::size_t, Point>> schedule;
  std::string file;
  /// Attack-search evaluation budget per target point.
  std::size_t search_evaluations = 20000;
};

/// Parse "t point" lines; '#' starts a comment.
std::vector<std::pair<std::size_t, Point>> load_injection_file(const std::string& path,
                                                               PointKind kind);

/// The learner parameters an attack search needs to predict abstention.
struct AttackTarget {
  double alpha = 0.0;
  Vc1Rule rule = Vc1Rule::Symmetric;
};

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config,
                                          std::shared_ptr<const HypothesisFamily> family,
                                          const Hypothesis& target, const DomainDistribution& dist,
                                          const AttackTarget& learner, Rng rng);

enum class AttackStatus { Found, NotAttackable, CapExceeded };

struct AttackResult {
  AttackStatus status = AttackStatus::NotAttackable;
  std::vector<LabeledExample> attack;
  std::size_t evaluations = 0;
};

struct AttackSearchOptions {
  Vc1Rule rule = Vc1Rule::Symmetric;
  /// Largest attack size; defaults to floor(2 alpha).
  std::optional<std::size_t> cap;
  /// Search only examples with f*(x) != f(x); adding the others never helps.
  bool positives_only = true;
  std::size_t max_evaluations = 20000;
};

/// Smallest set of clean-labeled examples after which the vc1 learner, with
/// history dataset ∪ attack, abstains on x. Nodes are tried in depth order.
AttackResult vc1_attack_search(const Point& x, std::span<const LabeledExample> dataset,
                               std::shared_ptr<const HypothesisFamily> family,
                               const Hypothesis& target, double alpha,
                               const AttackSearchOptions& options = {});

}  // namespace abstain
