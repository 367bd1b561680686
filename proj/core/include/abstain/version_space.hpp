#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "abstain/family.hpp"
#include "abstain/point.hpp"

namespace abstain {

class EmptyVersionSpace : public std::logic_error {
 public:
  EmptyVersionSpace() : std::logic_error("version space is empty") {}
};

/// Agreed(label) or InDisagreement.
struct DisagreementStatus {
  std::optional<Label> agreed;

  bool in_disagreement() const { return !agreed; }
  static DisagreementStatus agreed_on(Label y) { return {y}; }
  static DisagreementStatus disagreement() { return {}; }
  friend bool operator==(const DisagreementStatus&, const DisagreementStatus&) = default;
};

/// A family together with the hypotheses consistent with a labeled dataset.
///
/// Parametric families keep only summary constraint data; finite families keep
/// a bitmask of consistent rows. The dataset is a persistent list, so copying
/// and restricting are O(1) in the dataset length.
class VersionSpace {
 public:
  explicit VersionSpace(std::shared_ptr<const HypothesisFamily> family);
  VersionSpace(std::shared_ptr<const HypothesisFamily> family,
               std::span<const LabeledExample> dataset);

  const HypothesisFamily& family() const { return *family_; }
  const std::shared_ptr<const HypothesisFamily>& family_ptr() const { return family_; }

  std::size_t size() const { return size_; }
  /// Examples in insertion order.
  std::vector<LabeledExample> dataset() const;

  /// Restrict in place. Throws std::out_of_range for points outside the domain.
  void add(const LabeledExample& example);
  VersionSpace restricted(const LabeledExample& example) const;

  /// At least one hypothesis agrees with the dataset.
  bool is_consistent() const;

  /// Whether some consistent hypothesis also fits every example in `extra`.
  bool feasible(std::span<const LabeledExample> extra) const;
  bool feasible_with(const Point& x, Label y) const;

  /// Throws EmptyVersionSpace when no hypothesis is consistent.
  DisagreementStatus disagreement_status(const Point& x) const;

  /// True iff every labeling of the distinct points is realized by a
  /// consistent hypothesis.
  bool shatters(std::span<const Point> points) const;

  /// First consistent hypothesis in the family's canonical order: lowest row,
  /// smallest threshold, tightest intervals/chain/box.
  Hypothesis canonical_hypothesis() const;

  /// Finite families only.
  const Bitset& consistent_rows() const;

 private:
  struct Node {
    LabeledExample example;
    std::shared_ptr<const Node> prev;
  };

  struct FiniteState {
    Bitset mask;
  };
  struct ThresholdState {
    double max_negative;
    double min_positive;
  };
  /// Distinct seen locations and the number of maximal runs of 1s. The map
  /// is shared between copies and cloned before a write.
  struct IntervalState {
    std::shared_ptr<std::map<double, Label>> points;
    std::size_t runs = 0;
  };
  /// Labels are stored after XOR with the reference: 1 means "on the chain".
  struct TreeState {
    std::vector<signed char> label;
    std::optional<NodeId> deepest_positive;
  };
  struct RectangleState {
    std::optional<Box> closure;
  };
  using State = std::variant<FiniteState, ThresholdState, IntervalState, TreeState, RectangleState>;

  template <class F>
  void for_each_example(F&& f) const {
    for (const Node* n = head_.get(); n; n = n->prev.get()) f(n->example);
  }

  bool tree_feasible(const TreeState& s, std::span<const LabeledExample> extra) const;
  bool interval_feasible(const IntervalState& s, std::span<const LabeledExample> extra) const;
  void interval_add(IntervalState& s, const LabeledExample& e);
  bool rectangle_feasible(const RectangleState& s, std::span<const LabeledExample> extra) const;

  std::shared_ptr<const HypothesisFamily> family_;
  std::shared_ptr<const Node> head_;
  std::size_t size_ = 0;
  bool conflict_ = false;
  State state_;
};

VersionSpace restrict(const VersionSpace& vs, const LabeledExample& example);
DisagreementStatus disagreement_status(const VersionSpace& vs, const Point& x);
bool shatters(const VersionSpace& vs, std::span<const Point> points);

/// Sorted, deduplicated copy.
std::vector<Point> distinct_points(std::span<const Point> points);

}  // namespace abstain
