#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "abstain/family.hpp"
#include "abstain/point.hpp"

namespace abstain {

/// Γ(S, F', f): points x of S with x ∈ Dis_1(F' restricted to S_f minus (x, y)),
/// where S_f keeps the examples on which f is wrong and F' is the family,
/// optionally restricted by one example. S is treated as a set. Sorted output.
std::vector<Point> gamma_set(std::span<const LabeledExample> dataset,
                             std::shared_ptr<const HypothesisFamily> family,
                             const Hypothesis& reference,
                             const std::optional<LabeledExample>& restriction = std::nullopt);

/// Definitional evaluation through version spaces, for any family.
std::vector<Point> gamma_set_generic(std::span<const LabeledExample> dataset,
                                     std::shared_ptr<const HypothesisFamily> family,
                                     const Hypothesis& reference,
                                     const std::optional<LabeledExample>& restriction);

/// Incremental Γ for a tree family with f the reference labeling (the empty
/// chain). Each query is O(1) per distinct dataset node.
class TreeGammaIndex {
 public:
  explicit TreeGammaIndex(const TreeFamily& tree);

  void add(const LabeledExample& example);

  /// False when the f-disagreeing examples do not lie on one root chain.
  bool realizable() const { return chain_; }

  std::vector<NodeId> members(const std::optional<LabeledExample>& restriction) const;
  std::size_t count(const std::optional<LabeledExample>& restriction) const;

 private:
  bool member(NodeId x, const std::optional<std::pair<NodeId, bool>>& r) const;

  const TreeFamily* tree_;
  std::vector<char> seen_;
  std::vector<char> positive_;
  std::vector<NodeId> nodes_;
  std::optional<NodeId> deepest_;
  std::optional<NodeId> second_;
  bool chain_ = true;
};

}  // namespace abstain
