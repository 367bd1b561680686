#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abstain/distribution.hpp"
#include "abstain/family.hpp"
#include "abstain/learners.hpp"
#include "abstain/protocol.hpp"

namespace abstain {

/// One inequality check: holds iff lhs <= rhs (+ slack where stated).
struct LemmaReport {
  std::string lemma;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

std::string to_json_line(const LemmaReport& r);

inline constexpr double kProbabilitySlack = 1e-12;

/// A1 + A2 <= A3 + A4 for the tuple, where A1/A2 say it is shattered by
/// F_{x->1}/F_{x->0}, A3 by both, A4 by F.
LemmaReport check_inclusion_exclusion(const FiniteFamily& family, NodeId x,
                                      std::span<const NodeId> tuple);

/// Pr_x[rho_k(F_{x->0}) + rho_k(F_{x->1}) >= 2 eta rho_k(F)]
///   <= rho_{k+1}(F) / ((2 eta - 1) rho_k(F)).
/// Throws std::invalid_argument when rho_k(F) = 0 or eta <= 1/2.
LemmaReport verify_prob_abs(std::shared_ptr<const HypothesisFamily> family, const FinitePmf& pmf,
                            std::size_t k, double eta);

/// rho_{k+1} <= rho_k for k < k_max, and rho_k(F|e) <= rho_k(F) for the
/// given restricting examples.
std::vector<LemmaReport> check_rho_monotonicity(std::shared_ptr<const HypothesisFamily> family,
                                                const FinitePmf& pmf, std::size_t k_max,
                                                std::span<const LabeledExample> restrictions);

enum class AttackReading { Appendix, MainText };

/// Points of the dataset that some clean-labeled augmentation makes the
/// learner abstain on. Exhaustive over subsets of the domain; the tree is
/// materialized into explicit rows. Throws for more than 14 nodes.
std::vector<NodeId> enumerate_attackable(const TreeFamily& tree, std::span<const LabeledExample> dataset,
                                         double alpha, const Hypothesis& target,
                                         AttackReading reading = AttackReading::Appendix);

/// Γ(S, F, f) for a tree family with f the reference labeling, by direct
/// evaluation over materialized rows.
std::size_t brute_gamma_count(const TreeFamily& tree, std::span<const LabeledExample> dataset,
                              std::optional<LabeledExample> restriction = std::nullopt);

/// Γ_{t+1} <= Γ_t - alpha * 1[mistake at t] + 1 for every round.
std::vector<LemmaReport> check_gamma_potential(const Transcript& transcript, const TreeFamily& tree,
                                               double alpha);

/// On every wrong prediction at level k >= 1:
/// rho_k(F_{t+1}) <= eta * rho_k(F_t), recomputed exactly by replay.
std::vector<LemmaReport> check_level_contraction(const Transcript& transcript,
                                                 std::shared_ptr<const HypothesisFamily> family,
                                                 const FinitePmf& pmf, double eta = 0.6,
                                                 bool labels_on_abstain = true);

}  // namespace abstain
