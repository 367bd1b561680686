#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "abstain/distribution.hpp"
#include "abstain/rng.hpp"
#include "abstain/version_space.hpp"

namespace abstain {

enum class EstimateMethod { Exact, MonteCarlo };

struct ShatterEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::Exact;
  std::size_t samples = 0;
  double standard_error = 0.0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Whether the distinct points of `tuple` are shattered by the version space.
bool dis_k_member(const VersionSpace& vs, std::span<const Point> tuple);

/// Sum over all m^k ordered tuples of the product mass of shattered tuples.
/// Throws BudgetExceeded when m^k > budget.
ShatterEstimate rho_k_exact(const VersionSpace& vs, const FinitePmf& pmf, std::size_t k,
                            std::uint64_t budget = kDefaultEnumerationBudget);

ShatterEstimate rho_k_mc(const VersionSpace& vs, const DomainDistribution& dist, std::size_t k,
                         std::size_t n_samples, Rng& rng);

/// Average over k-subsets T of dataset positions of
/// 1[points(T) shattered by family restricted to dataset \ T].
double leave_k_out_estimate(std::span<const LabeledExample> dataset,
                            std::shared_ptr<const HypothesisFamily> family, std::size_t k);

/// How learners obtain rho_k: exact when the distribution is enumerable and
/// within budget, otherwise Monte Carlo with `mc_samples` draws.
struct RhoSettings {
  std::size_t mc_samples = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

class RhoOracle {
 public:
  RhoOracle(DomainDistribution dist, RhoSettings settings);

  /// Throws std::invalid_argument when neither exact nor MC evaluation applies.
  ShatterEstimate operator()(const VersionSpace& vs, std::size_t k, Rng& rng) const;

  bool exact_for(std::size_t k) const;
  const DomainDistribution& distribution() const { return dist_; }

 private:
  DomainDistribution dist_;
  RhoSettings settings_;
  std::optional<FinitePmf> support_;
};

}  // namespace abstain
