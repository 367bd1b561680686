#include "abstain/shattering.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

namespace abstain {
namespace {

std::uint64_t checked_power(std::size_t m, std::size_t k, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (total > budget / std::max<std::size_t>(m, 1)) {
      throw BudgetExceeded("rho_k_exact: " + std::to_string(m) + "^" + std::to_string(k) +
                           " tuples exceed the enumeration budget");
    }
    total *= m;
  }
  if (total > budget) throw BudgetExceeded("rho_k_exact: enumeration budget exceeded");
  return total;
}

// Shattering verdicts keyed by the set of distinct support indices.
class SubsetCache {
 public:
  SubsetCache(const VersionSpace& vs, const FinitePmf& pmf) : vs_(vs), pmf_(pmf) {}

  bool shattered(std::span<const std::size_t> idx) {
    if (pmf_.points.size() <= 64) {
      std::uint64_t key = 0;
      for (auto i : idx) key |= std::uint64_t{1} << i;
      auto [it, fresh] = small_.try_emplace(key, false);
      if (fresh) it->second = compute(idx);
      return it->second;
    }
    Bitset key(pmf_.points.size());
    for (auto i : idx) key.set(i);
    auto [it, fresh] = large_.try_emplace(key, false);
    if (fresh) it->second = compute(idx);
    return it->second;
  }

 private:
  bool compute(std::span<const std::size_t> idx) {
    scratch_.clear();
    for (auto i : idx) scratch_.push_back(pmf_.points[i]);
    return vs_.shatters(scratch_);
  }

  const VersionSpace& vs_;
  const FinitePmf& pmf_;
  std::unordered_map<std::uint64_t, bool> small_;
  std::map<Bitset, bool> large_;
  std::vector<Point> scratch_;
};

}  // namespace

bool dis_k_member(const VersionSpace& vs, std::span<const Point> tuple) {
  if (tuple.empty()) throw std::invalid_argument("dis_k_member: k must be at least 1");
  return vs.shatters(tuple);
}

ShatterEstimate rho_k_exact(const VersionSpace& vs, const FinitePmf& pmf, std::size_t k,
                            std::uint64_t budget) {
  if (k == 0) throw std::invalid_argument("rho_k_exact: k must be at least 1");
  const std::size_t m = pmf.points.size();
  checked_power(m, k, budget);
  ShatterEstimate out;
  if (!vs.is_consistent()) return out;

  SubsetCache cache(vs, pmf);
  std::vector<std::size_t> idx(k, 0);
  double total = 0.0;
  while (true) {
    double mass = 1.0;
    for (auto i : idx) mass *= pmf.probabilities[i];
    if (mass > 0.0 && cache.shattered(idx)) total += mass;
    std::size_t j = 0;
    while (j < k && ++idx[j] == m) idx[j++] = 0;
    if (j == k) break;
  }
  out.value = std::clamp(total, 0.0, 1.0);
  return out;
}

ShatterEstimate rho_k_mc(const VersionSpace& vs, const DomainDistribution& dist, std::size_t k,
                         std::size_t n_samples, Rng& rng) {
  if (k == 0) throw std::invalid_argument("rho_k_mc: k must be at least 1");
  if (n_samples == 0) throw std::invalid_argument("rho_k_mc: n_samples must be at least 1");
  ShatterEstimate out;
  out.method = EstimateMethod::MonteCarlo;
  out.samples = n_samples;
  const bool consistent = vs.is_consistent();
  std::size_t hits = 0;
  std::vector<Point> tuple;
  tuple.reserve(k);
  for (std::size_t s = 0; s < n_samples; ++s) {
    tuple.clear();
    for (std::size_t j = 0; j < k; ++j) tuple.push_back(dist.sample(rng));
    if (consistent && vs.shatters(tuple)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  out.value = p;
  out.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  return out;
}

double leave_k_out_estimate(std::span<const LabeledExample> dataset,
                            std::shared_ptr<const HypothesisFamily> family, std::size_t k) {
  const std::size_t n = dataset.size();
  if (k == 0) throw std::invalid_argument("leave_k_out_estimate: k must be at least 1");
  if (k > n) throw std::invalid_argument("leave_k_out_estimate: k exceeds the dataset size");
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = j;
  std::vector<char> held(n, 0);
  std::vector<LabeledExample> rest;
  std::vector<Point> pts;
  std::size_t subsets = 0;
  std::size_t hits = 0;
  while (true) {
    std::fill(held.begin(), held.end(), 0);
    pts.clear();
    for (auto i : idx) {
      held[i] = 1;
      pts.push_back(dataset[i].point);
    }
    rest.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (!held[i]) rest.push_back(dataset[i]);
    }
    VersionSpace vs(family, rest);
    if (vs.shatters(pts)) ++hits;
    ++subsets;

    std::size_t j = k;
    while (j > 0 && idx[j - 1] == n - k + j - 1) --j;
    if (j == 0) break;
    ++idx[j - 1];
    for (std::size_t r = j; r < k; ++r) idx[r] = idx[r - 1] + 1;
  }
  return static_cast<double>(hits) / static_cast<double>(subsets);
}

RhoOracle::RhoOracle(DomainDistribution dist, RhoSettings settings)
    : dist_(std::move(dist)), settings_(settings) {
  if (dist_.is_enumerable()) support_ = dist_.support();
}

bool RhoOracle::exact_for(std::size_t k) const {
  if (!support_) return false;
  try {
    checked_power(support_->points.size(), k, settings_.budget);
  } catch (const BudgetExceeded&) {
    return false;
  }
  return true;
}

ShatterEstimate RhoOracle::operator()(const VersionSpace& vs, std::size_t k, Rng& rng) const {
  if (exact_for(k)) return rho_k_exact(vs, *support_, k, settings_.budget);
  if (settings_.mc_samples == 0) {
    throw std::invalid_argument("rho_k: distribution is not enumerable within budget and mc_samples = 0");
  }
  return rho_k_mc(vs, dist_, k, settings_.mc_samples, rng);
}

}  // namespace abstain
