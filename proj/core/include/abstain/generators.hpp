#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "abstain/distribution.hpp"
#include "abstain/family.hpp"
#include "abstain/rng.hpp"

namespace abstain {

/// Up to `rows` distinct random rows over m points, each bit set with
/// probability `density`.
HypothesisFamily random_finite_family(Rng& rng, std::size_t m, std::size_t rows, double density = 0.5);

/// A random subfamily of the sets of size at most d over m points, redrawn
/// until its VC dimension is exactly d. `keep` is the per-row inclusion
/// probability; every set of size < d is kept.
HypothesisFamily random_vc_family(Rng& rng, std::size_t m, std::size_t d, double keep = 0.6);

enum class TreeShape { Chain, Star, Mixed };

/// Parent array for n nodes. Mixed extends the current chain with
/// probability 1/2 and otherwise hangs the node under a random earlier node.
std::vector<std::optional<NodeId>> random_forest(Rng& rng, std::size_t n, TreeShape shape);

/// Probabilities that are multiples of 2^-bits and sum to exactly 1.
std::vector<double> dyadic_probabilities(Rng& rng, std::size_t m, unsigned bits = 6);

/// Dyadic pmf on nodes 0..m-1.
DomainDistribution dyadic_node_pmf(Rng& rng, std::size_t m, unsigned bits = 6);

}  // namespace abstain
