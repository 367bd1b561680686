#include "abstain/generators.hpp"

#include <set>
#include <stdexcept>

namespace abstain {

HypothesisFamily random_finite_family(Rng& rng, std::size_t m, std::size_t rows, double density) {
  if (m == 0 || rows == 0) throw std::invalid_argument("random_finite_family: empty family");
  std::set<std::vector<int>> unique;
  for (std::size_t attempt = 0; attempt < 4 * rows && unique.size() < rows; ++attempt) {
    std::vector<int> row(m);
    for (auto& b : row) b = rng.bernoulli(density) ? 1 : 0;
    unique.insert(std::move(row));
  }
  return HypothesisFamily::finite({unique.begin(), unique.end()});
}

HypothesisFamily random_vc_family(Rng& rng, std::size_t m, std::size_t d, double keep) {
  if (d == 0 || d > m) throw std::invalid_argument("random_vc_family: need 1 <= d <= m");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<int>> rows;
    std::vector<std::size_t> idx;
    for (std::size_t size = 0; size <= d; ++size) {
      idx.assign(size, 0);
      for (std::size_t j = 0; j < size; ++j) idx[j] = j;
      while (true) {
        if (size < d || rng.bernoulli(keep)) {
          std::vector<int> row(m, 0);
          for (auto i : idx) row[i] = 1;
          rows.push_back(std::move(row));
        }
        std::size_t j = size;
        while (j > 0 && idx[j - 1] == m - size + j - 1) --j;
        if (j == 0) break;
        ++idx[j - 1];
        for (std::size_t r = j; r < size; ++r) idx[r] = idx[r - 1] + 1;
      }
    }
    auto fam = HypothesisFamily::finite(rows);
    if (vc_dimension(fam.as<FiniteFamily>()) == d) return fam;
  }
  throw std::runtime_error("random_vc_family: no family with the requested VC dimension");
}

std::vector<std::optional<NodeId>> random_forest(Rng& rng, std::size_t n, TreeShape shape) {
  std::vector<std::optional<NodeId>> parents(n);
  NodeId tip = 0;
  for (NodeId v = 1; v < n; ++v) {
    switch (shape) {
      case TreeShape::Chain:
        parents[v] = v - 1;
        break;
      case TreeShape::Star:
        parents[v] = 0;
        break;
      case TreeShape::Mixed:
        if (rng.bernoulli(0.5)) {
          parents[v] = tip;
        } else {
          parents[v] = static_cast<NodeId>(rng.index(v));
        }
        tip = v;
        break;
    }
  }
  return parents;
}

std::vector<double> dyadic_probabilities(Rng& rng, std::size_t m, unsigned bits) {
  if (m == 0) throw std::invalid_argument("dyadic_probabilities: empty support");
  const std::size_t units = std::size_t{1} << bits;
  std::vector<std::size_t> count(m, 0);
  for (std::size_t u = 0; u < units; ++u) ++count[rng.index(m)];
  std::vector<double> p(m);
  for (std::size_t i = 0; i < m; ++i) p[i] = static_cast<double>(count[i]) / static_cast<double>(units);
  return p;
}

DomainDistribution dyadic_node_pmf(Rng& rng, std::size_t m, unsigned bits) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < m; ++i) pts.push_back(Point::node(i));
  return DomainDistribution::finite(std::move(pts), dyadic_probabilities(rng, m, bits));
}

}  // namespace abstain
