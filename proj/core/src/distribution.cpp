#include "abstain/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace abstain {
namespace {

constexpr double kSumTolerance = 1e-12;

std::vector<double> checked_cumulative(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty support");
  std::vector<double> cum(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) {
      throw std::invalid_argument(std::string(what) + ": probabilities must be nonnegative");
    }
    total += p[i];
    cum[i] = total;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument(std::string(what) + ": probabilities sum to " + format_double(total));
  }
  return cum;
}

std::size_t draw_index(const std::vector<double>& cum, Rng& rng) {
  const double u = rng.uniform() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  // u < cum.back(), so upper_bound never lands on a zero-mass entry.
  return std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

}  // namespace

DomainDistribution DomainDistribution::finite(std::vector<Point> points,
                                              std::vector<double> probabilities) {
  if (points.size() != probabilities.size()) {
    throw std::invalid_argument("FinitePmf: points and probabilities differ in length");
  }
  auto cum = checked_cumulative(probabilities, "FinitePmf");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].kind() != points[0].kind()) {
      throw std::invalid_argument("FinitePmf: mixed point kinds");
    }
  }
  std::vector<Point> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("FinitePmf: duplicate support point");
  }
  DomainDistribution d(FinitePmf{std::move(points), std::move(probabilities)});
  d.cumulative_ = std::move(cum);
  return d;
}

DomainDistribution DomainDistribution::uniform_nodes(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_nodes: n must be positive");
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(Point::node(i));
  // Rounding residue goes to the last point.
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  p.back() += 1.0 - total;
  return finite(std::move(pts), std::move(p));
}

DomainDistribution DomainDistribution::uniform_unit(std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("UniformUnit: dimension must be positive");
  return DomainDistribution(UniformUnit{dimension});
}

DomainDistribution DomainDistribution::product(std::vector<std::vector<double>> values,
                                               std::vector<std::vector<double>> probabilities) {
  if (values.empty() || values.size() != probabilities.size()) {
    throw std::invalid_argument("ProductOfFinite: coordinate lists differ in length");
  }
  std::vector<std::vector<double>> cums;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != probabilities[i].size()) {
      throw std::invalid_argument("ProductOfFinite: values and probabilities differ in length");
    }
    cums.push_back(checked_cumulative(probabilities[i], "ProductOfFinite"));
  }
  DomainDistribution d(ProductOfFinite{std::move(values), std::move(probabilities)});
  d.coord_cumulative_ = std::move(cums);
  return d;
}

Point DomainDistribution::sample(Rng& rng) const {
  if (const auto* f = std::get_if<FinitePmf>(&value_)) {
    return f->points[draw_index(cumulative_, rng)];
  }
  if (const auto* u = std::get_if<UniformUnit>(&value_)) {
    std::vector<double> c(u->dimension);
    for (auto& v : c) v = rng.uniform();
    return Point::vector(std::move(c));
  }
  const auto& p = std::get<ProductOfFinite>(value_);
  std::vector<double> c(p.values.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = p.values[i][draw_index(coord_cumulative_[i], rng)];
  return Point::vector(std::move(c));
}

bool DomainDistribution::is_enumerable() const { return !std::holds_alternative<UniformUnit>(value_); }

FinitePmf DomainDistribution::support() const {
  if (const auto* f = std::get_if<FinitePmf>(&value_)) return *f;
  const auto* p = std::get_if<ProductOfFinite>(&value_);
  if (!p) throw std::logic_error("support: distribution is not enumerable");
  FinitePmf out;
  const std::size_t dims = p->values.size();
  std::vector<std::size_t> idx(dims, 0);
  while (true) {
    std::vector<double> c(dims);
    double mass = 1.0;
    for (std::size_t i = 0; i < dims; ++i) {
      c[i] = p->values[i][idx[i]];
      mass *= p->probabilities[i][idx[i]];
    }
    out.points.push_back(Point::vector(std::move(c)));
    out.probabilities.push_back(mass);
    std::size_t i = 0;
    while (i < dims && ++idx[i] == p->values[i].size()) idx[i++] = 0;
    if (i == dims) break;
  }
  return out;
}

std::string DomainDistribution::describe() const {
  if (const auto* f = std::get_if<FinitePmf>(&value_)) {
    return "finite_pmf(m=" + std::to_string(f->points.size()) + ")";
  }
  if (const auto* u = std::get_if<UniformUnit>(&value_)) {
    return "uniform_unit(p=" + std::to_string(u->dimension) + ")";
  }
  return "product(p=" + std::to_string(std::get<ProductOfFinite>(value_).values.size()) + ")";
}

}  // namespace abstain
