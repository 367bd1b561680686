#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "abstain/point.hpp"
#include "abstain/rng.hpp"

namespace abstain {

/// Explicit finite support with probabilities summing to 1 (within 1e-12).
struct FinitePmf {
  std::vector<Point> points;
  std::vector<double> probabilities;
};

/// Uniform on [0,1]^dimension.
struct UniformUnit {
  std::size_t dimension = 1;
};

/// Independent coordinates, each drawn from its own finite pmf over reals.
struct ProductOfFinite {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> probabilities;
};

class DomainDistribution {
 public:
  using Variant = std::variant<FinitePmf, UniformUnit, ProductOfFinite>;

  static DomainDistribution finite(std::vector<Point> points, std::vector<double> probabilities);
  static DomainDistribution uniform_nodes(std::size_t n);
  static DomainDistribution uniform_unit(std::size_t dimension);
  static DomainDistribution product(std::vector<std::vector<double>> values,
                                    std::vector<std::vector<double>> probabilities);

  const Variant& variant() const { return value_; }

  Point sample(Rng& rng) const;

  /// Finite support that can be enumerated exactly (FinitePmf or ProductOfFinite).
  bool is_enumerable() const;
  /// The enumerated support as a FinitePmf. Throws std::logic_error otherwise.
  FinitePmf support() const;

  std::string describe() const;

 private:
  explicit DomainDistribution(Variant v) : value_(std::move(v)) {}
  Variant value_;
  std::vector<double> cumulative_;  // FinitePmf sampling table
  std::vector<std::vector<double>> coord_cumulative_;
};

}  // namespace abstain
