#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "abstain/point.hpp"

namespace abstain {

using Bitset = boost::dynamic_bitset<std::uint64_t>;

/// Explicit 0/1 matrix. Row h, column x holds h(x). `columns[x]` is the set
/// of rows labeling x with 1; the factory fills it.
struct FiniteFamily {
  std::size_t domain_size = 0;
  std::vector<Bitset> rows;
  std::vector<Bitset> columns;
};

/// x -> 1[x >= t], t in [0, 1].
struct ThresholdFamily {};

/// Unions of at most `max_intervals` closed intervals inside [0, 1].
struct IntervalUnionFamily {
  std::size_t max_intervals = 1;
};

/// A rooted forest over nodes 0..n-1 and a reference labeling f. The
/// hypotheses are (root-to-v chain) XOR f for every node v, plus f itself.
class TreeFamily {
 public:
  TreeFamily(std::vector<std::optional<NodeId>> parents, std::vector<Label> reference);

  std::size_t size() const { return parents_.size(); }
  std::optional<NodeId> parent(NodeId v) const { return parents_[v]; }
  std::size_t depth(NodeId v) const { return depth_[v]; }
  Label reference(NodeId v) const { return reference_[v]; }
  const std::vector<std::optional<NodeId>>& parents() const { return parents_; }
  const std::vector<Label>& reference_labels() const { return reference_; }
  const std::vector<NodeId>& children(NodeId v) const { return children_[v]; }
  /// Nodes sorted by (depth, id).
  const std::vector<NodeId>& depth_order() const { return depth_order_; }

  /// True when a lies on the root path of b (a == b included).
  bool is_ancestor_or_self(NodeId a, NodeId b) const {
    return tin_[a] <= tin_[b] && tout_[b] <= tout_[a];
  }

 private:
  std::vector<std::optional<NodeId>> parents_;
  std::vector<Label> reference_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> tin_;
  std::vector<std::size_t> tout_;
  std::vector<NodeId> depth_order_;
};

/// Axis-aligned boxes [a_1,b_1] x ... x [a_p,b_p] in R^p.
struct RectangleFamily {
  std::size_t dimension = 1;
};

enum class FamilyKind { Finite, Threshold, IntervalUnion, Tree, Rectangle };

std::string_view to_string(FamilyKind kind);

class HypothesisFamily {
 public:
  using Variant =
      std::variant<FiniteFamily, ThresholdFamily, IntervalUnionFamily, TreeFamily, RectangleFamily>;

  static HypothesisFamily finite(std::size_t domain_size, std::vector<Bitset> rows);
  /// Rows of 0/1 integers; all rows must have the same length.
  static HypothesisFamily finite(const std::vector<std::vector<int>>& matrix);
  static HypothesisFamily threshold();
  static HypothesisFamily interval_union(std::size_t max_intervals);
  static HypothesisFamily tree(std::vector<std::optional<NodeId>> parents,
                               std::vector<Label> reference);
  static HypothesisFamily rectangle(std::size_t dimension);

  FamilyKind kind() const;
  const Variant& variant() const { return value_; }
  template <class T>
  const T& as() const {
    return std::get<T>(value_);
  }
  PointKind point_kind() const;
  /// Number of domain points for Finite and Tree families, 0 otherwise.
  std::size_t finite_domain_size() const;

  /// Throws std::out_of_range when x is not in the declared domain.
  void check_point(const Point& x) const;

  std::string describe() const;

 private:
  explicit HypothesisFamily(Variant v) : value_(std::move(v)) {}
  Variant value_;
};

// Hypothesis identifiers, one per family variant.
struct FiniteRow {
  std::size_t index = 0;
};
struct Threshold {
  double t = 0.0;
};
struct IntervalSet {
  std::vector<std::pair<double, double>> intervals;
};
/// End of the root chain; nullopt is the empty chain, i.e. the reference f.
struct TreeChain {
  std::optional<NodeId> end;
};
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

using Hypothesis = std::variant<FiniteRow, Threshold, IntervalSet, TreeChain, Box>;

/// Throws std::invalid_argument when h is not a member of the family.
void validate_hypothesis(const HypothesisFamily& family, const Hypothesis& h);

Label evaluate(const HypothesisFamily& family, const Hypothesis& h, const Point& x);

std::string describe(const Hypothesis& h);

/// Textual hypothesis spec as used by configs and transcript headers.
Hypothesis parse_hypothesis(const HypothesisFamily& family, std::string_view text);

/// Largest k such that some k-subset of the domain is shattered.
std::size_t vc_dimension(const FiniteFamily& family);

/// Shattering test over an explicit row list restricted to `active` rows.
bool rows_shatter(std::span<const Bitset> rows, const Bitset& active,
                  std::span<const NodeId> points);

/// The tree family as an explicit finite family: row 0 is the reference f,
/// row v + 1 is the chain ending at v.
HypothesisFamily materialize(const TreeFamily& tree);

/// Coordinatewise min/max over a nonempty set of points.
Box closure_rectangle(std::span<const Point> positives);

bool box_contains(const Box& box, const Point& x);

}  // namespace abstain
