#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace abstain {

using NodeId = std::size_t;

enum class Label : std::uint8_t { Zero = 0, One = 1 };

constexpr Label flip(Label y) { return y == Label::Zero ? Label::One : Label::Zero; }
constexpr int as_int(Label y) { return static_cast<int>(y); }
constexpr Label label_of(bool bit) { return bit ? Label::One : Label::Zero; }
constexpr Label operator^(Label a, Label b) {
  return label_of((as_int(a) ^ as_int(b)) != 0);
}

/// How a family interprets points. Needed to parse serialized points back.
enum class PointKind : std::uint8_t { Real, Node };

/// A domain element: either a real vector (scalar families use dimension 1)
/// or a node of a finite domain.
class Point {
 public:
  static Point scalar(double x);
  static Point vector(std::vector<double> coords);
  static Point node(NodeId id);

  bool is_node() const { return std::holds_alternative<NodeId>(value_); }
  PointKind kind() const { return is_node() ? PointKind::Node : PointKind::Real; }
  NodeId node_id() const;
  std::span<const double> coords() const;
  /// The single coordinate of a dimension-1 point.
  double x() const;
  std::size_t dimension() const;

  friend bool operator==(const Point& a, const Point& b) { return a.value_ == b.value_; }
  /// Total order: nodes before real vectors, then lexicographic.
  friend bool operator<(const Point& a, const Point& b);

 private:
  using Value = std::variant<NodeId, std::vector<double>>;
  explicit Point(Value v) : value_(std::move(v)) {}
  Value value_;
};

struct LabeledExample {
  Point point;
  Label label;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// Shortest round-trip decimal for a double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Semicolon-joined coordinates, or the node id in decimal.
std::string to_string(const Point& p);
Point parse_point(std::string_view text, PointKind kind);

}  // namespace abstain
