#include "abstain/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace abstain {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view strip_prefix(std::string_view text) {
  auto eq = text.find('=');
  if (eq != std::string_view::npos) text = text.substr(eq + 1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  return text;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::pair<double, double>> parse_pairs(std::string_view text) {
  std::vector<std::pair<double, double>> out;
  if (text.empty() || text == "none") return out;
  for (auto part : split(text, ',')) {
    auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("expected lo:hi, got '" + std::string(part) + "'");
    }
    out.emplace_back(parse_double(part.substr(0, colon)), parse_double(part.substr(colon + 1)));
  }
  return out;
}

std::string format_pairs(const std::vector<double>& lo, const std::vector<double>& hi) {
  std::string out;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (i) out += ',';
    out += format_double(lo[i]) + ":" + format_double(hi[i]);
  }
  return out.empty() ? "none" : out;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- TreeFamily

TreeFamily::TreeFamily(std::vector<std::optional<NodeId>> parents, std::vector<Label> reference)
    : parents_(std::move(parents)), reference_(std::move(reference)) {
  const std::size_t n = parents_.size();
  if (reference_.size() != n) {
    throw std::invalid_argument("tree: reference labeling must cover every node");
  }
  children_.assign(n, {});
  std::vector<NodeId> roots;
  for (NodeId v = 0; v < n; ++v) {
    if (!parents_[v]) {
      roots.push_back(v);
      continue;
    }
    if (*parents_[v] >= n) throw std::invalid_argument("tree: parent index out of range");
    if (*parents_[v] == v) throw std::invalid_argument("tree: cycle (self parent)");
    children_[*parents_[v]].push_back(v);
  }

  depth_.assign(n, 0);
  tin_.assign(n, 0);
  tout_.assign(n, 0);
  std::size_t clock = 0;
  std::size_t visited = 0;
  // Iterative DFS from the roots; nodes unreachable from a root sit on a cycle.
  for (NodeId r : roots) {
    std::vector<std::pair<NodeId, std::size_t>> stack{{r, 0}};
    tin_[r] = clock++;
    ++visited;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < children_[v].size()) {
        NodeId c = children_[v][next++];
        depth_[c] = depth_[v] + 1;
        tin_[c] = clock++;
        ++visited;
        stack.emplace_back(c, 0);
      } else {
        tout_[v] = clock++;
        stack.pop_back();
      }
    }
  }
  if (visited != n) throw std::invalid_argument("tree: cycle in parent array");

  depth_order_.resize(n);
  for (NodeId v = 0; v < n; ++v) depth_order_[v] = v;
  std::sort(depth_order_.begin(), depth_order_.end(), [&](NodeId a, NodeId b) {
    return depth_[a] != depth_[b] ? depth_[a] < depth_[b] : a < b;
  });
}

// ---------------------------------------------------------- HypothesisFamily

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Finite: return "finite";
    case FamilyKind::Threshold: return "threshold";
    case FamilyKind::IntervalUnion: return "interval_union";
    case FamilyKind::Tree: return "tree";
    case FamilyKind::Rectangle: return "rectangle";
  }
  return "unknown";
}

HypothesisFamily HypothesisFamily::finite(std::size_t domain_size, std::vector<Bitset> rows) {
  if (rows.empty()) throw std::invalid_argument("finite family: no hypotheses");
  std::set<Bitset> seen;
  for (const auto& r : rows) {
    if (r.size() != domain_size) {
      throw std::invalid_argument("finite family: row length differs from domain size");
    }
    if (!seen.insert(r).second) throw std::invalid_argument("finite family: duplicate row");
  }
  std::vector<Bitset> columns(domain_size, Bitset(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t x = 0; x < domain_size; ++x) columns[x][r] = rows[r][x];
  }
  return HypothesisFamily(FiniteFamily{domain_size, std::move(rows), std::move(columns)});
}

HypothesisFamily HypothesisFamily::finite(const std::vector<std::vector<int>>& matrix) {
  if (matrix.empty()) throw std::invalid_argument("finite family: no hypotheses");
  const std::size_t m = matrix.front().size();
  std::vector<Bitset> rows;
  rows.reserve(matrix.size());
  for (const auto& r : matrix) {
    if (r.size() != m) throw std::invalid_argument("finite family: ragged matrix");
    Bitset b(m);
    for (std::size_t j = 0; j < m; ++j) {
      if (r[j] != 0 && r[j] != 1) throw std::invalid_argument("finite family: entries must be 0/1");
      b[j] = r[j] == 1;
    }
    rows.push_back(std::move(b));
  }
  return finite(m, std::move(rows));
}

HypothesisFamily HypothesisFamily::threshold() { return HypothesisFamily(ThresholdFamily{}); }

HypothesisFamily HypothesisFamily::interval_union(std::size_t max_intervals) {
  if (max_intervals == 0) throw std::invalid_argument("interval_union: d must be positive");
  return HypothesisFamily(IntervalUnionFamily{max_intervals});
}

HypothesisFamily HypothesisFamily::tree(std::vector<std::optional<NodeId>> parents,
                                        std::vector<Label> reference) {
  return HypothesisFamily(TreeFamily(std::move(parents), std::move(reference)));
}

HypothesisFamily HypothesisFamily::rectangle(std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("rectangle: dimension must be positive");
  return HypothesisFamily(RectangleFamily{dimension});
}

FamilyKind HypothesisFamily::kind() const {
  return static_cast<FamilyKind>(value_.index());
}

PointKind HypothesisFamily::point_kind() const {
  return (kind() == FamilyKind::Finite || kind() == FamilyKind::Tree) ? PointKind::Node
                                                                      : PointKind::Real;
}

std::size_t HypothesisFamily::finite_domain_size() const {
  return std::visit(overloaded{
                        [](const FiniteFamily& f) { return f.domain_size; },
                        [](const TreeFamily& t) { return t.size(); },
                        [](const auto&) { return std::size_t{0}; },
                    },
                    value_);
}

void HypothesisFamily::check_point(const Point& x) const {
  if (point_kind() == PointKind::Node) {
    if (!x.is_node()) throw std::out_of_range("point must be a node id for this family");
    if (x.node_id() >= finite_domain_size()) {
      throw std::out_of_range("node " + std::to_string(x.node_id()) + " outside the domain");
    }
    return;
  }
  if (x.is_node()) throw std::out_of_range("point must be real-valued for this family");
  const std::size_t want = kind() == FamilyKind::Rectangle ? as<RectangleFamily>().dimension : 1;
  if (x.dimension() != want) {
    throw std::out_of_range("point dimension " + std::to_string(x.dimension()) + ", expected " +
                            std::to_string(want));
  }
}

std::string HypothesisFamily::describe() const {
  return std::visit(
      overloaded{
          [](const FiniteFamily& f) {
            return "finite(m=" + std::to_string(f.domain_size) +
                   ",rows=" + std::to_string(f.rows.size()) + ")";
          },
          [](const ThresholdFamily&) { return std::string("threshold"); },
          [](const IntervalUnionFamily& f) {
            return "interval_union(d=" + std::to_string(f.max_intervals) + ")";
          },
          [](const TreeFamily& t) { return "tree(n=" + std::to_string(t.size()) + ")"; },
          [](const RectangleFamily& f) {
            return "rectangle(p=" + std::to_string(f.dimension) + ")";
          },
      },
      value_);
}

// ---------------------------------------------------------------- Hypothesis

void validate_hypothesis(const HypothesisFamily& family, const Hypothesis& h) {
  const auto kind = family.kind();
  std::visit(
      overloaded{
          [&](const FiniteRow& r) {
            if (kind != FamilyKind::Finite) throw std::invalid_argument("row id needs a finite family");
            if (r.index >= family.as<FiniteFamily>().rows.size()) {
              throw std::out_of_range("unknown hypothesis row " + std::to_string(r.index));
            }
          },
          [&](const Threshold& t) {
            if (kind != FamilyKind::Threshold) throw std::invalid_argument("threshold needs a threshold family");
            if (!(t.t >= 0.0 && t.t <= 1.0)) throw std::invalid_argument("threshold must lie in [0,1]");
          },
          [&](const IntervalSet& s) {
            if (kind != FamilyKind::IntervalUnion) {
              throw std::invalid_argument("interval set needs an interval_union family");
            }
            if (s.intervals.size() > family.as<IntervalUnionFamily>().max_intervals) {
              throw std::invalid_argument("too many intervals for this family");
            }
            for (auto [a, b] : s.intervals) {
              if (!(0.0 <= a && a <= b && b <= 1.0)) {
                throw std::invalid_argument("intervals must satisfy 0 <= a <= b <= 1");
              }
            }
          },
          [&](const TreeChain& c) {
            if (kind != FamilyKind::Tree) throw std::invalid_argument("chain needs a tree family");
            if (c.end && *c.end >= family.as<TreeFamily>().size()) {
              throw std::out_of_range("chain end outside the tree");
            }
          },
          [&](const Box& b) {
            if (kind != FamilyKind::Rectangle) throw std::invalid_argument("box needs a rectangle family");
            const auto p = family.as<RectangleFamily>().dimension;
            if (b.lower.size() != p || b.upper.size() != p) {
              throw std::invalid_argument("box dimension mismatch");
            }
            for (std::size_t i = 0; i < p; ++i) {
              if (!(b.lower[i] <= b.upper[i])) throw std::invalid_argument("box needs a_i <= b_i");
            }
          },
      },
      h);
}

bool box_contains(const Box& box, const Point& x) {
  auto c = x.coords();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < box.lower[i] || c[i] > box.upper[i]) return false;
  }
  return true;
}

Label evaluate(const HypothesisFamily& family, const Hypothesis& h, const Point& x) {
  validate_hypothesis(family, h);
  family.check_point(x);
  return std::visit(
      overloaded{
          [&](const FiniteRow& r) {
            return label_of(family.as<FiniteFamily>().rows[r.index][x.node_id()]);
          },
          [&](const Threshold& t) { return label_of(x.x() >= t.t); },
          [&](const IntervalSet& s) {
            const double v = x.x();
            for (auto [a, b] : s.intervals) {
              if (a <= v && v <= b) return Label::One;
            }
            return Label::Zero;
          },
          [&](const TreeChain& c) {
            const auto& tree = family.as<TreeFamily>();
            const NodeId v = x.node_id();
            const bool on_chain = c.end && tree.is_ancestor_or_self(v, *c.end);
            return label_of(on_chain) ^ tree.reference(v);
          },
          [&](const Box& b) { return label_of(box_contains(b, x)); },
      },
      h);
}

std::string describe(const Hypothesis& h) {
  return std::visit(
      overloaded{
          [](const FiniteRow& r) { return "row=" + std::to_string(r.index); },
          [](const Threshold& t) { return "t=" + format_double(t.t); },
          [](const IntervalSet& s) {
            std::vector<double> lo, hi;
            for (auto [a, b] : s.intervals) {
              lo.push_back(a);
              hi.push_back(b);
            }
            return "intervals=" + format_pairs(lo, hi);
          },
          [](const TreeChain& c) {
            return std::string("chain=") + (c.end ? std::to_string(*c.end) : std::string("none"));
          },
          [](const Box& b) { return "box=" + format_pairs(b.lower, b.upper); },
      },
      h);
}

Hypothesis parse_hypothesis(const HypothesisFamily& family, std::string_view text) {
  text = strip_prefix(text);
  Hypothesis h;
  switch (family.kind()) {
    case FamilyKind::Finite:
      h = FiniteRow{static_cast<std::size_t>(parse_double(text))};
      break;
    case FamilyKind::Threshold:
      h = Threshold{parse_double(text)};
      break;
    case FamilyKind::IntervalUnion:
      h = IntervalSet{parse_pairs(text)};
      break;
    case FamilyKind::Tree:
      if (text == "none" || text.empty()) {
        h = TreeChain{std::nullopt};
      } else {
        h = TreeChain{static_cast<NodeId>(parse_double(text))};
      }
      break;
    case FamilyKind::Rectangle: {
      Box b;
      for (auto [lo, hi] : parse_pairs(text)) {
        b.lower.push_back(lo);
        b.upper.push_back(hi);
      }
      h = std::move(b);
      break;
    }
  }
  validate_hypothesis(family, h);
  return h;
}

// ------------------------------------------------------------ finite helpers

bool rows_shatter(std::span<const Bitset> rows, const Bitset& active,
                  std::span<const NodeId> points) {
  const std::size_t k = points.size();
  if (k >= 64) throw std::invalid_argument("rows_shatter: too many points");
  const std::size_t want = std::size_t{1} << k;
  if (active.count() < want) return false;
  std::vector<char> seen(want, 0);
  std::size_t distinct = 0;
  for (auto r = active.find_first(); r != Bitset::npos; r = active.find_next(r)) {
    std::size_t pattern = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (rows[r][points[j]]) pattern |= std::size_t{1} << j;
    }
    if (!seen[pattern]) {
      seen[pattern] = 1;
      if (++distinct == want) return true;
    }
  }
  return false;
}

std::size_t vc_dimension(const FiniteFamily& family) {
  const std::size_t m = family.domain_size;
  Bitset all(family.rows.size());
  all.set();
  std::size_t best = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (k >= 63 || (std::size_t{1} << k) > family.rows.size()) break;
    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) idx[j] = j;
    bool found = false;
    do {
      if (rows_shatter(family.rows, all, idx)) {
        found = true;
        break;
      }
    } while (next_combination(idx, m));
    // Shattering is hereditary, so no k-set means no larger set either.
    if (!found) break;
    best = k;
  }
  return best;
}

HypothesisFamily materialize(const TreeFamily& tree) {
  const std::size_t n = tree.size();
  std::vector<Bitset> rows;
  Bitset reference(n);
  for (NodeId v = 0; v < n; ++v) reference[v] = tree.reference(v) == Label::One;
  rows.push_back(reference);
  for (NodeId end = 0; end < n; ++end) {
    Bitset row = reference;
    for (std::optional<NodeId> v = end; v; v = tree.parent(*v)) row.flip(*v);
    rows.push_back(std::move(row));
  }
  return HypothesisFamily::finite(n, std::move(rows));
}

Box closure_rectangle(std::span<const Point> positives) {
  if (positives.empty()) throw std::invalid_argument("closure_rectangle: no positive points");
  const auto first = positives.front().coords();
  Box box{std::vector<double>(first.begin(), first.end()),
          std::vector<double>(first.begin(), first.end())};
  for (const auto& p : positives) {
    auto c = p.coords();
    if (c.size() != box.lower.size()) throw std::invalid_argument("closure_rectangle: dimension mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) {
      box.lower[i] = std::min(box.lower[i], c[i]);
      box.upper[i] = std::max(box.upper[i], c[i]);
    }
  }
  return box;
}

}  // namespace abstain
