#include "abstain/gamma.hpp"

#include <algorithm>

#include "abstain/version_space.hpp"

namespace abstain {
namespace {

std::vector<LabeledExample> distinct_examples(std::span<const LabeledExample> dataset) {
  std::vector<LabeledExample> out(dataset.begin(), dataset.end());
  auto less = [](const LabeledExample& a, const LabeledExample& b) {
    if (a.point == b.point) return a.label < b.label;
    return a.point < b.point;
  };
  std::sort(out.begin(), out.end(), less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_reference_chain(const HypothesisFamily& family, const Hypothesis& h) {
  if (family.kind() != FamilyKind::Tree) return false;
  const auto* c = std::get_if<TreeChain>(&h);
  return c && !c->end;
}

}  // namespace

std::vector<Point> gamma_set_generic(std::span<const LabeledExample> dataset,
                                     std::shared_ptr<const HypothesisFamily> family,
                                     const Hypothesis& reference,
                                     const std::optional<LabeledExample>& restriction) {
  const auto examples = distinct_examples(dataset);
  std::vector<LabeledExample> wrong;
  for (const auto& e : examples) {
    if (evaluate(*family, reference, e.point) != e.label) wrong.push_back(e);
  }
  std::vector<Point> out;
  for (const auto& e : examples) {
    VersionSpace vs(family);
    if (restriction) vs.add(*restriction);
    for (const auto& w : wrong) {
      if (!(w == e)) vs.add(w);
    }
    if (!vs.is_consistent()) continue;
    if (vs.disagreement_status(e.point).in_disagreement()) out.push_back(e.point);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Point> gamma_set(std::span<const LabeledExample> dataset,
                             std::shared_ptr<const HypothesisFamily> family,
                             const Hypothesis& reference,
                             const std::optional<LabeledExample>& restriction) {
  if (is_reference_chain(*family, reference)) {
    TreeGammaIndex index(family->as<TreeFamily>());
    for (const auto& e : dataset) index.add(e);
    if (index.realizable()) {
      std::vector<Point> out;
      for (NodeId v : index.members(restriction)) out.push_back(Point::node(v));
      return out;
    }
  }
  return gamma_set_generic(dataset, std::move(family), reference, restriction);
}

TreeGammaIndex::TreeGammaIndex(const TreeFamily& tree)
    : tree_(&tree), seen_(tree.size(), 0), positive_(tree.size(), 0) {}

void TreeGammaIndex::add(const LabeledExample& example) {
  const NodeId v = example.point.node_id();
  if (v >= tree_->size()) throw std::out_of_range("TreeGammaIndex: node out of range");
  if (!seen_[v]) {
    seen_[v] = 1;
    nodes_.push_back(v);
  }
  if ((example.label ^ tree_->reference(v)) != Label::One || positive_[v]) return;
  positive_[v] = 1;
  if (deepest_ && !tree_->is_ancestor_or_self(v, *deepest_) &&
      !tree_->is_ancestor_or_self(*deepest_, v)) {
    chain_ = false;
  }
  if (!deepest_ || tree_->depth(v) > tree_->depth(*deepest_)) {
    second_ = deepest_;
    deepest_ = v;
  } else if (!second_ || tree_->depth(v) > tree_->depth(*second_)) {
    second_ = v;
  }
}

// Hypotheses are chains ending at e. Consistency with the positives other
// than x means e lies under dq; the restriction adds e under (or not under) r.
bool TreeGammaIndex::member(NodeId x, const std::optional<std::pair<NodeId, bool>>& r) const {
  const auto anc = [this](NodeId a, NodeId b) { return tree_->is_ancestor_or_self(a, b); };
  const std::optional<NodeId> dq = (deepest_ && *deepest_ == x) ? second_ : deepest_;

  // Some consistent chain passes through x.
  NodeId base = x;
  if (dq) {
    if (anc(x, *dq)) {
      base = *dq;
    } else if (!anc(*dq, x)) {
      return false;
    }
  }
  if (r) {
    const auto [xr, one] = *r;
    if (one ? !(anc(xr, base) || anc(base, xr)) : anc(xr, base)) return false;
  }

  // Some consistent hypothesis leaves x out.
  if (!dq) {
    if (!r || !r->second) return true;  // the empty chain
    return !anc(x, r->first);
  }
  if (anc(x, *dq)) return false;
  if (!r) return true;
  const auto [xr, one] = *r;
  if (!one) return !anc(xr, *dq);
  NodeId lower;
  if (anc(*dq, xr)) {
    lower = xr;
  } else if (anc(xr, *dq)) {
    lower = *dq;
  } else {
    return false;
  }
  return !anc(x, lower);
}

std::vector<NodeId> TreeGammaIndex::members(const std::optional<LabeledExample>& restriction) const {
  std::optional<std::pair<NodeId, bool>> r;
  if (restriction) {
    const NodeId v = restriction->point.node_id();
    r.emplace(v, (restriction->label ^ tree_->reference(v)) == Label::One);
  }
  std::vector<NodeId> out;
  for (NodeId v : nodes_) {
    if (member(v, r)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t TreeGammaIndex::count(const std::optional<LabeledExample>& restriction) const {
  std::optional<std::pair<NodeId, bool>> r;
  if (restriction) {
    const NodeId v = restriction->point.node_id();
    r.emplace(v, (restriction->label ^ tree_->reference(v)) == Label::One);
  }
  std::size_t n = 0;
  for (NodeId v : nodes_) n += member(v, r) ? 1 : 0;
  return n;
}

}  // namespace abstain
