#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "abstain/family.hpp"
#include "abstain/generators.hpp"
#include "abstain/version_space.hpp"

using namespace abstain;

namespace {

std::shared_ptr<const HypothesisFamily> share(HypothesisFamily f) {
  return std::make_shared<const HypothesisFamily>(std::move(f));
}

LabeledExample ex(double x, int y) { return {Point::scalar(x), label_of(y != 0)}; }
LabeledExample node(NodeId v, int y) { return {Point::node(v), label_of(y != 0)}; }

// Exhaustive VC dimension over explicit rows.
std::size_t brute_vc(const std::vector<std::vector<int>>& rows, std::size_t m) {
  std::size_t best = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::set<std::vector<int>> patterns;
    for (const auto& r : rows) {
      std::vector<int> p;
      for (std::size_t i = 0; i < m; ++i) {
        if ((mask >> i) & 1U) p.push_back(r[i]);
      }
      patterns.insert(p);
    }
    const std::size_t k = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (patterns.size() == (std::size_t{1} << k)) best = std::max(best, k);
  }
  return best;
}

std::vector<std::vector<int>> rows_of(const FiniteFamily& f) {
  std::vector<std::vector<int>> out;
  for (const auto& r : f.rows) {
    std::vector<int> row(f.domain_size);
    for (std::size_t i = 0; i < f.domain_size; ++i) row[i] = r[i] ? 1 : 0;
    out.push_back(row);
  }
  return out;
}

}  // namespace

TEST(Evaluate, ThresholdIsInclusive) {
  const auto f = HypothesisFamily::threshold();
  EXPECT_EQ(evaluate(f, Threshold{0.5}, Point::scalar(0.7)), Label::One);
  EXPECT_EQ(evaluate(f, Threshold{0.5}, Point::scalar(0.5)), Label::One);
  EXPECT_EQ(evaluate(f, Threshold{0.5}, Point::scalar(0.49)), Label::Zero);
}

TEST(Evaluate, RectangleOutsideFace) {
  const auto f = HypothesisFamily::rectangle(2);
  EXPECT_EQ(evaluate(f, Box{{0, 0}, {1, 1}}, Point::vector({2, 0.5})), Label::Zero);
  EXPECT_EQ(evaluate(f, Box{{0, 0}, {1, 1}}, Point::vector({1, 0})), Label::One);
}

TEST(Evaluate, FiniteLookup) {
  const auto f = HypothesisFamily::finite({{0, 1}, {1, 0}});
  EXPECT_EQ(evaluate(f, FiniteRow{0}, Point::node(1)), Label::One);
  EXPECT_THROW(evaluate(f, FiniteRow{5}, Point::node(0)), std::out_of_range);
  EXPECT_THROW(evaluate(f, FiniteRow{0}, Point::node(2)), std::out_of_range);
}

TEST(Evaluate, ClosedIntervals) {
  const auto f = HypothesisFamily::interval_union(2);
  const IntervalSet h{{{0.1, 0.3}, {0.6, 0.7}}};
  EXPECT_EQ(evaluate(f, h, Point::scalar(0.1)), Label::One);
  EXPECT_EQ(evaluate(f, h, Point::scalar(0.7)), Label::One);
  EXPECT_EQ(evaluate(f, h, Point::scalar(0.5)), Label::Zero);
}

TEST(Family, FiniteRejectsDuplicateRows) {
  EXPECT_THROW(HypothesisFamily::finite({{0, 1}, {0, 1}}), std::invalid_argument);
}

TEST(Family, DescribeParseRoundTrip) {
  const auto iv = HypothesisFamily::interval_union(2);
  const Hypothesis h = IntervalSet{{{0.1, 0.3}, {0.6, 0.7}}};
  const auto back = parse_hypothesis(iv, describe(h));
  EXPECT_EQ(describe(back), describe(h));
  const auto box = HypothesisFamily::rectangle(2);
  const Hypothesis b = Box{{0.2, 0.3}, {0.7, 0.8}};
  EXPECT_EQ(describe(parse_hypothesis(box, describe(b))), describe(b));
}

TEST(Restrict, FiniteFiltersColumn) {
  auto f = share(HypothesisFamily::finite({{0, 1}, {1, 0}, {1, 1}}));
  const auto vs = restrict(VersionSpace(f), node(0, 1));
  EXPECT_FALSE(vs.consistent_rows()[0]);
  EXPECT_TRUE(vs.consistent_rows()[1]);
  EXPECT_TRUE(vs.consistent_rows()[2]);
}

TEST(Restrict, ThresholdMonotone) {
  auto f = share(HypothesisFamily::threshold());
  const auto vs = restrict(VersionSpace(f, std::vector{ex(0.3, 1)}), ex(0.6, 0));
  EXPECT_FALSE(vs.is_consistent());
}

TEST(Restrict, Idempotent) {
  auto f = share(HypothesisFamily::finite({{0, 1}, {1, 0}, {1, 1}}));
  const VersionSpace vs(f, std::vector{node(0, 1)});
  EXPECT_EQ(restrict(vs, node(0, 1)).consistent_rows(), vs.consistent_rows());
}

TEST(Disagreement, ThresholdExamples) {
  auto f = share(HypothesisFamily::threshold());
  const VersionSpace vs(f, std::vector{ex(0.2, 0), ex(0.8, 1)});
  EXPECT_TRUE(vs.disagreement_status(Point::scalar(0.5)).in_disagreement());
  EXPECT_EQ(vs.disagreement_status(Point::scalar(0.9)), DisagreementStatus::agreed_on(Label::One));
  EXPECT_EQ(vs.disagreement_status(Point::scalar(0.8)), DisagreementStatus::agreed_on(Label::One));
  EXPECT_EQ(vs.disagreement_status(Point::scalar(0.2)), DisagreementStatus::agreed_on(Label::Zero));
}

TEST(Disagreement, RectangleClosureAndNegativeCapture) {
  auto f = share(HypothesisFamily::rectangle(1));
  const VersionSpace vs(f, std::vector{ex(0.4, 1), ex(0.6, 1), ex(0.9, 0)});
  EXPECT_EQ(vs.disagreement_status(Point::scalar(0.5)), DisagreementStatus::agreed_on(Label::One));
  EXPECT_EQ(vs.disagreement_status(Point::scalar(0.95)), DisagreementStatus::agreed_on(Label::Zero));
  EXPECT_TRUE(vs.disagreement_status(Point::scalar(0.7)).in_disagreement());
}

// Grid oracle: every interval [a, b] with endpoints on a fine grid.
TEST(Disagreement, RectangleAgreesWithGridEnumeration) {
  auto f = share(HypothesisFamily::rectangle(1));
  const std::vector<LabeledExample> data{ex(0.4, 1), ex(0.6, 1), ex(0.9, 0)};
  const VersionSpace vs(f, data);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(i / 40.0);
  for (double x : {0.05, 0.3, 0.5, 0.7, 0.85, 0.95}) {
    std::set<int> labels;
    for (double a : grid) {
      for (double b : grid) {
        if (a > b) continue;
        const Box h{{a}, {b}};
        const bool ok = std::all_of(data.begin(), data.end(), [&](const LabeledExample& e) {
          return evaluate(*f, h, e.point) == e.label;
        });
        if (ok) labels.insert(as_int(evaluate(*f, h, Point::scalar(x))));
      }
    }
    const auto st = vs.disagreement_status(Point::scalar(x));
    if (labels.size() == 2) {
      EXPECT_TRUE(st.in_disagreement()) << x;
    } else {
      ASSERT_EQ(labels.size(), 1U);
      EXPECT_EQ(st, DisagreementStatus::agreed_on(label_of(*labels.begin() == 1))) << x;
    }
  }
}

TEST(Disagreement, EmptyVersionSpaceThrows) {
  auto f = share(HypothesisFamily::threshold());
  const VersionSpace vs(f, std::vector{ex(0.3, 1), ex(0.6, 0)});
  EXPECT_THROW(vs.disagreement_status(Point::scalar(0.5)), EmptyVersionSpace);
}

TEST(Shatters, Examples) {
  auto thr = share(HypothesisFamily::threshold());
  const std::vector<Point> pair{Point::scalar(0.3), Point::scalar(0.7)};
  EXPECT_FALSE(shatters(VersionSpace(thr), pair));
  auto full = share(HypothesisFamily::finite({{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  const std::vector<Point> nodes{Point::node(0), Point::node(1)};
  EXPECT_TRUE(shatters(VersionSpace(full), nodes));
}

// Oracle: for each of the 16 patterns, search unions of two intervals whose
// endpoints sit on the points themselves.
TEST(Shatters, TwoIntervalsShatterFourPoints) {
  auto iv = share(HypothesisFamily::interval_union(2));
  const std::vector<double> xs{0.1, 0.3, 0.5, 0.9};
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(Point::scalar(x));
  EXPECT_TRUE(shatters(VersionSpace(iv), pts));

  for (int pattern = 0; pattern < 16; ++pattern) {
    bool found = false;
    for (std::size_t a1 = 0; a1 < 4 && !found; ++a1) {
      for (std::size_t b1 = a1; b1 < 4 && !found; ++b1) {
        for (std::size_t a2 = 0; a2 < 4 && !found; ++a2) {
          for (std::size_t b2 = a2; b2 < 4 && !found; ++b2) {
            for (int use = 0; use < 4 && !found; ++use) {
              std::vector<std::pair<double, double>> ivs;
              if (use & 1) ivs.emplace_back(xs[a1], xs[b1]);
              if (use & 2) ivs.emplace_back(xs[a2], xs[b2]);
              bool ok = true;
              for (std::size_t i = 0; i < 4; ++i) {
                bool in = false;
                for (auto [a, b] : ivs) in = in || (a <= xs[i] && xs[i] <= b);
                ok = ok && (in == (((pattern >> i) & 1) != 0));
              }
              found = ok;
            }
          }
        }
      }
    }
    EXPECT_TRUE(found) << pattern;
  }
}

TEST(Shatters, IntervalRunsCharacterization) {
  auto iv = share(HypothesisFamily::interval_union(1));
  const std::vector<Point> pts{Point::scalar(0.1), Point::scalar(0.3), Point::scalar(0.5)};
  EXPECT_FALSE(shatters(VersionSpace(iv), pts));  // 1,0,1 needs two runs
  const VersionSpace vs(iv, std::vector{ex(0.1, 1), ex(0.5, 1)});
  EXPECT_EQ(vs.disagreement_status(Point::scalar(0.3)), DisagreementStatus::agreed_on(Label::One));
}

TEST(Shatters, SubsetsOfShatteredSetsAreShattered) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = share(random_finite_family(rng, 6, 20));
    const VersionSpace vs(f);
    for (std::size_t mask = 1; mask < 64; ++mask) {
      std::vector<Point> pts;
      for (NodeId v = 0; v < 6; ++v) {
        if ((mask >> v) & 1U) pts.push_back(Point::node(v));
      }
      if (!vs.shatters(pts)) continue;
      for (std::size_t drop = 0; drop < pts.size() && pts.size() > 1; ++drop) {
        auto sub = pts;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        EXPECT_TRUE(vs.shatters(sub));
      }
    }
  }
}

TEST(VcDimension, Examples) {
  EXPECT_EQ(vc_dimension(HypothesisFamily::finite({{0}, {1}}).as<FiniteFamily>()), 1U);
  EXPECT_EQ(vc_dimension(HypothesisFamily::finite({{0, 0}, {1, 1}}).as<FiniteFamily>()), 1U);
}

TEST(VcDimension, MatchesExhaustiveEnumeration) {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto f = random_finite_family(rng, 8, 20);
    const auto& ff = f.as<FiniteFamily>();
    EXPECT_EQ(vc_dimension(ff), brute_vc(rows_of(ff), 8));
  }
}

TEST(VcDimension, RandomVcFamilyHitsTarget) {
  Rng rng(3);
  for (std::size_t d : {1, 2, 3}) {
    const auto f = random_vc_family(rng, 9, d);
    EXPECT_EQ(vc_dimension(f.as<FiniteFamily>()), d);
  }
}

TEST(TreeFamily, ChainHypotheses) {
  const auto f = HypothesisFamily::tree({std::nullopt, 0, 1}, {Label::Zero, Label::Zero, Label::Zero});
  const auto rows = rows_of(materialize(f.as<TreeFamily>()).as<FiniteFamily>());
  const std::set<std::vector<int>> got(rows.begin(), rows.end());
  const std::set<std::vector<int>> want{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}};
  EXPECT_EQ(got, want);
}

TEST(TreeFamily, StarHypotheses) {
  const auto f = HypothesisFamily::tree({std::nullopt, 0, 0}, {Label::Zero, Label::Zero, Label::Zero});
  const auto rows = rows_of(materialize(f.as<TreeFamily>()).as<FiniteFamily>());
  const std::set<std::vector<int>> got(rows.begin(), rows.end());
  const std::set<std::vector<int>> want{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 0, 1}};
  EXPECT_EQ(got, want);
}

TEST(TreeFamily, RejectsCycles) {
  EXPECT_THROW(HypothesisFamily::tree({1, 0}, {Label::Zero, Label::Zero}), std::invalid_argument);
}

TEST(TreeFamily, VcDimensionAtMostOne) {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    const auto shape = static_cast<TreeShape>(rng.index(3));
    auto parents = random_forest(rng, n, shape);
    std::vector<Label> ref(n);
    for (auto& y : ref) y = label_of(rng.bernoulli(0.5));
    const auto f = HypothesisFamily::tree(parents, ref);
    const auto d = vc_dimension(materialize(f.as<TreeFamily>()).as<FiniteFamily>());
    EXPECT_LE(d, 1U);
    if (n >= 2) {
      EXPECT_EQ(d, 1U);
    }
  }
}

TEST(Closure, Examples) {
  const std::vector<Point> one{Point::vector({0.2, 0.5})};
  const auto c1 = closure_rectangle(one);
  EXPECT_EQ(c1.lower, (std::vector<double>{0.2, 0.5}));
  EXPECT_EQ(c1.upper, (std::vector<double>{0.2, 0.5}));
  const std::vector<Point> three{Point::vector({0, 0}), Point::vector({1, 1}), Point::vector({0.5, 0.2})};
  const auto c3 = closure_rectangle(three);
  EXPECT_EQ(c3.lower, (std::vector<double>{0, 0}));
  EXPECT_EQ(c3.upper, (std::vector<double>{1, 1}));
  EXPECT_THROW(closure_rectangle(std::vector<Point>{}), std::invalid_argument);
}

TEST(Closure, TightOnRandomPoints) {
  Rng rng(2);
  std::vector<Point> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(Point::vector({rng.uniform(), rng.uniform(), rng.uniform()}));
  const auto c = closure_rectangle(pts);
  for (const auto& p : pts) EXPECT_TRUE(box_contains(c, p));
  for (std::size_t i = 0; i < 3; ++i) {
    for (int side = 0; side < 2; ++side) {
      Box shrunk = c;
      if (side == 0) {
        shrunk.lower[i] = std::nextafter(c.lower[i], 2.0);
      } else {
        shrunk.upper[i] = std::nextafter(c.upper[i], -1.0);
      }
      EXPECT_FALSE(std::all_of(pts.begin(), pts.end(), [&](const Point& p) { return box_contains(shrunk, p); }));
    }
  }
}

// Property: Agreed(y) iff restricting with the opposite label empties the space.
TEST(Disagreement, MatchesRestrictionEmptiness) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::shared_ptr<const HypothesisFamily> f;
    Hypothesis target;
    auto draw = [&]() -> Point { return Point::scalar(std::round(rng.uniform() * 20) / 20); };
    switch (trial % 4) {
      case 0:
        f = share(HypothesisFamily::threshold());
        target = Threshold{std::round(rng.uniform() * 20) / 20};
        break;
      case 1:
        f = share(HypothesisFamily::interval_union(2));
        target = IntervalSet{{{0.1, 0.3}, {0.55, 0.8}}};
        break;
      case 2:
        f = share(HypothesisFamily::rectangle(1));
        target = Box{{0.25}, {0.6}};
        break;
      default: {
        f = share(random_finite_family(rng, 7, 25));
        target = FiniteRow{rng.index(f->as<FiniteFamily>().rows.size())};
        break;
      }
    }
    VersionSpace vs(f);
    for (int i = 0; i < 6; ++i) {
      const Point x = f->kind() == FamilyKind::Finite ? Point::node(rng.index(7)) : draw();
      vs.add({x, evaluate(*f, target, x)});
    }
    const Point q = f->kind() == FamilyKind::Finite ? Point::node(rng.index(7)) : draw();
    const auto st = vs.disagreement_status(q);
    const bool can0 = vs.restricted({q, Label::Zero}).is_consistent();
    const bool can1 = vs.restricted({q, Label::One}).is_consistent();
    if (st.in_disagreement()) {
      EXPECT_TRUE(can0 && can1);
    } else {
      EXPECT_EQ(can0, *st.agreed == Label::Zero);
      EXPECT_EQ(can1, *st.agreed == Label::One);
    }
  }
}

TEST(Restrict, MonotoneOnFiniteFamilies) {
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = share(random_finite_family(rng, 6, 30));
    VersionSpace vs(f);
    for (int i = 0; i < 5; ++i) {
      const LabeledExample e{Point::node(rng.index(6)), label_of(rng.bernoulli(0.5))};
      const auto next = vs.restricted(e);
      EXPECT_TRUE((next.consistent_rows() & ~vs.consistent_rows()).none());
      vs = next;
    }
  }
}
