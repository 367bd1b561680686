#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "abstain/adversaries.hpp"
#include "abstain/gamma.hpp"
#include "abstain/generators.hpp"
#include "abstain/learners.hpp"
#include "abstain/protocol.hpp"
#include "abstain/shattering.hpp"
#include "abstain/verification.hpp"

using namespace abstain;

namespace {

std::shared_ptr<const HypothesisFamily> share(HypothesisFamily f) {
  return std::make_shared<const HypothesisFamily>(std::move(f));
}

std::shared_ptr<const HypothesisFamily> chain(std::size_t n) {
  std::vector<std::optional<NodeId>> parents(n);
  for (NodeId v = 1; v < n; ++v) parents[v] = v - 1;
  return share(HypothesisFamily::tree(parents, std::vector<Label>(n, Label::Zero)));
}

void feed(Learner& l, std::initializer_list<std::pair<double, int>> data) {
  for (auto [x, y] : data) l.observe(Point::scalar(x), label_of(y != 0));
}

}  // namespace

TEST(DisagreementLearner, Examples) {
  DisagreementLearner l(share(HypothesisFamily::threshold()));
  feed(l, {{0.2, 0}, {0.8, 1}});
  EXPECT_EQ(l.predict(Point::scalar(0.5)), Prediction::Abstain);
  EXPECT_EQ(l.predict(Point::scalar(0.1)), Prediction::Zero);
  EXPECT_EQ(l.predict(Point::scalar(0.95)), Prediction::One);
}

TEST(IntervalLearner, Examples) {
  IntervalLearner l;
  feed(l, {{0.2, 1}, {0.6, 1}});
  EXPECT_EQ(l.predict(Point::scalar(0.4)), Prediction::One);
  feed(l, {{0.4, 0}});
  EXPECT_EQ(l.predict(Point::scalar(0.3)), Prediction::Abstain);
  EXPECT_EQ(l.predict(Point::scalar(0.9)), Prediction::Abstain);
  EXPECT_EQ(l.predict(Point::scalar(0.4)), Prediction::Zero);
}

// Oracle: a same-label pair enclosing x with no seen point strictly between.
TEST(IntervalLearner, MatchesEnclosingPairScan) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    IntervalLearner l;
    std::vector<std::pair<double, int>> seen;
    for (int i = 0; i < 8; ++i) {
      const double x = std::round(rng.uniform() * 30) / 30;
      const int y = (x > 0.2 && x < 0.5) || x > 0.8 ? 1 : 0;
      l.observe(Point::scalar(x), label_of(y != 0));
      seen.emplace_back(x, y);
    }
    const double q = std::round(rng.uniform() * 30) / 30 + 1.0 / 60;
    std::optional<int> want;
    for (auto [a, ya] : seen) {
      for (auto [b, yb] : seen) {
        if (!(a < q && q < b) || ya != yb) continue;
        const bool gap = std::none_of(seen.begin(), seen.end(), [&](auto& p) {
          return a < p.first && p.first < b;
        });
        if (gap) want = ya;
      }
    }
    const auto got = l.predict(Point::scalar(q));
    if (want) {
      EXPECT_EQ(got, predict_label(label_of(*want == 1)));
    } else {
      EXPECT_EQ(got, Prediction::Abstain);
    }
  }
}

TEST(LevelLearner, DefaultThresholds) {
  const auto a = default_level_thresholds(2, 1000);
  EXPECT_DOUBLE_EQ(a[0], 1e-3);
  EXPECT_DOUBLE_EQ(a[1], 1e-6);
  EXPECT_THROW(default_level_thresholds(2, 0), std::invalid_argument);
}

TEST(LevelLearner, RejectsBadEta) {
  LevelConfig cfg;
  cfg.eta = 0.5;
  cfg.alpha = {0.1};
  cfg.start_level = 1;
  EXPECT_THROW(LevelLearner(share(HypothesisFamily::finite({{0}, {1}})),
                            DomainDistribution::uniform_nodes(1), cfg, Rng(1)),
               std::invalid_argument);
}

TEST(LevelLearner, RequiresEnumerablePmfOrSamples) {
  LevelConfig cfg;
  cfg.alpha = {0.1};
  cfg.start_level = 1;
  EXPECT_THROW(LevelLearner(share(HypothesisFamily::threshold()), DomainDistribution::uniform_unit(1),
                            cfg, Rng(1)),
               std::invalid_argument);
}

TEST(LevelLearner, DecisionRuleMatchesRecomputedRho) {
  Rng rng(21);
  int predicted = 0;
  int abstained = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t m = 3 + rng.index(4);
    auto f = share(random_finite_family(rng, m, 3 + rng.index(20)));
    const auto dist = dyadic_node_pmf(rng, m);
    const auto pmf = dist.support();
    const double eta = trial % 2 == 0 ? 0.6 : 0.9;
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 2);
    LevelConfig cfg;
    cfg.eta = eta;
    cfg.alpha = std::vector<double>(k, 0.0);
    cfg.start_level = k;
    LevelLearner l(f, dist, cfg, Rng(1));
    VersionSpace vs(f);
    const auto& rows = f->as<FiniteFamily>().rows;
    const std::size_t target = rng.index(rows.size());
    for (int step = 0; step < 4 && l.level() == k; ++step) {
      const NodeId x = rng.index(m);
      const double r = rho_k_exact(vs, pmf, k).value;
      const double r0 = rho_k_exact(vs.restricted({Point::node(x), Label::Zero}), pmf, k).value;
      const double r1 = rho_k_exact(vs.restricted({Point::node(x), Label::One}), pmf, k).value;
      const auto got = l.predict(Point::node(x));
      if (std::min(r0, r1) >= eta * r) {
        EXPECT_EQ(got, Prediction::Abstain);
        ++abstained;
      } else {
        EXPECT_EQ(got, r1 > r0 ? Prediction::One : Prediction::Zero);
        ++predicted;
      }
      EXPECT_DOUBLE_EQ(*l.diagnostics().rho_k, r);
      const Label y = label_of(rows[target][x]);
      l.observe(Point::node(x), y);
      vs.add({Point::node(x), y});
    }
  }
  EXPECT_GT(predicted, 0);
  EXPECT_GT(abstained, 0);
}

// After x0 -> 1 the points 1..9 (mass 0.9) stay shattered, after x0 -> 0
// only points 1 and 2 (mass 0.2) do.
TEST(LevelLearner, PredictsArgmaxWhenOneSideCollapses) {
  const std::size_t m = 11;
  std::vector<std::vector<int>> rows;
  for (std::size_t j = 1; j <= 9; ++j) {
    std::vector<int> r(m, 0);
    r[0] = 1;
    r[j] = 1;
    rows.push_back(r);
  }
  {
    std::vector<int> r(m, 0);
    r[0] = 1;
    rows.push_back(r);
  }
  for (std::size_t j = 1; j <= 2; ++j) {
    std::vector<int> r(m, 0);
    r[j] = 1;
    rows.push_back(r);
  }
  {
    std::vector<int> r(m, 0);
    rows.push_back(r);
  }
  auto f = share(HypothesisFamily::finite(rows));
  std::vector<Point> pts;
  std::vector<double> probs;
  for (NodeId v = 0; v < m; ++v) {
    pts.push_back(Point::node(v));
    probs.push_back(v >= 1 && v <= 9 ? 0.1 : 0.05);
  }
  const auto dist = DomainDistribution::finite(pts, probs);
  const VersionSpace vs(f);
  const double r = rho_k_exact(vs, dist.support(), 1).value;
  const double r1 = rho_k_exact(vs.restricted({Point::node(0), Label::One}), dist.support(), 1).value;
  const double r0 = rho_k_exact(vs.restricted({Point::node(0), Label::Zero}), dist.support(), 1).value;
  EXPECT_NEAR(r1 / r, 0.9 / 0.95, 1e-12);
  EXPECT_NEAR(r0 / r, 0.2 / 0.95, 1e-12);
  LevelConfig cfg;
  cfg.alpha = {0.0};
  cfg.start_level = 1;
  LevelLearner l(f, dist, cfg, Rng(1));
  EXPECT_EQ(l.predict(Point::node(0)), Prediction::One);
}

TEST(LevelLearner, LevelZeroIsDisagreementBased) {
  auto f = share(HypothesisFamily::finite({{0, 0}, {1, 0}, {1, 1}}));
  LevelConfig cfg;
  cfg.alpha = {1.0};
  cfg.start_level = 1;
  LevelLearner l(f, DomainDistribution::uniform_nodes(2), cfg, Rng(1));
  l.predict(Point::node(1));
  l.observe(Point::node(1), Label::Zero);
  EXPECT_EQ(l.level(), 0U);
  EXPECT_EQ(l.predict(Point::node(0)), Prediction::Abstain);
  l.observe(Point::node(0), Label::One);
  EXPECT_EQ(l.predict(Point::node(1)), Prediction::Zero);
  EXPECT_EQ(l.phases().size(), 2U);
}

TEST(LevelLearner, DropsExactlyOneLevelWithoutCascade) {
  auto f = share(HypothesisFamily::finite({{0, 0}, {1, 1}}));
  LevelConfig cfg;
  cfg.alpha = {1.0, 1.0};
  cfg.start_level = 2;
  LevelLearner l(f, DomainDistribution::uniform_nodes(2), cfg, Rng(1));
  l.predict(Point::node(0));
  l.observe(Point::node(0), Label::One);
  EXPECT_EQ(l.level(), 1U);
}

TEST(Vc1Learner, AgreedPointsFollowTheVersionSpace) {
  for (auto rule : {Vc1Rule::Symmetric, Vc1Rule::MainText}) {
    Vc1Learner l(chain(4), 100.0, rule);
    l.observe(Point::node(2), Label::One);
    EXPECT_EQ(l.predict(Point::node(0)), Prediction::One);
    EXPECT_EQ(l.predict(Point::node(1)), Prediction::One);
  }
}

TEST(Vc1Learner, SymmetricAbstainsWhenBothCountsSmall) {
  Vc1Learner l(chain(4), 1.0, Vc1Rule::Symmetric);
  EXPECT_EQ(l.predict(Point::node(0)), Prediction::Abstain);
  EXPECT_EQ(*l.diagnostics().gamma0, 0U);
  EXPECT_EQ(*l.diagnostics().gamma1, 0U);
}

TEST(Vc1Learner, AlphaZeroNeverAbstainsOnTree) {
  Vc1Learner l(chain(4), 0.0, Vc1Rule::Symmetric);
  EXPECT_EQ(l.predict(Point::node(0)), Prediction::Zero);
}

TEST(Vc1Learner, RejectsNonTreeFamily) {
  EXPECT_THROW(Vc1Learner(share(HypothesisFamily::threshold()), 1.0, Vc1Rule::Symmetric),
               std::invalid_argument);
}

TEST(Vc1Learner, CountsMatchBruteForce) {
  Rng rng(31);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 2 + rng.index(9);
    auto parents = random_forest(rng, n, static_cast<TreeShape>(trial % 3));
    std::vector<Label> ref(n);
    for (auto& y : ref) y = label_of(rng.bernoulli(0.5));
    auto f = share(HypothesisFamily::tree(parents, ref));
    const auto& tree = f->as<TreeFamily>();
    const TreeChain target{rng.index(n + 1) == n ? std::nullopt : std::optional<NodeId>(rng.index(n))};
    Vc1Learner l(f, 2.0, Vc1Rule::Symmetric);
    std::vector<LabeledExample> data;
    for (int step = 0; step < 8; ++step) {
      const Point x = Point::node(rng.index(n));
      l.predict(x);
      EXPECT_EQ(*l.diagnostics().gamma0, brute_gamma_count(tree, data, LabeledExample{x, Label::Zero}));
      EXPECT_EQ(*l.diagnostics().gamma1, brute_gamma_count(tree, data, LabeledExample{x, Label::One}));
      const Label y = evaluate(*f, target, x);
      l.observe(x, y);
      data.push_back({x, y});
    }
  }
}

TEST(Vc1Learner, PotentialHoldsOnChainOfForty) {
  auto f = chain(40);
  EpisodeSetup setup;
  setup.family = f;
  setup.target = TreeChain{NodeId{25}};
  setup.distribution = DomainDistribution::uniform_nodes(40);
  setup.learner.kind = LearnerKind::Vc1;
  setup.learner.alpha = 6.0;
  setup.learner.rule = Vc1Rule::Symmetric;
  setup.adversary.strategy = AdversaryKind::AttackabilitySearch;
  setup.horizon = 400;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto t = run_episode(setup, seed);
    for (const auto& rep : check_gamma_potential(t, f->as<TreeFamily>(), 6.0)) {
      EXPECT_TRUE(rep.holds) << rep.instance << " " << rep.lhs << " > " << rep.rhs;
    }
  }
}

TEST(Gamma, Examples) {
  auto f = chain(3);
  const Hypothesis ref = TreeChain{};
  EXPECT_TRUE(gamma_set({}, f, ref).empty());
  // a -> b -> c, S = {(a,1),(b,1)}: leaving out a keeps b, which fixes a;
  // leaving out b keeps only a, so b is still in disagreement.
  const std::vector<LabeledExample> s{{Point::node(0), Label::One}, {Point::node(1), Label::One}};
  EXPECT_EQ(gamma_set(s, f, ref), std::vector<Point>{Point::node(1)});
  EXPECT_EQ(gamma_set_generic(s, f, ref, std::nullopt), std::vector<Point>{Point::node(1)});
  EXPECT_EQ(brute_gamma_count(f->as<TreeFamily>(), s), 1U);
}

TEST(Gamma, AllLabelsAgreeWithReference) {
  auto f = chain(4);
  const std::vector<LabeledExample> s{{Point::node(1), Label::Zero}, {Point::node(3), Label::Zero}};
  // S_f is empty, so every x of S in Dis_1 of the full family counts.
  EXPECT_EQ(gamma_set(s, f, TreeChain{}), (std::vector<Point>{Point::node(1), Point::node(3)}));
}

TEST(Gamma, FastPathMatchesGenericAndBrute) {
  Rng rng(37);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    auto parents = random_forest(rng, n, static_cast<TreeShape>(trial % 3));
    std::vector<Label> ref(n);
    for (auto& y : ref) y = label_of(rng.bernoulli(0.5));
    auto f = share(HypothesisFamily::tree(parents, ref));
    const auto& tree = f->as<TreeFamily>();
    const TreeChain target{rng.bernoulli(0.2) ? std::nullopt : std::optional<NodeId>(rng.index(n))};
    std::vector<LabeledExample> data;
    TreeGammaIndex index(tree);
    for (std::size_t i = 0, len = rng.index(8); i < len; ++i) {
      const Point x = Point::node(rng.index(n));
      data.push_back({x, evaluate(*f, target, x)});
      index.add(data.back());
    }
    std::optional<LabeledExample> restriction;
    if (rng.bernoulli(0.7)) restriction = LabeledExample{Point::node(rng.index(n)), label_of(rng.bernoulli(0.5))};
    const auto fast = gamma_set(data, f, TreeChain{}, restriction);
    const auto generic = gamma_set_generic(data, f, TreeChain{}, restriction);
    EXPECT_EQ(fast, generic);
    EXPECT_EQ(fast.size(), brute_gamma_count(tree, data, restriction));
    EXPECT_EQ(index.count(restriction), fast.size());
  }
}

TEST(RectangleLearner, Examples) {
  auto f = share(HypothesisFamily::rectangle(1));
  RectangleLearner l(f, 3.0);
  EXPECT_EQ(l.predict(Point::scalar(0.5)), Prediction::Zero);
  feed(l, {{0.4, 1}, {0.6, 1}});
  EXPECT_EQ(l.predict(Point::scalar(0.5)), Prediction::One);
  feed(l, {{0.65, 0}, {0.7, 0}, {0.8, 0}});
  // Direct scan: priors inside (0.6, 0.9].
  std::size_t scan = 0;
  for (double h : {0.4, 0.6, 0.65, 0.7, 0.8}) scan += (0.6 < h && h <= 0.9) ? 1 : 0;
  EXPECT_EQ(scan, 3U);
  EXPECT_EQ(l.witnesses(Point::scalar(0.9)), scan);
  EXPECT_EQ(l.predict(Point::scalar(0.9)), Prediction::Zero);
}

TEST(RectangleLearner, WitnessBranchInsideDisagreement) {
  auto f = share(HypothesisFamily::rectangle(2));
  for (double alpha : {1.0, 2.0}) {
    RectangleLearner l(f, alpha);
    l.observe(Point::vector({0.4, 0.4}), Label::One);
    l.observe(Point::vector({0.6, 0.6}), Label::One);
    l.observe(Point::vector({0.7, 0.0}), Label::Zero);
    const Point x = Point::vector({0.9, 0.5});
    EXPECT_EQ(l.witnesses(x), 1U);
    EXPECT_EQ(l.predict(x), alpha <= 1.0 ? Prediction::Zero : Prediction::Abstain);
  }
}

TEST(RectangleLearner, NeverPredictsOneInDisagreement) {
  Rng rng(41);
  auto f = share(HypothesisFamily::rectangle(2));
  const Box target{{0.2, 0.3}, {0.7, 0.6}};
  RectangleLearner l(f, 2.0);
  VersionSpace vs(f);
  for (int t = 0; t < 2000; ++t) {
    const Point x = Point::vector({rng.uniform(), rng.uniform()});
    const auto p = l.predict(x);
    if (vs.size() > 0 && vs.disagreement_status(x).in_disagreement()) {
      EXPECT_NE(p, Prediction::One);
    }
    const Label y = evaluate(*f, target, x);
    if (y == Label::Zero) {
      EXPECT_NE(p, Prediction::One);
    }
    l.observe(x, y);
    vs.add({x, y});
  }
}

TEST(ErmLearner, FollowsSmallestConsistentThreshold) {
  ErmLearner l(share(HypothesisFamily::threshold()));
  feed(l, {{0.2, 0}, {0.8, 1}});
  EXPECT_EQ(l.predict(Point::scalar(0.9)), Prediction::One);
  EXPECT_EQ(l.predict(Point::scalar(0.1)), Prediction::Zero);
  const auto a = l.predict(Point::scalar(0.5));
  EXPECT_NE(a, Prediction::Abstain);
  EXPECT_EQ(l.predict(Point::scalar(0.5)), a);
}

TEST(LearnerFactory, ParsesKindsAndChecksFamilies) {
  EXPECT_EQ(parse_learner_kind("vc1"), LearnerKind::Vc1);
  EXPECT_THROW(parse_learner_kind("svm"), std::invalid_argument);
  LearnerSpec spec;
  spec.kind = LearnerKind::Interval;
  EXPECT_THROW(make_learner(spec, share(HypothesisFamily::rectangle(2)),
                            DomainDistribution::uniform_unit(2), Rng(1)),
               std::invalid_argument);
}
