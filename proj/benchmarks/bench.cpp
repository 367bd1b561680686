#include <benchmark/benchmark.h>

#include "abstain/gamma.hpp"
#include "abstain/generators.hpp"
#include "abstain/protocol.hpp"
#include "abstain/shattering.hpp"

using namespace abstain;

namespace {

void BM_RhoExact(benchmark::State& state) {
  Rng rng(7);
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  auto fam = std::make_shared<const HypothesisFamily>(random_vc_family(rng, m, 2));
  const VersionSpace vs(fam);
  const auto pmf = DomainDistribution::uniform_nodes(m).support();
  for (auto _ : state) benchmark::DoNotOptimize(rho_k_exact(vs, pmf, k).value);
}
BENCHMARK(BM_RhoExact)->Args({12, 1})->Args({12, 2})->Args({24, 2});

void BM_TreeGammaCount(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto fam = HypothesisFamily::tree(random_forest(rng, n, TreeShape::Mixed), std::vector<Label>(n, Label::Zero));
  const auto& tree = fam.as<TreeFamily>();
  TreeGammaIndex index(tree);
  const TreeChain target{n - 1};
  for (std::size_t i = 0; i < 4 * n; ++i) {
    const Point x = Point::node(rng.index(n));
    index.add({x, evaluate(fam, target, x)});
  }
  std::size_t v = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.count(LabeledExample{Point::node(v), Label::One}));
    v = (v + 1) % n;
  }
}
BENCHMARK(BM_TreeGammaCount)->Arg(50)->Arg(500);

void BM_ThresholdEpisode(benchmark::State& state) {
  EpisodeSetup s;
  s.family = std::make_shared<const HypothesisFamily>(HypothesisFamily::threshold());
  s.target = Threshold{0.5};
  s.adversary.strategy = AdversaryKind::BoundaryAttack;
  s.horizon = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(s, seed++).ledger.abstention);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ThresholdEpisode)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
