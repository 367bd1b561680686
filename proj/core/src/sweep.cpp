#include "abstain/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abstain/config.hpp"
#include "abstain/generators.hpp"
#include "abstain/shattering.hpp"

namespace abstain {

namespace {

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.index(hi - lo + 1); }

FinitePmf node_pmf(Rng& rng, std::size_t m) { return dyadic_node_pmf(rng, m).support(); }

void inclusion_exclusion(const SweepConfig& c, Rng& rng, std::vector<LemmaReport>& out) {
  for (std::size_t i = 0; i < c.instances; ++i) {
    const std::size_t m = between(rng, 2, std::max<std::size_t>(c.max_points, 2));
    const std::size_t cap = std::min<std::size_t>(std::size_t{1} << m, 32);
    const auto fam = random_finite_family(rng, m, between(rng, 1, cap), 0.5);
    const auto& ff = fam.as<FiniteFamily>();
    const NodeId x = rng.index(m);
    std::vector<NodeId> others;
    for (NodeId v = 0; v < m; ++v) {
      if (v != x) others.push_back(v);
    }
    const std::size_t k = between(rng, 1, std::min<std::size_t>(3, others.size()));
    std::vector<NodeId> tuple;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = rng.index(others.size());
      tuple.push_back(others[pick]);
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    auto rep = check_inclusion_exclusion(ff, x, tuple);
    rep.instance = "i=" + std::to_string(i) + "," + rep.instance;
    out.push_back(std::move(rep));
  }
}

void prob_abs(const SweepConfig& c, Rng& rng, std::vector<LemmaReport>& out) {
  for (std::size_t i = 0; i < c.instances;) {
    const std::size_t m = between(rng, 3, std::max<std::size_t>(c.max_points, 3));
    const std::size_t cap = std::min<std::size_t>(std::size_t{1} << m, 24);
    auto fam = std::make_shared<const HypothesisFamily>(random_finite_family(rng, m, between(rng, 2, cap), 0.5));
    const FinitePmf pmf = node_pmf(rng, m);
    const VersionSpace vs(fam);
    if (rho_k_exact(vs, pmf, 1).value == 0.0) continue;
    for (std::size_t k : {1, 2}) {
      if (rho_k_exact(vs, pmf, k).value == 0.0) continue;
      for (double eta : {0.55, 0.6, 0.9}) {
        auto rep = verify_prob_abs(fam, pmf, k, eta);
        rep.instance = "i=" + std::to_string(i) + "," + rep.instance;
        out.push_back(std::move(rep));
      }
    }
    ++i;
  }
}

void rho_monotonicity(const SweepConfig& c, Rng& rng, std::vector<LemmaReport>& out) {
  for (std::size_t i = 0; i < c.instances; ++i) {
    const std::size_t m = between(rng, 2, std::max<std::size_t>(c.max_points, 2));
    const std::size_t cap = std::min<std::size_t>(std::size_t{1} << m, 24);
    auto fam = std::make_shared<const HypothesisFamily>(random_finite_family(rng, m, between(rng, 1, cap), 0.5));
    const FinitePmf pmf = node_pmf(rng, m);
    std::vector<LabeledExample> restrictions;
    for (int j = 0; j < 3; ++j) restrictions.push_back({Point::node(rng.index(m)), label_of(rng.bernoulli(0.5))});
    for (auto& rep : check_rho_monotonicity(fam, pmf, 3, restrictions)) {
      rep.instance = "i=" + std::to_string(i) + "," + rep.instance;
      out.push_back(std::move(rep));
    }
  }
}

TreeShape random_shape(Rng& rng) {
  switch (rng.index(3)) {
    case 0: return TreeShape::Chain;
    case 1: return TreeShape::Star;
    default: return TreeShape::Mixed;
  }
}

HypothesisFamily random_tree(Rng& rng, std::size_t n) {
  auto parents = random_forest(rng, n, random_shape(rng));
  std::vector<Label> reference(n);
  for (auto& y : reference) y = label_of(rng.bernoulli(0.5));
  return HypothesisFamily::tree(std::move(parents), std::move(reference));
}

TreeChain random_chain(Rng& rng, std::size_t n) {
  const std::size_t pick = rng.index(n + 1);
  return TreeChain{pick == n ? std::nullopt : std::optional<NodeId>(pick)};
}

void attackable(const SweepConfig& c, Rng& rng, std::vector<LemmaReport>& out) {
  for (std::size_t i = 0; i < c.instances; ++i) {
    const std::size_t n = between(rng, 1, std::min<std::size_t>(c.max_points, 14));
    const auto fam = random_tree(rng, n);
    const Hypothesis target = random_chain(rng, n);
    const std::size_t size = rng.index(2 * n + 1);
    std::vector<LabeledExample> data;
    for (std::size_t j = 0; j < size; ++j) {
      const Point x = Point::node(rng.index(n));
      data.push_back({x, evaluate(fam, target, x)});
    }
    const double alpha = 0.5 * static_cast<double>(rng.index(9));
    const auto hits = enumerate_attackable(fam.as<TreeFamily>(), data, alpha, target, c.reading);
    LemmaReport rep;
    rep.lemma = "attackable";
    rep.instance = "i=" + std::to_string(i) + ",nodes=" + std::to_string(n) + ",examples=" +
                   std::to_string(size) + ",alpha=" + format_double(alpha) + "," + describe(target);
    rep.lhs = static_cast<double>(hits.size());
    rep.rhs = alpha;
    rep.holds = rep.lhs <= rep.rhs;
    out.push_back(std::move(rep));
  }
}

void gamma_potential(const SweepConfig& c, Rng& rng, std::vector<LemmaReport>& out) {
  for (std::size_t i = 0; i < c.instances; ++i) {
    const std::size_t n = between(rng, 2, std::max<std::size_t>(c.max_points, 2));
    auto fam = std::make_shared<const HypothesisFamily>(random_tree(rng, n));
    EpisodeSetup s;
    s.family = fam;
    s.target = random_chain(rng, n);
    s.distribution = DomainDistribution::uniform_nodes(n);
    s.horizon = c.horizon;
    s.learner.kind = LearnerKind::Vc1;
    s.learner.rule = Vc1Rule::Symmetric;
    s.learner.alpha = resolve_alpha("sqrt_t_over_log_t", std::max<std::size_t>(c.horizon, 2), 1);
    s.adversary.strategy = AdversaryKind::AttackabilitySearch;
    const auto t = run_episode(s, rng.next());
    for (auto& rep : check_gamma_potential(t, fam->as<TreeFamily>(), s.learner.alpha)) {
      rep.instance = "i=" + std::to_string(i) + "," + rep.instance;
      out.push_back(std::move(rep));
    }
  }
}

void level_contraction(const SweepConfig& c, Rng& rng, std::vector<LemmaReport>& out) {
  for (std::size_t i = 0; i < c.instances; ++i) {
    const std::size_t m = between(rng, 3, std::max<std::size_t>(c.max_points, 3));
    const std::size_t d = between(rng, 1, std::min<std::size_t>(2, m));
    auto fam = std::make_shared<const HypothesisFamily>(random_vc_family(rng, m, d));
    EpisodeSetup s;
    s.family = fam;
    s.target = FiniteRow{rng.index(fam->as<FiniteFamily>().rows.size())};
    s.distribution = dyadic_node_pmf(rng, m);
    s.horizon = c.horizon;
    s.learner.kind = LearnerKind::Level;
    s.learner.level.alpha = default_level_thresholds(d, c.horizon);
    s.adversary.strategy = AdversaryKind::BoundaryAttack;
    s.adversary.budget = c.horizon / 2;
    const auto t = run_episode(s, rng.next());
    for (auto& rep : check_level_contraction(t, fam, s.distribution.support(), s.learner.level.eta,
                                             s.learner.level.labels_on_abstain)) {
      rep.instance = "i=" + std::to_string(i) + "," + rep.instance;
      out.push_back(std::move(rep));
    }
  }
}

}  // namespace

std::string_view to_string(SweepLemma l) {
  switch (l) {
    case SweepLemma::InclusionExclusion: return "inclusion_exclusion";
    case SweepLemma::ProbAbs: return "prob_abs";
    case SweepLemma::RhoMonotonicity: return "rho_monotonicity";
    case SweepLemma::Attackable: return "attackable";
    case SweepLemma::GammaPotential: return "gamma_potential";
    case SweepLemma::LevelContraction: return "level_contraction";
  }
  return "?";
}

SweepLemma parse_sweep_lemma(std::string_view text) {
  for (auto l : {SweepLemma::InclusionExclusion, SweepLemma::ProbAbs, SweepLemma::RhoMonotonicity,
                 SweepLemma::Attackable, SweepLemma::GammaPotential, SweepLemma::LevelContraction}) {
    if (to_string(l) == text) return l;
  }
  throw std::invalid_argument("unknown lemma '" + std::string(text) + "'");
}

SweepConfig parse_sweep_config(std::string_view text, std::span<const std::string> overrides) {
  ConfigEntries e = parse_entries(text);
  for (const auto& o : overrides) apply_override(e, o);
  std::vector<std::string> errors;
  SweepConfig c;
  auto get = [&](const std::string& key, auto&& apply) {
    auto it = e.find("sweep." + key);
    if (it == e.end()) return;
    try {
      apply(it->second);
    } catch (const std::exception& ex) {
      errors.push_back("sweep." + key + ": " + ex.what());
    }
  };
  for (const auto& [k, v] : e) {
    static const std::vector<std::string> known = {"sweep.lemma", "sweep.instances", "sweep.seed", "sweep.max_points",
                                                   "sweep.horizon", "sweep.reading", "sweep.output"};
    if (std::find(known.begin(), known.end(), k) == known.end()) errors.push_back(k + ": unknown key");
  }
  if (!e.count("sweep.lemma")) errors.push_back("sweep.lemma: missing");
  get("lemma", [&](const std::string& v) { c.lemma = parse_sweep_lemma(v); });
  get("instances", [&](const std::string& v) { c.instances = std::stoul(v); });
  get("seed", [&](const std::string& v) { c.seed = std::stoull(v); });
  get("max_points", [&](const std::string& v) { c.max_points = std::stoul(v); });
  get("horizon", [&](const std::string& v) { c.horizon = std::stoul(v); });
  get("output", [&](const std::string& v) { c.output = v; });
  get("reading", [&](const std::string& v) {
    if (v == "appendix") {
      c.reading = AttackReading::Appendix;
    } else if (v == "main_text") {
      c.reading = AttackReading::MainText;
    } else {
      throw std::invalid_argument("expected appendix or main_text");
    }
  });
  if (c.horizon == 0) errors.push_back("sweep.horizon: must be at least 1");
  if (!errors.empty()) throw ValidationError(errors);
  return c;
}

std::vector<LemmaReport> run_sweep(const SweepConfig& config) {
  Rng rng = Rng::stream(config.seed, Stream::Instance);
  std::vector<LemmaReport> out;
  switch (config.lemma) {
    case SweepLemma::InclusionExclusion: inclusion_exclusion(config, rng, out); break;
    case SweepLemma::ProbAbs: prob_abs(config, rng, out); break;
    case SweepLemma::RhoMonotonicity: rho_monotonicity(config, rng, out); break;
    case SweepLemma::Attackable: attackable(config, rng, out); break;
    case SweepLemma::GammaPotential: gamma_potential(config, rng, out); break;
    case SweepLemma::LevelContraction: level_contraction(config, rng, out); break;
  }
  return out;
}

}  // namespace abstain
