#include "abstain/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "abstain/transcript_io.hpp"

namespace abstain {

namespace {

using Json = nlohmann::ordered_json;

Json metric_json(const MetricSummary& m, const std::optional<Bound>& bound) {
  Json j;
  j["mean"] = m.mean;
  j["sd"] = m.sd;
  j["standard_error"] = m.standard_error();
  j["min"] = m.min;
  j["max"] = m.max;
  j["ci_low"] = m.ci_low;
  j["ci_high"] = m.ci_high;
  j["n"] = m.n;
  if (bound) {
    j["bound"] = bound->value;
    j["bound_formula"] = bound->formula;
    j["mean_plus_2se_within_bound"] = m.mean + 2.0 * m.standard_error() <= bound->value;
    j["max_within_bound"] = m.max <= bound->value;
  }
  return j;
}

std::size_t dimension_of(const HypothesisFamily& f) {
  return f.kind() == FamilyKind::Rectangle ? f.as<RectangleFamily>().dimension : 1;
}

}  // namespace

TheoremBounds theorem_bounds(const ExperimentConfig& config) {
  const auto& s = config.setup;
  const auto& family = *s.family;
  const double T = static_cast<double>(s.horizon);
  const double lnT = std::log(T);
  const double alpha = s.learner.alpha;
  TheoremBounds b;
  switch (s.learner.kind) {
    case LearnerKind::Disagreement:
      b.misclassification = Bound{0.0, "0"};
      if (family.kind() == FamilyKind::Threshold) b.abstention = Bound{2.0 * lnT, "2 ln T"};
      break;
    case LearnerKind::Interval: {
      const double d = family.kind() == FamilyKind::IntervalUnion
                           ? static_cast<double>(family.as<IntervalUnionFamily>().max_intervals)
                           : 1.0;
      b.misclassification = Bound{2.0 * d, "2d"};
      b.abstention = Bound{2.0 * d * lnT, "2d ln T"};
      break;
    }
    case LearnerKind::Level: {
      const double d = static_cast<double>(s.learner.level.start_level ? s.learner.level.start_level
                                                                        : family_vc_dimension(family));
      b.misclassification = Bound{d * d * lnT, "d^2 ln T"};
      b.abstention = Bound{6.0 * d, "6d"};
      break;
    }
    case LearnerKind::Vc1:
      if (alpha > 0.0) b.misclassification = Bound{2.0 * T / alpha, "2T/alpha"};
      b.abstention = Bound{alpha * lnT, "alpha ln T"};
      break;
    case LearnerKind::Rectangle: {
      const double p = static_cast<double>(dimension_of(family));
      if (alpha > 0.0) b.misclassification = Bound{p * T / alpha, "pT/alpha"};
      b.abstention = Bound{2.0 * (alpha + p) * lnT, "2(alpha + p) ln T"};
      break;
    }
    case LearnerKind::Erm:
      break;
  }
  return b;
}

std::vector<Transcript> run_seeds(const ExperimentConfig& config) {
  const std::size_t n = config.seeds.size();
  std::vector<Transcript> out(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = run_episode(config.setup, config.seeds[i]);
        out[i].fingerprint = config.fingerprint;
        out[i].run_id = i;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(config.threads, n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

std::string summary_json(const ExperimentConfig& config, const AggregateSummary& summary) {
  const auto& s = config.setup;
  const auto bounds = theorem_bounds(config);
  const double T = static_cast<double>(s.horizon);
  Json j;
  j["name"] = config.name;
  j["fingerprint"] = summary.fingerprint;
  j["horizon"] = s.horizon;
  j["runs"] = summary.runs;
  j["seeds"] = config.seeds;
  j["family"] = s.family->describe();
  j["target"] = describe(s.target);
  j["distribution"] = s.distribution.describe();
  Json learner;
  learner["kind"] = std::string(to_string(s.learner.kind));
  if (s.learner.kind == LearnerKind::Vc1 || s.learner.kind == LearnerKind::Rectangle) {
    learner["alpha"] = s.learner.alpha;
    const double p = static_cast<double>(dimension_of(*s.family));
    learner["alpha_theorem"] = std::sqrt(p * T);
    if (s.horizon > 1) learner["alpha_proof"] = std::sqrt(p * T / std::log(T));
  }
  if (s.learner.kind == LearnerKind::Vc1) learner["rule"] = std::string(to_string(s.learner.rule));
  if (s.learner.kind == LearnerKind::Level) {
    learner["eta"] = s.learner.level.eta;
    learner["alpha_k"] = s.learner.level.alpha;
    learner["labels_on_abstain"] = s.learner.level.labels_on_abstain;
    learner["cascade_levels"] = s.learner.level.cascade;
    learner["mc_samples"] = s.learner.level.rho.mc_samples;
  }
  j["learner"] = learner;
  Json adv;
  adv["strategy"] = std::string(to_string(s.adversary.strategy));
  if (s.adversary.budget) {
    adv["budget"] = *s.adversary.budget;
  } else {
    adv["budget"] = "unlimited";
  }
  adv["rate"] = s.adversary.rate;
  j["adversary"] = adv;
  Json metrics;
  metrics["misclassification_error"] = metric_json(summary.misclassification, bounds.misclassification);
  metrics["abstention_error"] = metric_json(summary.abstention, bounds.abstention);
  metrics["total_error"] = metric_json(summary.total, std::nullopt);
  metrics["injected_abstentions"] = metric_json(summary.injected_abstentions, std::nullopt);
  metrics["injections"] = metric_json(summary.injections, std::nullopt);
  j["metrics"] = metrics;
  return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  ExperimentResult result;
  result.transcripts = run_seeds(config);
  result.summary = aggregate(result.transcripts);

  const fs::path root(config.output);
  std::error_code ec;
  fs::create_directories(root / "transcripts", ec);
  if (ec) throw std::ios_base::failure("cannot create '" + (root / "transcripts").string() + "': " + ec.message());
  for (const auto& t : result.transcripts) {
    const auto path = (root / "transcripts" / ("seed_" + std::to_string(t.seed) + ".csv")).string();
    write_transcript_file(path, t, &config.entries);
    result.transcript_paths.push_back(path);
  }
  result.summary_path = (root / "summary.json").string();
  std::ofstream out(result.summary_path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + result.summary_path + "'");
  out << summary_json(config, result.summary);
  if (!out) throw std::ios_base::failure("write failed for '" + result.summary_path + "'");
  return result;
}

}  // namespace abstain
