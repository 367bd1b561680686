#include "abstain/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abstain {

void ErrorLedger::record(const RoundRecord& r) {
  if (r.yhat == Prediction::Abstain) {
    if (r.injected) {
      ++injected_abstentions;
    } else {
      ++abstention;
    }
  } else if (r.yhat != predict_label(r.y)) {
    ++misclassification;
  }
}

Transcript run_episode(const EpisodeSetup& setup, std::uint64_t seed) {
  auto learner = make_learner(setup.learner, setup.family, setup.distribution,
                              Rng::stream(seed, Stream::Learner));
  AttackTarget at{setup.learner.alpha, setup.learner.rule};
  auto adversary = make_adversary(setup.adversary, setup.family, setup.target, setup.distribution,
                                  at, Rng::stream(seed, Stream::Adversary));
  return run_episode(setup, *learner, *adversary, seed);
}

Transcript run_episode(const EpisodeSetup& setup, Learner& learner, Adversary& adversary,
                       std::uint64_t seed) {
  if (setup.horizon == 0) throw std::invalid_argument("run_episode: horizon must be at least 1");
  const auto& family = *setup.family;
  validate_hypothesis(family, setup.target);

  Rng nature = Rng::stream(seed, Stream::Nature);
  VersionSpace visible(setup.family);
  std::vector<LabeledExample> history;
  std::vector<Prediction> predictions;
  history.reserve(setup.horizon);
  predictions.reserve(setup.horizon);

  Transcript out;
  out.seed = seed;
  out.target = describe(setup.target);
  out.point_kind = family.point_kind();
  out.rounds.reserve(setup.horizon);

  for (std::size_t t = 1; t <= setup.horizon; ++t) {
    AdversaryView view{t, history, predictions, &visible};
    InjectionDecision decision = adversary.decide(view);
    // Nature draws every round so injections do not shift the iid sequence.
    Point drawn = setup.distribution.sample(nature);

    RoundRecord r;
    r.t = t;
    r.injected = decision.inject();
    r.x = r.injected ? std::move(*decision.point) : std::move(drawn);
    try {
      family.check_point(r.x);
    } catch (const std::out_of_range& e) {
      throw InvariantViolation("round " + std::to_string(t) + ": point outside the domain: " + e.what());
    }

    r.yhat = learner.predict(r.x);
    r.diagnostics = learner.diagnostics();
    r.y = evaluate(family, setup.target, r.x);

    visible.add({r.x, r.y});
    if (!visible.is_consistent()) {
      throw InvariantViolation("round " + std::to_string(t) + ": dataset is no longer realizable");
    }
    learner.observe(r.x, r.y);

    history.push_back({r.x, r.y});
    predictions.push_back(r.yhat);
    out.ledger.record(r);
    out.rounds.push_back(std::move(r));
  }

  if (compute_errors(out.rounds) != out.ledger) {
    throw InvariantViolation("streaming ledger differs from the recomputed ledger");
  }
  return out;
}

ErrorLedger compute_errors(std::span<const RoundRecord> rounds) {
  ErrorLedger ledger;
  for (const auto& r : rounds) {
    const bool abstained = r.yhat == Prediction::Abstain;
    ledger.misclassification += (!abstained && r.yhat != predict_label(r.y)) ? 1 : 0;
    ledger.abstention += (abstained && !r.injected) ? 1 : 0;
    ledger.injected_abstentions += (abstained && r.injected) ? 1 : 0;
  }
  return ledger;
}

void check_transcript(const Transcript& t, const HypothesisFamily& family, const Hypothesis& target) {
  auto fam = std::make_shared<const HypothesisFamily>(family);
  VersionSpace vs(fam);
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const auto& r = t.rounds[i];
    const std::string where = "round " + std::to_string(r.t) + ": ";
    if (r.t != i + 1) throw InvariantViolation(where + "round numbers are not consecutive");
    try {
      family.check_point(r.x);
    } catch (const std::out_of_range& e) {
      throw InvariantViolation(where + e.what());
    }
    if (evaluate(family, target, r.x) != r.y) throw InvariantViolation(where + "label differs from the target");
    vs.add({r.x, r.y});
    if (!vs.is_consistent()) throw InvariantViolation(where + "dataset is no longer realizable");
  }
  if (compute_errors(t) != t.ledger) throw InvariantViolation("ledger differs from the recomputed ledger");
}

double MetricSummary::standard_error() const {
  return n > 0 ? sd / std::sqrt(static_cast<double>(n)) : 0.0;
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  MetricSummary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  const double half = 1.959963984540054 * s.standard_error();
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

AggregateSummary aggregate(std::span<const Transcript> transcripts) {
  if (transcripts.empty()) throw std::invalid_argument("aggregate: no transcripts");
  AggregateSummary out;
  out.fingerprint = transcripts.front().fingerprint;
  out.runs = transcripts.size();
  std::vector<double> mis, abs, inj_abs, total, inj;
  for (const auto& t : transcripts) {
    if (t.fingerprint != out.fingerprint) {
      throw std::invalid_argument("aggregate: transcripts come from different configurations");
    }
    mis.push_back(static_cast<double>(t.ledger.misclassification));
    abs.push_back(static_cast<double>(t.ledger.abstention));
    inj_abs.push_back(static_cast<double>(t.ledger.injected_abstentions));
    total.push_back(static_cast<double>(t.ledger.total()));
    inj.push_back(static_cast<double>(
        std::count_if(t.rounds.begin(), t.rounds.end(), [](const RoundRecord& r) { return r.injected; })));
  }
  out.misclassification = summarize(mis);
  out.abstention = summarize(abs);
  out.injected_abstentions = summarize(inj_abs);
  out.total = summarize(total);
  out.injections = summarize(inj);
  return out;
}

}  // namespace abstain
