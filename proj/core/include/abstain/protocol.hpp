#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "abstain/adversaries.hpp"
#include "abstain/distribution.hpp"
#include "abstain/family.hpp"
#include "abstain/learners.hpp"

namespace abstain {

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoundRecord {
  std::size_t t = 0;  // 1-based
  bool injected = false;
  Point x = Point::scalar(0.0);
  Label y = Label::Zero;
  Prediction yhat = Prediction::Abstain;
  Diagnostics diagnostics;
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct ErrorLedger {
  std::size_t misclassification = 0;
  std::size_t abstention = 0;             // abstentions on iid rounds
  std::size_t injected_abstentions = 0;   // free, tracked for diagnostics
  std::size_t total() const { return misclassification + abstention; }
  void record(const RoundRecord& r);
  friend bool operator==(const ErrorLedger&, const ErrorLedger&) = default;
};

struct Transcript {
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::string target;
  PointKind point_kind = PointKind::Real;
  std::size_t run_id = 0;
  std::vector<RoundRecord> rounds;
  ErrorLedger ledger;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct EpisodeSetup {
  std::shared_ptr<const HypothesisFamily> family;
  Hypothesis target;
  DomainDistribution distribution = DomainDistribution::uniform_unit(1);
  LearnerSpec learner;
  AdversaryConfig adversary;
  std::size_t horizon = 1;
};

/// Protocol order per round: adversary decision, point realization, learner
/// prediction, clean label, learner update. Streams of `seed` feed nature,
/// the learner and the adversary separately.
Transcript run_episode(const EpisodeSetup& setup, std::uint64_t seed);

/// Same loop with caller-provided participants.
Transcript run_episode(const EpisodeSetup& setup, Learner& learner, Adversary& adversary,
                       std::uint64_t seed);

ErrorLedger compute_errors(std::span<const RoundRecord> rounds);
inline ErrorLedger compute_errors(const Transcript& t) { return compute_errors(t.rounds); }

/// Re-checks clean labels, realizability and ledger equivalence.
/// Throws InvariantViolation with the offending round.
void check_transcript(const Transcript& t, const HypothesisFamily& family, const Hypothesis& target);

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  double standard_error() const;
};

MetricSummary summarize(std::span<const double> values);

struct AggregateSummary {
  std::string fingerprint;
  std::size_t runs = 0;
  MetricSummary misclassification;
  MetricSummary abstention;
  MetricSummary injected_abstentions;
  MetricSummary total;
  MetricSummary injections;
};

/// Throws std::invalid_argument for an empty batch or mixed fingerprints.
AggregateSummary aggregate(std::span<const Transcript> transcripts);

}  // namespace abstain
