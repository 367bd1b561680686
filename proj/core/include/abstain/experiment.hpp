#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abstain/config.hpp"
#include "abstain/protocol.hpp"

namespace abstain {

/// Bound a metric is compared against, with the formula it came from.
struct Bound {
  double value = 0.0;
  std::string formula;
};

struct TheoremBounds {
  std::optional<Bound> misclassification;
  std::optional<Bound> abstention;
};

/// Bounds for the configured learner and family; empty where none applies.
TheoremBounds theorem_bounds(const ExperimentConfig& config);

/// One episode per seed on `config.threads` workers; run_id is the seed's
/// position. Rethrows the first failure (by seed order) after the join.
std::vector<Transcript> run_seeds(const ExperimentConfig& config);

/// Deterministic JSON summary text.
std::string summary_json(const ExperimentConfig& config, const AggregateSummary& summary);

struct ExperimentResult {
  std::vector<Transcript> transcripts;
  AggregateSummary summary;
  std::vector<std::string> transcript_paths;
  std::string summary_path;
};

/// Writes <output>/transcripts/seed_<seed>.csv and <output>/summary.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace abstain
