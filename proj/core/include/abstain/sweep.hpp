#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abstain/verification.hpp"

namespace abstain {

enum class SweepLemma { InclusionExclusion, ProbAbs, RhoMonotonicity, Attackable, GammaPotential, LevelContraction };

std::string_view to_string(SweepLemma l);
SweepLemma parse_sweep_lemma(std::string_view text);

struct SweepConfig {
  SweepLemma lemma = SweepLemma::InclusionExclusion;
  std::size_t instances = 100;
  std::uint64_t seed = 0;
  /// Largest finite domain or tree drawn.
  std::size_t max_points = 8;
  /// Episode length for the transcript-based lemmas.
  std::size_t horizon = 500;
  AttackReading reading = AttackReading::Appendix;
  /// JSON lines destination; empty means the caller decides.
  std::string output;
};

/// INI with a [sweep] section: lemma, instances, seed, max_points, horizon,
/// reading, output. Overrides use the run verb's --section.key=value form.
SweepConfig parse_sweep_config(std::string_view text, std::span<const std::string> overrides = {});

/// Random instances drawn from `seed`. prob_abs emits one report per
/// (k, eta) with k in {1, 2} and eta in {0.55, 0.6, 0.9}, skipping pairs with
/// rho_k = 0; setups where rho_1 = 0 are redrawn. Transcript lemmas emit one
/// report per checked round.
std::vector<LemmaReport> run_sweep(const SweepConfig& config);

}  // namespace abstain
