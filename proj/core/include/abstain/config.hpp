#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abstain/protocol.hpp"

namespace abstain {

/// Every problem found in a configuration, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Flat "section.key" -> value view of a config file.
using ConfigEntries = std::map<std::string, std::string>;

struct ExperimentConfig {
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::string output;
  std::size_t threads = 1;
  EpisodeSetup setup;
  /// Entries as written plus overrides; the fingerprint hashes the
  /// canonical subset.
  ConfigEntries entries;
  std::string fingerprint;
};

/// Parse INI text. `overrides` are "--section.key=value" or
/// "section.key=value" strings applied after the file.
ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides = {});
ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides = {});
ExperimentConfig resolve_config(ConfigEntries entries);

ConfigEntries parse_entries(std::string_view text);
void apply_override(ConfigEntries& entries, std::string_view flag);

/// Entries that determine transcripts: everything except seeds, output
/// location and thread count. One "section.key=value" per line, sorted.
std::string canonical_text(const ConfigEntries& entries);
std::uint64_t fnv1a64(std::string_view text);
std::string config_fingerprint(const ConfigEntries& entries);

/// Resolve an alpha setting: a number, or sqrt_t, sqrt_t_over_log_t,
/// sqrt_pt_over_log_t (p = dimension).
double resolve_alpha(std::string_view text, std::size_t horizon, std::size_t dimension);

}  // namespace abstain
