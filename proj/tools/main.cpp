#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "abstain/config.hpp"
#include "abstain/experiment.hpp"
#include "abstain/plot.hpp"
#include "abstain/sweep.hpp"
#include "abstain/transcript_io.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kInvariant = 3, kIo = 4 };

int run_verb(const std::string& path, const std::vector<std::string>& overrides) {
  const auto config = abstain::load_config(path, overrides);
  const auto result = abstain::run_experiment(config);
  const auto& s = result.summary;
  std::cout << "fingerprint " << s.fingerprint << "\n"
            << "runs " << s.runs << "\n"
            << "misclassification_error mean " << s.misclassification.mean << " max " << s.misclassification.max << "\n"
            << "abstention_error mean " << s.abstention.mean << " se " << s.abstention.standard_error() << "\n"
            << "summary " << result.summary_path << "\n";
  return kOk;
}

int verify_verb(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto config = abstain::parse_sweep_config(buf.str(), overrides);
  const auto reports = abstain::run_sweep(config);

  std::ofstream file;
  if (!config.output.empty()) {
    file.open(config.output, std::ios::binary);
    if (!file) throw std::ios_base::failure("cannot write '" + config.output + "'");
  }
  std::ostream& out = config.output.empty() ? std::cout : file;
  std::size_t failed = 0;
  for (const auto& r : reports) {
    out << abstain::to_json_line(r) << "\n";
    failed += r.holds ? 0 : 1;
  }
  std::cerr << abstain::to_string(config.lemma) << ": " << reports.size() << " checks, " << failed << " violations\n";
  return failed == 0 ? kOk : kInvariant;
}

int plot_verb(const std::vector<std::string>& summaries, const std::string& metric, const std::string& output) {
  const auto script = abstain::emit_plot_script_from_files(summaries, metric);
  if (output.empty()) {
    std::cout << script;
    return kOk;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + output + "'");
  out << script;
  return kOk;
}

int replay_verb(const std::string& path, const std::string& config_path, bool rerun) {
  abstain::ConfigEntries header;
  const auto t = abstain::read_transcript_file(path, &header);
  std::optional<abstain::ExperimentConfig> config;
  if (!config_path.empty()) {
    config = abstain::load_config(config_path);
  } else if (!header.empty()) {
    config = abstain::resolve_config(header);
  }
  if (!config) {
    if (abstain::compute_errors(t) != t.ledger) throw abstain::InvariantViolation("ledger mismatch");
    std::cout << "ok " << t.rounds.size() << " rounds (no configuration: labels and realizability not checked)\n";
    return kOk;
  }
  if (!t.fingerprint.empty() && config->fingerprint != t.fingerprint) {
    throw abstain::InvariantViolation("transcript fingerprint " + t.fingerprint + " differs from configuration " +
                                      config->fingerprint);
  }
  if (t.rounds.size() != config->setup.horizon) {
    throw abstain::InvariantViolation("transcript has " + std::to_string(t.rounds.size()) + " rounds, horizon is " +
                                      std::to_string(config->setup.horizon));
  }
  abstain::check_transcript(t, *config->setup.family, config->setup.target);
  if (rerun) {
    auto again = abstain::run_episode(config->setup, t.seed);
    if (again.rounds != t.rounds) throw abstain::InvariantViolation("rerun with the same seed produced a different transcript");
  }
  std::cout << "ok " << t.rounds.size() << " rounds, seed " << t.seed << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction with abstention under clean-label injections"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every seed of an experiment config");
  run->add_option("config", config_path, "Experiment config (INI)")->required();
  run->allow_extras();

  std::string sweep_path;
  auto* verify = app.add_subcommand("verify", "Run a lemma sweep and emit JSON lines");
  verify->add_option("config", sweep_path, "Sweep config (INI)")->required();
  verify->allow_extras();

  std::vector<std::string> summaries;
  std::string metric;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "Emit a gnuplot script from summaries");
  plot->add_option("summaries", summaries, "summary.json files")->required();
  plot->add_option("--metric", metric, "Metric to plot")->required();
  plot->add_option("-o,--output", plot_out, "Write the script here instead of stdout");

  std::string transcript;
  std::string replay_config;
  bool no_rerun = false;
  auto* replay = app.add_subcommand("replay", "Re-check a transcript's per-round invariants");
  replay->add_option("transcript", transcript, "Transcript CSV")->required();
  replay->add_option("--config", replay_config, "Config to check against (defaults to the transcript header)");
  replay->add_flag("--no-rerun", no_rerun, "Skip the determinism rerun");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return run_verb(config_path, run->remaining());
    if (*verify) return verify_verb(sweep_path, verify->remaining());
    if (*plot) return plot_verb(summaries, metric, plot_out);
    if (*replay) return replay_verb(transcript, replay_config, !no_rerun);
  } catch (const abstain::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kValidation;
  } catch (const abstain::UnknownMetric& e) {
    std::cerr << e.what() << "\n";
    return kValidation;
  } catch (const abstain::FormatError& e) {
    std::cerr << "malformed transcript: " << e.what() << "\n";
    return kValidation;
  } catch (const abstain::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}
