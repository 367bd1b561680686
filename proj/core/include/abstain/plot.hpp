#pragma once

#include <span>
#include <stdexcept>
#include <string>

namespace abstain {

class UnknownMetric : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Self-contained gnuplot script with the data inlined. Metrics:
/// misclassification_error, abstention_error, total_error,
/// injected_abstentions (each plotted against T), error_vs_T (both errors
/// against T) and error_vs_alpha (both errors against alpha).
std::string emit_plot_script(std::span<const std::string> summary_texts, const std::string& metric);

/// Reads the summary files and forwards to emit_plot_script.
std::string emit_plot_script_from_files(std::span<const std::string> paths, const std::string& metric);

}  // namespace abstain
