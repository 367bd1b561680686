#include "abstain/plot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "abstain/point.hpp"

namespace abstain {

namespace {

using Json = nlohmann::json;

const std::vector<std::string> kSingle = {"misclassification_error", "abstention_error", "total_error",
                                          "injected_abstentions"};

struct Row {
  double x = 0.0;
  std::string name;
  const Json* summary = nullptr;
};

std::string num(double v) { return format_double(v); }

std::string stats_columns(const Json& m) {
  return num(m.at("mean").get<double>()) + " " + num(m.at("ci_low").get<double>()) + " " +
         num(m.at("ci_high").get<double>());
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_plot_script(std::span<const std::string> summary_texts, const std::string& metric) {
  const bool single = std::find(kSingle.begin(), kSingle.end(), metric) != kSingle.end();
  const bool vs_t = metric == "error_vs_T";
  const bool vs_alpha = metric == "error_vs_alpha";
  if (!single && !vs_t && !vs_alpha) throw UnknownMetric("unknown metric '" + metric + "'");
  if (summary_texts.empty()) throw std::invalid_argument("plot: no summaries");

  std::vector<Json> summaries;
  for (const auto& text : summary_texts) summaries.push_back(Json::parse(text));

  std::vector<Row> rows;
  for (const auto& s : summaries) {
    Row r;
    r.summary = &s;
    r.name = s.value("name", std::string());
    if (vs_alpha) {
      const auto& l = s.at("learner");
      if (!l.contains("alpha")) throw std::invalid_argument("plot: summary '" + r.name + "' has no alpha");
      r.x = l.at("alpha").get<double>();
    } else {
      r.x = s.at("horizon").get<double>();
    }
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.x < b.x; });

  const std::string xlabel = vs_alpha ? "alpha" : "T";
  std::ostringstream out;
  out << "# gnuplot script; data inlined\n";
  out << "set title " << quoted(metric) << "\n";
  out << "set xlabel " << quoted(xlabel) << "\n";
  out << "set ylabel " << quoted(single ? metric : "error") << "\n";
  out << "set key left top\n";
  out << "set grid\n";
  out << "$data << EOD\n";
  if (single) {
    out << "# " << xlabel << " mean ci_low ci_high bound\n";
    for (const auto& r : rows) {
      const auto& m = r.summary->at("metrics").at(metric);
      out << num(r.x) << " " << stats_columns(m) << " "
          << (m.contains("bound") ? num(m.at("bound").get<double>()) : std::string("NaN")) << "\n";
    }
  } else {
    out << "# " << xlabel << " mis_mean mis_ci_low mis_ci_high abs_mean abs_ci_low abs_ci_high\n";
    for (const auto& r : rows) {
      const auto& m = r.summary->at("metrics");
      out << num(r.x) << " " << stats_columns(m.at("misclassification_error")) << " "
          << stats_columns(m.at("abstention_error")) << "\n";
    }
  }
  out << "EOD\n";
  if (vs_alpha) {
    const auto& l = rows.front().summary->at("learner");
    int tag = 1;
    for (const char* key : {"alpha_theorem", "alpha_proof"}) {
      if (!l.contains(key)) continue;
      const std::string x = num(l.at(key).get<double>());
      out << "set arrow " << tag << " from " << x << ", graph 0 to " << x << ", graph 1 nohead dashtype 3\n";
      out << "set label " << tag << " " << quoted(key) << " at " << x << ", graph 0.95 rotate left\n";
      ++tag;
    }
  }
  if (single) {
    out << "plot $data using 1:2:3:4 with yerrorlines title " << quoted(metric)
        << ", \\\n     $data using 1:5 with lines dashtype 2 title \"bound\"\n";
  } else {
    out << "plot $data using 1:2:3:4 with yerrorlines title \"misclassification_error\""
        << ", \\\n     $data using 1:5:6:7 with yerrorlines title \"abstention_error\"\n";
  }
  return out.str();
}

std::string emit_plot_script_from_files(std::span<const std::string> paths, const std::string& metric) {
  std::vector<std::string> texts;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + p + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    texts.push_back(buf.str());
  }
  return emit_plot_script(texts, metric);
}

}  // namespace abstain
