#include "abstain/transcript_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace abstain {

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(what + ": expected an integer, got '" + s + "'");
  }
}

std::optional<std::size_t> opt_size(const std::string& s, const std::string& what) {
  if (s.empty()) return std::nullopt;
  return static_cast<std::size_t>(to_u64(s, what));
}

Label parse_label(const std::string& s, const std::string& what) {
  if (s == "0") return Label::Zero;
  if (s == "1") return Label::One;
  throw FormatError(what + ": expected 0 or 1, got '" + s + "'");
}

}  // namespace

void write_transcript(std::ostream& out, const Transcript& t, const ConfigEntries* config) {
  out << "# fingerprint=" << t.fingerprint << '\n';
  out << "# seed=" << t.seed << '\n';
  out << "# run_id=" << t.run_id << '\n';
  out << "# target=" << t.target << '\n';
  out << "# point_kind=" << (t.point_kind == PointKind::Node ? "node" : "real") << '\n';
  if (config) {
    std::istringstream lines(canonical_text(*config));
    for (std::string line; std::getline(lines, line);) out << "# config " << line << '\n';
  }
  out << kTranscriptColumns << '\n';
  std::size_t mis = 0;
  std::size_t abst = 0;
  for (const auto& r : t.rounds) {
    const bool abstained = r.yhat == Prediction::Abstain;
    mis += (!abstained && r.yhat != predict_label(r.y)) ? 1 : 0;
    abst += (abstained && !r.injected) ? 1 : 0;
    const auto& d = r.diagnostics;
    out << t.run_id << ',' << t.seed << ',' << r.t << ',' << (r.injected ? 1 : 0) << ',' << to_string(r.x)
        << ',' << as_int(r.y) << ',' << to_string(r.yhat) << ',' << opt(d.level) << ',' << opt(d.rho_k) << ','
        << opt(d.gamma0) << ',' << opt(d.gamma1) << ',' << mis << ',' << abst << '\n';
  }
}

Transcript read_transcript(std::istream& in, ConfigEntries* config) {
  Transcript t;
  bool have_kind = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) break;
    const std::string body = line.substr(2);
    if (body.rfind("config ", 0) == 0) {
      const std::string entry = body.substr(7);
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw FormatError("malformed config header '" + entry + "'");
      if (config) (*config)[entry.substr(0, eq)] = entry.substr(eq + 1);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header line '" + line + "'");
    const std::string key = body.substr(0, eq);
    const std::string value = body.substr(eq + 1);
    if (key == "fingerprint") {
      t.fingerprint = value;
    } else if (key == "seed") {
      t.seed = to_u64(value, "seed");
    } else if (key == "run_id") {
      t.run_id = to_u64(value, "run_id");
    } else if (key == "target") {
      t.target = value;
    } else if (key == "point_kind") {
      if (value != "node" && value != "real") throw FormatError("point_kind: unknown kind '" + value + "'");
      t.point_kind = value == "node" ? PointKind::Node : PointKind::Real;
      have_kind = true;
    } else {
      throw FormatError("unknown header key '" + key + "'");
    }
  }
  if (!have_kind) throw FormatError("missing point_kind header");
  if (line != kTranscriptColumns) throw FormatError("unexpected column header '" + line + "'");

  std::size_t mis = 0;
  std::size_t abst = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    const std::string where = "row " + std::to_string(t.rounds.size() + 1);
    if (f.size() != 13) throw FormatError(where + ": expected 13 fields, got " + std::to_string(f.size()));
    if (to_u64(f[0], where) != t.run_id || to_u64(f[1], where) != t.seed) {
      throw FormatError(where + ": run_id or seed differs from the header");
    }
    RoundRecord r;
    r.t = to_u64(f[2], where + " t");
    if (f[3] != "0" && f[3] != "1") throw FormatError(where + ": c_t must be 0 or 1");
    r.injected = f[3] == "1";
    try {
      r.x = parse_point(f[4], t.point_kind);
      r.yhat = parse_prediction(f[6]);
      if (!f[8].empty()) r.diagnostics.rho_k = parse_double(f[8]);
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + ": " + e.what());
    }
    r.y = parse_label(f[5], where + " y");
    r.diagnostics.level = opt_size(f[7], where + " level");
    r.diagnostics.gamma0 = opt_size(f[9], where + " gamma0");
    r.diagnostics.gamma1 = opt_size(f[10], where + " gamma1");
    const bool abstained = r.yhat == Prediction::Abstain;
    mis += (!abstained && r.yhat != predict_label(r.y)) ? 1 : 0;
    abst += (abstained && !r.injected) ? 1 : 0;
    if (to_u64(f[11], where) != mis || to_u64(f[12], where) != abst) {
      throw FormatError(where + ": cumulative error columns disagree with the rows");
    }
    t.ledger.record(r);
    t.rounds.push_back(std::move(r));
  }
  return t;
}

void write_transcript_file(const std::string& path, const Transcript& t, const ConfigEntries* config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  write_transcript(out, t, config);
  if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

Transcript read_transcript_file(const std::string& path, ConfigEntries* config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return read_transcript(in, config);
}

}  // namespace abstain
