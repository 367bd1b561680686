#include "abstain/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "abstain/generators.hpp"

namespace abstain {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

const std::set<std::string> kKnownKeys = {
    "experiment.name", "experiment.horizon", "experiment.seeds", "experiment.base_seed",
    "experiment.seed_count", "experiment.output", "experiment.threads",
    "family.kind", "family.intervals", "family.dimension", "family.rows", "family.random_vc",
    "family.random_rows", "family.keep", "family.density", "family.parents", "family.random_tree",
    "family.reference", "family.generator_seed",
    "target.hypothesis",
    "distribution.kind", "distribution.dimension", "distribution.nodes", "distribution.points",
    "distribution.probabilities", "distribution.values",
    "learner.kind", "learner.alpha", "learner.rule", "learner.eta", "learner.alpha_k",
    "learner.delta", "learner.start_level", "learner.labels_on_abstain", "learner.cascade_levels",
    "learner.mc_samples", "learner.budget",
    "adversary.strategy", "adversary.budget", "adversary.rate", "adversary.schedule",
    "adversary.file", "adversary.search_evaluations",
};

const std::set<std::string> kRunOnlyKeys = {
    "experiment.seeds", "experiment.base_seed", "experiment.seed_count", "experiment.output",
    "experiment.threads",
};

// Typed lookups that record failures instead of throwing.
class Reader {
 public:
  explicit Reader(const ConfigEntries& e) : entries_(e) {}

  std::vector<std::string> errors;

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string str(const std::string& key, std::string fallback = {}) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  std::optional<std::string> required(const std::string& key) {
    if (!has(key)) {
      errors.push_back(key + ": missing");
      return std::nullopt;
    }
    return str(key);
  }

  template <class T>
  std::optional<T> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const std::string v = str(key);
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) {
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
      } else {
        if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
        const unsigned long long n = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<T>(n);
      }
    } catch (const std::exception&) {
      errors.push_back(key + ": expected " +
                       (std::is_floating_point_v<T> ? "a number" : "a non-negative integer") +
                       ", got '" + v + "'");
      return std::nullopt;
    }
  }

  template <class T>
  T number_or(const std::string& key, T fallback) {
    return number<T>(key).value_or(fallback);
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    errors.push_back(key + ": expected true or false, got '" + v + "'");
    return fallback;
  }

  template <class F>
  auto attempt(const std::string& key, F&& f) -> std::optional<decltype(f())> {
    try {
      return f();
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
      return std::nullopt;
    }
  }

 private:
  const ConfigEntries& entries_;
};

std::vector<double> parse_doubles(std::string_view text, char sep = ',') {
  std::vector<double> out;
  for (const auto& part : split(text, sep)) out.push_back(parse_double(part));
  return out;
}

std::optional<std::shared_ptr<const HypothesisFamily>> build_family(Reader& r, Rng& gen) {
  auto kind = r.required("family.kind");
  if (!kind) return std::nullopt;
  if (*kind == "threshold") return std::make_shared<const HypothesisFamily>(HypothesisFamily::threshold());
  if (*kind == "interval_union") {
    auto d = r.number_or<std::size_t>("family.intervals", 1);
    if (d == 0) {
      r.errors.push_back("family.intervals: must be at least 1");
      return std::nullopt;
    }
    return std::make_shared<const HypothesisFamily>(HypothesisFamily::interval_union(d));
  }
  if (*kind == "rectangle") {
    auto p = r.number_or<std::size_t>("family.dimension", 1);
    if (p == 0) {
      r.errors.push_back("family.dimension: must be at least 1");
      return std::nullopt;
    }
    return std::make_shared<const HypothesisFamily>(HypothesisFamily::rectangle(p));
  }
  if (*kind == "finite") {
    auto made = r.attempt("family", [&]() -> HypothesisFamily {
      if (r.has("family.rows")) {
        std::vector<std::vector<int>> matrix;
        for (const auto& row : split(r.str("family.rows"), ';')) {
          std::vector<int> bits;
          for (char c : row) {
            if (c != '0' && c != '1') throw std::invalid_argument("rows must be 0/1 strings joined by ';'");
            bits.push_back(c - '0');
          }
          matrix.push_back(std::move(bits));
        }
        return HypothesisFamily::finite(matrix);
      }
      if (r.has("family.random_vc")) {
        auto md = split(r.str("family.random_vc"), ':');
        if (md.size() != 2) throw std::invalid_argument("random_vc must be m:d");
        return random_vc_family(gen, std::stoul(md[0]), std::stoul(md[1]),
                                r.number_or<double>("family.keep", 0.6));
      }
      if (r.has("family.random_rows")) {
        auto mr = split(r.str("family.random_rows"), ':');
        if (mr.size() != 2) throw std::invalid_argument("random_rows must be m:rows");
        return random_finite_family(gen, std::stoul(mr[0]), std::stoul(mr[1]),
                                    r.number_or<double>("family.density", 0.5));
      }
      throw std::invalid_argument("finite family needs rows, random_vc or random_rows");
    });
    if (!made) return std::nullopt;
    return std::make_shared<const HypothesisFamily>(std::move(*made));
  }
  if (*kind == "tree") {
    auto made = r.attempt("family", [&]() -> HypothesisFamily {
      std::vector<std::optional<NodeId>> parents;
      if (r.has("family.parents")) {
        for (const auto& p : split(r.str("family.parents"), ',')) {
          if (p == "-") {
            parents.push_back(std::nullopt);
          } else {
            parents.push_back(static_cast<NodeId>(std::stoul(p)));
          }
        }
      } else if (r.has("family.random_tree")) {
        auto ns = split(r.str("family.random_tree"), ':');
        if (ns.size() != 2) throw std::invalid_argument("random_tree must be n:shape");
        TreeShape shape;
        if (ns[1] == "chain") {
          shape = TreeShape::Chain;
        } else if (ns[1] == "star") {
          shape = TreeShape::Star;
        } else if (ns[1] == "mixed") {
          shape = TreeShape::Mixed;
        } else {
          throw std::invalid_argument("unknown tree shape '" + ns[1] + "'");
        }
        parents = random_forest(gen, std::stoul(ns[0]), shape);
      } else {
        throw std::invalid_argument("tree family needs parents or random_tree");
      }
      std::vector<Label> reference(parents.size(), Label::Zero);
      const std::string ref = r.str("family.reference", "zeros");
      if (ref == "random") {
        for (auto& y : reference) y = label_of(gen.bernoulli(0.5));
      } else if (ref != "zeros") {
        auto bits = split(ref, ',');
        if (bits.size() != parents.size()) throw std::invalid_argument("reference needs one label per node");
        for (std::size_t i = 0; i < bits.size(); ++i) {
          if (bits[i] != "0" && bits[i] != "1") throw std::invalid_argument("reference labels must be 0 or 1");
          reference[i] = label_of(bits[i] == "1");
        }
      }
      return HypothesisFamily::tree(std::move(parents), std::move(reference));
    });
    if (!made) return std::nullopt;
    return std::make_shared<const HypothesisFamily>(std::move(*made));
  }
  r.errors.push_back("family.kind: unknown family '" + *kind + "'");
  return std::nullopt;
}

std::optional<Hypothesis> build_target(Reader& r, const HypothesisFamily& family, Rng& gen) {
  auto text = r.required("target.hypothesis");
  if (!text) return std::nullopt;
  return r.attempt("target.hypothesis", [&]() -> Hypothesis {
    if (*text == "random") {
      switch (family.kind()) {
        case FamilyKind::Finite: return FiniteRow{gen.index(family.as<FiniteFamily>().rows.size())};
        case FamilyKind::Tree: {
          const std::size_t n = family.finite_domain_size();
          const std::size_t pick = gen.index(n + 1);
          return TreeChain{pick == n ? std::nullopt : std::optional<NodeId>(pick)};
        }
        default:
          throw std::invalid_argument("random targets are only available for finite and tree families");
      }
    }
    return parse_hypothesis(family, *text);
  });
}

std::optional<DomainDistribution> build_distribution(Reader& r, const HypothesisFamily& family, Rng& gen) {
  const std::string default_kind = family.point_kind() == PointKind::Node ? "uniform_nodes" : "uniform_unit";
  const std::string kind = r.str("distribution.kind", default_kind);
  return r.attempt("distribution", [&]() -> DomainDistribution {
    std::size_t dim = 1;
    if (family.kind() == FamilyKind::Rectangle) dim = family.as<RectangleFamily>().dimension;
    if (kind == "uniform_unit") {
      if (family.point_kind() != PointKind::Real) throw std::invalid_argument("uniform_unit needs a real-valued family");
      return DomainDistribution::uniform_unit(r.number_or<std::size_t>("distribution.dimension", dim));
    }
    if (kind == "uniform_nodes") {
      if (family.point_kind() != PointKind::Node) throw std::invalid_argument("uniform_nodes needs a finite domain");
      return DomainDistribution::uniform_nodes(
          r.number_or<std::size_t>("distribution.nodes", family.finite_domain_size()));
    }
    if (kind == "pmf") {
      std::vector<Point> points;
      if (r.has("distribution.points")) {
        for (const auto& w : split_ws(r.str("distribution.points"))) {
          points.push_back(parse_point(w, family.point_kind()));
        }
      } else if (family.point_kind() == PointKind::Node) {
        for (NodeId v = 0; v < family.finite_domain_size(); ++v) points.push_back(Point::node(v));
      } else {
        throw std::invalid_argument("pmf over a real domain needs points");
      }
      const std::string probs = r.str("distribution.probabilities", "uniform");
      std::vector<double> p;
      if (probs == "uniform") {
        p.assign(points.size(), 1.0 / static_cast<double>(points.size()));
      } else if (probs == "dyadic") {
        p = dyadic_probabilities(gen, points.size());
      } else {
        p = parse_doubles(probs);
      }
      return DomainDistribution::finite(std::move(points), std::move(p));
    }
    if (kind == "product") {
      if (family.point_kind() != PointKind::Real) throw std::invalid_argument("product needs a real-valued family");
      std::vector<std::vector<double>> values, probs;
      for (const auto& coord : split(r.str("distribution.values"), ';')) values.push_back(parse_doubles(coord));
      if (r.has("distribution.probabilities")) {
        for (const auto& coord : split(r.str("distribution.probabilities"), ';')) probs.push_back(parse_doubles(coord));
      } else {
        for (const auto& v : values) probs.emplace_back(v.size(), 1.0 / static_cast<double>(v.size()));
      }
      return DomainDistribution::product(std::move(values), std::move(probs));
    }
    throw std::invalid_argument("unknown distribution '" + kind + "'");
  });
}

std::size_t family_dimension(const HypothesisFamily& family) {
  return family.kind() == FamilyKind::Rectangle ? family.as<RectangleFamily>().dimension : 1;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_text(const ConfigEntries& entries) {
  std::string out;
  for (const auto& [k, v] : entries) {
    if (kRunOnlyKeys.count(k)) continue;
    out += k + "=" + v + "\n";
  }
  return out;
}

std::string config_fingerprint(const ConfigEntries& entries) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(entries))));
  return buf;
}

double resolve_alpha(std::string_view text, std::size_t horizon, std::size_t dimension) {
  const double T = static_cast<double>(horizon);
  const double p = static_cast<double>(dimension);
  if (text == "sqrt_t") return std::sqrt(T);
  if (text == "sqrt_t_over_log_t" || text == "sqrt_pt_over_log_t") {
    if (horizon < 2) throw std::invalid_argument("alpha: log T vanishes for T < 2");
    const double scale = text == "sqrt_t_over_log_t" ? 1.0 : p;
    return std::sqrt(scale * T / std::log(T));
  }
  const double v = parse_double(text);
  if (!(v >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  return v;
}

ConfigEntries parse_entries(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError({std::string("syntax: ") + e.message() + " at line " + std::to_string(e.line())});
  }
  ConfigEntries out;
  std::vector<std::string> errors;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      errors.push_back(section + ": keys must live inside a [section]");
      continue;
    }
    for (const auto& [key, value] : body) out[section + "." + key] = trim(value.data());
  }
  if (!errors.empty()) throw ValidationError(errors);
  return out;
}

void apply_override(ConfigEntries& entries, std::string_view flag) {
  while (!flag.empty() && flag.front() == '-') flag.remove_prefix(1);
  const auto eq = flag.find('=');
  const auto dot = flag.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ValidationError({"override '" + std::string(flag) + "': expected --section.key=value"});
  }
  entries[trim(flag.substr(0, eq))] = trim(flag.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
  ConfigEntries entries = parse_entries(text);
  for (const auto& o : overrides) apply_override(entries, o);
  return resolve_config(std::move(entries));
}

ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

ExperimentConfig resolve_config(ConfigEntries entries) {
  Reader r(entries);
  for (const auto& [k, v] : entries) {
    if (!kKnownKeys.count(k)) r.errors.push_back(k + ": unknown key");
  }

  ExperimentConfig cfg;
  cfg.name = r.str("experiment.name", "experiment");
  cfg.output = r.str("experiment.output", "out/" + cfg.name);
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  cfg.threads = r.number_or<std::size_t>("experiment.threads", hw);
  if (cfg.threads == 0) cfg.threads = 1;

  std::size_t horizon = 0;
  if (auto h = r.required("experiment.horizon")) {
    horizon = r.number_or<std::size_t>("experiment.horizon", 0);
    if (horizon == 0) r.errors.push_back("experiment.horizon: must be at least 1");
  }
  cfg.setup.horizon = horizon;

  if (r.has("experiment.seeds")) {
    for (const auto& s : split(r.str("experiment.seeds"), ',')) {
      try {
        cfg.seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        r.errors.push_back("experiment.seeds: '" + s + "' is not a seed");
      }
    }
  } else {
    const auto base = r.number_or<std::uint64_t>("experiment.base_seed", 0);
    const auto count = r.number_or<std::size_t>("experiment.seed_count", 1);
    if (count == 0) r.errors.push_back("experiment.seed_count: must be at least 1");
    for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
  }

  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    r.errors.push_back("experiment.seeds: seeds must be distinct");
  }

  Rng gen = Rng::stream(r.number_or<std::uint64_t>("family.generator_seed", 0), Stream::Instance);
  auto family = build_family(r, gen);
  std::optional<Hypothesis> target;
  std::optional<DomainDistribution> dist;
  if (family) {
    cfg.setup.family = *family;
    target = build_target(r, **family, gen);
    dist = build_distribution(r, **family, gen);
  }

  LearnerSpec& ls = cfg.setup.learner;
  if (auto kind = r.required("learner.kind")) {
    if (auto k = r.attempt("learner.kind", [&] { return parse_learner_kind(*kind); })) ls.kind = *k;
  }
  const std::size_t dim = family ? family_dimension(**family) : 1;
  if (r.has("learner.alpha")) {
    if (auto a = r.attempt("learner.alpha", [&] { return resolve_alpha(r.str("learner.alpha"), std::max<std::size_t>(horizon, 1), dim); })) {
      ls.alpha = *a;
    }
  } else if (ls.kind == LearnerKind::Vc1 || ls.kind == LearnerKind::Rectangle) {
    r.errors.push_back("learner.alpha: required for the " + std::string(to_string(ls.kind)) + " learner");
  }
  const std::string rule = r.str("learner.rule", "symmetric");
  if (rule == "symmetric") {
    ls.rule = Vc1Rule::Symmetric;
  } else if (rule == "main_text") {
    ls.rule = Vc1Rule::MainText;
  } else {
    r.errors.push_back("learner.rule: expected symmetric or main_text, got '" + rule + "'");
  }

  LevelConfig& lc = ls.level;
  lc.eta = r.number_or<double>("learner.eta", 0.6);
  if (!(lc.eta > 0.5 && lc.eta <= 1.0)) r.errors.push_back("learner.eta: must lie in (0.5, 1]");
  lc.labels_on_abstain = r.flag("learner.labels_on_abstain", true);
  lc.cascade = r.flag("learner.cascade_levels", false);
  lc.rho.mc_samples = r.number_or<std::size_t>("learner.mc_samples", 0);
  lc.rho.budget = r.number_or<std::uint64_t>("learner.budget", kDefaultEnumerationBudget);
  lc.start_level = r.number_or<std::size_t>("learner.start_level", 0);
  if (ls.kind == LearnerKind::Level && family) {
    const std::size_t d = lc.start_level ? lc.start_level : family_vc_dimension(**family);
    if (r.has("learner.alpha_k")) {
      if (auto a = r.attempt("learner.alpha_k", [&] { return parse_doubles(r.str("learner.alpha_k")); })) {
        lc.alpha = *a;
        if (lc.alpha.size() < d) r.errors.push_back("learner.alpha_k: need one threshold per level (" + std::to_string(d) + ")");
      }
    } else if (horizon > 0) {
      std::optional<double> delta;
      if (r.has("learner.delta")) delta = r.number<double>("learner.delta");
      if (auto a = r.attempt("learner.delta", [&] { return default_level_thresholds(d, horizon, delta); })) lc.alpha = *a;
    }
    if (dist && !(dist->is_enumerable()) && lc.rho.mc_samples == 0) {
      r.errors.push_back("learner: Algorithm 1 requires enumerable pmf or mc_samples > 0");
    }
  }
  if (family) {
    const auto fk = (*family)->kind();
    const bool ok = [&] {
      switch (ls.kind) {
        case LearnerKind::Interval: return fk == FamilyKind::IntervalUnion || fk == FamilyKind::Threshold;
        case LearnerKind::Vc1: return fk == FamilyKind::Tree;
        case LearnerKind::Rectangle: return fk == FamilyKind::Rectangle;
        default: return true;
      }
    }();
    if (!ok) {
      r.errors.push_back("learner.kind: " + std::string(to_string(ls.kind)) + " does not apply to a " +
                         std::string(to_string(fk)) + " family");
    }
  }

  AdversaryConfig& ac = cfg.setup.adversary;
  if (auto s = r.attempt("adversary.strategy", [&] { return parse_adversary_kind(r.str("adversary.strategy", "none")); })) {
    ac.strategy = *s;
  }
  if (r.has("adversary.budget") && r.str("adversary.budget") != "unlimited") {
    ac.budget = r.number<std::size_t>("adversary.budget");
  }
  ac.rate = r.number_or<double>("adversary.rate", 0.5);
  if (!(ac.rate >= 0.0 && ac.rate <= 1.0)) r.errors.push_back("adversary.rate: must lie in [0, 1]");
  ac.search_evaluations = r.number_or<std::size_t>("adversary.search_evaluations", 20000);
  ac.file = r.str("adversary.file");
  if (family && r.has("adversary.schedule")) {
    r.attempt("adversary.schedule", [&] {
      for (const auto& item : split_ws(r.str("adversary.schedule"))) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("entries must be round=point");
        ac.schedule.emplace_back(std::stoul(item.substr(0, eq)),
                                 parse_point(item.substr(eq + 1), (*family)->point_kind()));
      }
      return 0;
    });
  }
  if (ac.strategy == AdversaryKind::FixedSchedule && !r.has("adversary.schedule")) {
    r.errors.push_back("adversary.schedule: required for fixed_schedule");
  }
  if (ac.strategy == AdversaryKind::Custom && ac.file.empty()) {
    r.errors.push_back("adversary.file: required for custom");
  }

  if (family && target && dist) {
    cfg.setup.target = *target;
    cfg.setup.distribution = *dist;
    // Build the participants once so incompatibilities surface here.
    if (r.errors.empty()) {
      r.attempt("learner", [&] {
        make_learner(ls, *family, *dist, Rng(0));
        return 0;
      });
      r.attempt("adversary", [&] {
        make_adversary(ac, *family, *target, *dist, AttackTarget{ls.alpha, ls.rule}, Rng(0));
        return 0;
      });
    }
  }

  if (!r.errors.empty()) throw ValidationError(r.errors);
  cfg.fingerprint = config_fingerprint(entries);
  cfg.entries = std::move(entries);
  return cfg;
}

}  // namespace abstain
