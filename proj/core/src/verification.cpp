#include "abstain/verification.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "abstain/shattering.hpp"
#include "abstain/version_space.hpp"

namespace abstain {
namespace {

std::string instance_tag(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ',';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

// Rows of the tree family in original labels: row 0 is f, row v + 1 is the
// root chain ending at v flipped against f.
struct Rows {
  std::size_t n = 0;
  std::vector<std::vector<char>> bits;
};

Rows materialize_rows(const TreeFamily& tree) {
  Rows r;
  r.n = tree.size();
  std::vector<char> f(r.n);
  for (NodeId v = 0; v < r.n; ++v) f[v] = tree.reference(v) == Label::One;
  r.bits.push_back(f);
  for (NodeId end = 0; end < r.n; ++end) {
    auto row = f;
    for (std::optional<NodeId> v = end; v; v = tree.parent(*v)) row[*v] ^= 1;
    r.bits.push_back(std::move(row));
  }
  return r;
}

using Example = std::pair<NodeId, int>;

std::vector<Example> distinct(std::span<const LabeledExample> data) {
  std::set<Example> s;
  for (const auto& e : data) s.emplace(e.point.node_id(), as_int(e.label));
  return {s.begin(), s.end()};
}

std::size_t gamma_count(const Rows& rows, const std::vector<Example>& examples,
                        const std::optional<Example>& restriction) {
  const auto& f = rows.bits[0];
  std::vector<std::size_t> wrong;  // indices into examples of S_f
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (f[examples[i].first] != examples[i].second) wrong.push_back(i);
  }
  const std::size_t nrows = rows.bits.size();
  std::vector<int> violations(nrows, 0);
  std::vector<std::size_t> violated(nrows, 0);
  std::vector<char> allowed(nrows, 1);
  for (std::size_t r = 0; r < nrows; ++r) {
    if (restriction && rows.bits[r][restriction->first] != restriction->second) allowed[r] = 0;
    for (auto i : wrong) {
      if (rows.bits[r][examples[i].first] != examples[i].second) {
        ++violations[r];
        violated[r] = i;
      }
    }
  }
  std::set<NodeId> members;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const NodeId x = examples[i].first;
    bool saw0 = false;
    bool saw1 = false;
    for (std::size_t r = 0; r < nrows && !(saw0 && saw1); ++r) {
      if (!allowed[r]) continue;
      if (violations[r] == 0 || (violations[r] == 1 && violated[r] == i)) {
        (rows.bits[r][x] ? saw1 : saw0) = true;
      }
    }
    if (saw0 && saw1) members.insert(x);
  }
  return members.size();
}

bool in_disagreement(const Rows& rows, const std::vector<Example>& examples, NodeId x) {
  bool saw0 = false;
  bool saw1 = false;
  for (const auto& row : rows.bits) {
    bool ok = true;
    for (const auto& [v, y] : examples) {
      if (row[v] != y) {
        ok = false;
        break;
      }
    }
    if (ok) (row[x] ? saw1 : saw0) = true;
    if (saw0 && saw1) return true;
  }
  return false;
}

}  // namespace

std::string to_json_line(const LemmaReport& r) {
  nlohmann::ordered_json j;
  j["lemma"] = r.lemma;
  j["instance"] = r.instance;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["holds"] = r.holds;
  return j.dump();
}

LemmaReport check_inclusion_exclusion(const FiniteFamily& family, NodeId x,
                                      std::span<const NodeId> tuple) {
  if (x >= family.domain_size) throw std::out_of_range("check_inclusion_exclusion: x out of range");
  std::vector<NodeId> pts(tuple.begin(), tuple.end());
  for (auto p : pts) {
    if (p >= family.domain_size) throw std::out_of_range("check_inclusion_exclusion: point out of range");
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Bitset all(family.rows.size());
  all.set();
  const Bitset& ones = family.columns[x];
  const Bitset zeros = all - ones;
  const int a1 = rows_shatter(family.rows, ones, pts) ? 1 : 0;
  const int a2 = rows_shatter(family.rows, zeros, pts) ? 1 : 0;
  const int a3 = a1 & a2;
  const int a4 = rows_shatter(family.rows, all, pts) ? 1 : 0;

  std::string tup;
  for (auto p : tuple) tup += (tup.empty() ? "" : ";") + std::to_string(p);
  LemmaReport r;
  r.lemma = "inclusion_exclusion";
  r.instance = instance_tag({{"rows", std::to_string(family.rows.size())},
                             {"m", std::to_string(family.domain_size)},
                             {"x", std::to_string(x)},
                             {"tuple", tup}});
  r.lhs = a1 + a2;
  r.rhs = a3 + a4;
  r.holds = r.lhs <= r.rhs;
  return r;
}

LemmaReport verify_prob_abs(std::shared_ptr<const HypothesisFamily> family, const FinitePmf& pmf,
                            std::size_t k, double eta) {
  if (!(eta > 0.5)) throw std::invalid_argument("verify_prob_abs: eta must exceed 1/2");
  VersionSpace vs(family);
  const double rk = rho_k_exact(vs, pmf, k).value;
  if (rk == 0.0) throw std::invalid_argument("verify_prob_abs: rho_k(F) = 0");
  const double rk1 = rho_k_exact(vs, pmf, k + 1).value;
  double lhs = 0.0;
  for (std::size_t i = 0; i < pmf.points.size(); ++i) {
    const double r0 = rho_k_exact(vs.restricted({pmf.points[i], Label::Zero}), pmf, k).value;
    const double r1 = rho_k_exact(vs.restricted({pmf.points[i], Label::One}), pmf, k).value;
    if (r0 + r1 >= 2.0 * eta * rk) lhs += pmf.probabilities[i];
  }
  LemmaReport r;
  r.lemma = "prob_abs";
  r.instance = instance_tag({{"family", family->describe()},
                             {"k", std::to_string(k)},
                             {"eta", format_double(eta)}});
  r.lhs = lhs;
  r.rhs = rk1 / ((2.0 * eta - 1.0) * rk);
  r.holds = r.lhs <= r.rhs + kProbabilitySlack;
  return r;
}

std::vector<LemmaReport> check_rho_monotonicity(std::shared_ptr<const HypothesisFamily> family,
                                                const FinitePmf& pmf, std::size_t k_max,
                                                std::span<const LabeledExample> restrictions) {
  VersionSpace vs(family);
  std::vector<double> rho(k_max + 1, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) rho[k] = rho_k_exact(vs, pmf, k).value;
  std::vector<LemmaReport> out;
  for (std::size_t k = 1; k < k_max; ++k) {
    LemmaReport r;
    r.lemma = "rho_monotone_in_k";
    r.instance = instance_tag({{"family", family->describe()}, {"k", std::to_string(k)}});
    r.lhs = rho[k + 1];
    r.rhs = rho[k];
    r.holds = r.lhs <= r.rhs + kProbabilitySlack;
    out.push_back(std::move(r));
  }
  for (const auto& e : restrictions) {
    const VersionSpace sub = vs.restricted(e);
    for (std::size_t k = 1; k <= k_max; ++k) {
      LemmaReport r;
      r.lemma = "rho_monotone_in_restriction";
      r.instance = instance_tag({{"family", family->describe()},
                                 {"k", std::to_string(k)},
                                 {"restrict", to_string(e.point) + "->" + std::to_string(as_int(e.label))}});
      r.lhs = rho_k_exact(sub, pmf, k).value;
      r.rhs = rho[k];
      r.holds = r.lhs <= r.rhs + kProbabilitySlack;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::size_t brute_gamma_count(const TreeFamily& tree, std::span<const LabeledExample> dataset,
                              std::optional<LabeledExample> restriction) {
  const Rows rows = materialize_rows(tree);
  std::optional<Example> r;
  if (restriction) r.emplace(restriction->point.node_id(), as_int(restriction->label));
  return gamma_count(rows, distinct(dataset), r);
}

std::vector<NodeId> enumerate_attackable(const TreeFamily& tree, std::span<const LabeledExample> dataset,
                                         double alpha, const Hypothesis& target,
                                         AttackReading reading) {
  const std::size_t n = tree.size();
  if (n > 14) throw std::invalid_argument("enumerate_attackable: at most 14 nodes");
  const Rows rows = materialize_rows(tree);
  const auto family = HypothesisFamily::tree(tree.parents(), tree.reference_labels());
  std::vector<int> truth(n);
  for (NodeId v = 0; v < n; ++v) truth[v] = as_int(evaluate(family, target, Point::node(v)));

  const auto base = distinct(dataset);
  std::set<NodeId> candidates;
  for (const auto& [v, y] : base) candidates.insert(v);

  std::vector<NodeId> out;
  for (NodeId x : candidates) {
    bool attackable = false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n) && !attackable; ++mask) {
      std::set<Example> with(base.begin(), base.end());
      for (NodeId v = 0; v < n; ++v) {
        if ((mask >> v) & 1U) with.emplace(v, truth[v]);
      }
      std::vector<Example> all(with.begin(), with.end());
      std::vector<Example> without;
      for (const auto& e : all) {
        if (e.first != x) without.push_back(e);
      }
      if (!in_disagreement(rows, without, x)) continue;
      const std::size_t g0 = gamma_count(rows, without, Example{x, 0});
      const std::size_t g1 = gamma_count(rows, without, Example{x, 1});
      double count;
      if (reading == AttackReading::Appendix) {
        count = static_cast<double>(std::max(g0, g1));
      } else {
        count = static_cast<double>(rows.bits[0][x] ? g1 : g0);
      }
      attackable = count < alpha;
    }
    if (attackable) out.push_back(x);
  }
  return out;
}

std::vector<LemmaReport> check_gamma_potential(const Transcript& transcript, const TreeFamily& tree,
                                               double alpha) {
  const Rows rows = materialize_rows(tree);
  std::set<Example> seen;
  std::vector<LemmaReport> out;
  out.reserve(transcript.rounds.size());
  std::size_t before = 0;
  for (const auto& r : transcript.rounds) {
    seen.emplace(r.x.node_id(), as_int(r.y));
    const std::size_t after = gamma_count(rows, {seen.begin(), seen.end()}, std::nullopt);
    const bool mistake = r.yhat != Prediction::Abstain && r.yhat != predict_label(r.y);
    LemmaReport rep;
    rep.lemma = "gamma_potential";
    rep.instance = instance_tag({{"seed", std::to_string(transcript.seed)}, {"t", std::to_string(r.t)}});
    rep.lhs = static_cast<double>(after);
    rep.rhs = static_cast<double>(before) - alpha * (mistake ? 1.0 : 0.0) + 1.0;
    rep.holds = rep.lhs <= rep.rhs;
    out.push_back(std::move(rep));
    before = after;
  }
  return out;
}

std::vector<LemmaReport> check_level_contraction(const Transcript& transcript,
                                                 std::shared_ptr<const HypothesisFamily> family,
                                                 const FinitePmf& pmf, double eta,
                                                 bool labels_on_abstain) {
  VersionSpace vs(family);
  std::vector<LemmaReport> out;
  for (const auto& r : transcript.rounds) {
    const auto level = r.diagnostics.level;
    const bool wrong = r.yhat != Prediction::Abstain && r.yhat != predict_label(r.y);
    if (wrong && level && *level >= 1) {
      const double now = rho_k_exact(vs, pmf, *level).value;
      const double next = rho_k_exact(vs.restricted({r.x, r.y}), pmf, *level).value;
      LemmaReport rep;
      rep.lemma = "level_contraction";
      rep.instance = instance_tag({{"seed", std::to_string(transcript.seed)},
                                   {"t", std::to_string(r.t)},
                                   {"k", std::to_string(*level)}});
      rep.lhs = next;
      rep.rhs = eta * now;
      rep.holds = rep.lhs <= rep.rhs + kProbabilitySlack;
      out.push_back(std::move(rep));
    }
    if (labels_on_abstain || r.yhat != Prediction::Abstain) vs.add({r.x, r.y});
  }
  return out;
}

}  // namespace abstain
