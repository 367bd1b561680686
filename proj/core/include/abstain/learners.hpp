#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abstain/distribution.hpp"
#include "abstain/family.hpp"
#include "abstain/gamma.hpp"
#include "abstain/rng.hpp"
#include "abstain/shattering.hpp"
#include "abstain/version_space.hpp"

namespace abstain {

enum class Prediction : std::uint8_t { Zero, One, Abstain };

inline Prediction predict_label(Label y) { return y == Label::One ? Prediction::One : Prediction::Zero; }
std::string_view to_string(Prediction p);
Prediction parse_prediction(std::string_view text);

/// Learner internals recorded in transcripts; absent fields do not apply.
struct Diagnostics {
  std::optional<std::size_t> level;
  std::optional<double> rho_k;
  std::optional<std::size_t> gamma0;
  std::optional<std::size_t> gamma1;
  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual Prediction predict(const Point& x) = 0;
  virtual void observe(const Point& x, Label y) = 0;
  /// Internals behind the most recent predict().
  virtual Diagnostics diagnostics() const { return {}; }
  virtual std::string_view name() const = 0;
};

/// Predicts only outside the disagreement region.
class DisagreementLearner : public Learner {
 public:
  explicit DisagreementLearner(std::shared_ptr<const HypothesisFamily> family);
  Prediction predict(const Point& x) override;
  void observe(const Point& x, Label y) override;
  std::string_view name() const override { return "disagreement"; }
  const VersionSpace& version_space() const { return vs_; }

 private:
  VersionSpace vs_;
};

/// Unions of intervals: predict y when the nearest seen points on both sides
/// carry label y, abstain otherwise.
class IntervalLearner : public Learner {
 public:
  Prediction predict(const Point& x) override;
  void observe(const Point& x, Label y) override;
  std::string_view name() const override { return "interval"; }

 private:
  std::map<double, Label> seen_;
};

struct LevelConfig {
  double eta = 0.6;
  /// alpha[k - 1] is the level-k threshold.
  std::vector<double> alpha;
  std::size_t start_level = 0;
  bool labels_on_abstain = true;
  bool cascade = false;
  RhoSettings rho;
};

/// Default thresholds alpha_k = T^-k, or (12 T d / delta)^-k when delta is set.
std::vector<double> default_level_thresholds(std::size_t d, std::size_t horizon,
                                             std::optional<double> delta = std::nullopt);

/// Rounds spent at one level: [start, end) in learner-local round numbers.
struct LevelPhase {
  std::size_t level = 0;
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Level-based learner driven by k-shattering probabilities of a known marginal.
class LevelLearner : public Learner {
 public:
  LevelLearner(std::shared_ptr<const HypothesisFamily> family, DomainDistribution dist,
               LevelConfig config, Rng rng);

  Prediction predict(const Point& x) override;
  void observe(const Point& x, Label y) override;
  Diagnostics diagnostics() const override { return last_; }
  std::string_view name() const override { return "level"; }

  std::size_t level() const { return level_; }
  const VersionSpace& version_space() const { return vs_; }
  const std::vector<LevelPhase>& phases() const { return phases_; }

 private:
  double rho(const VersionSpace& vs);
  double current_rho();
  void enter_level(std::size_t k);

  VersionSpace vs_;
  RhoOracle oracle_;
  LevelConfig config_;
  Rng rng_;
  std::size_t level_;
  std::size_t round_ = 0;
  std::vector<LevelPhase> phases_;
  Diagnostics last_;
  Prediction last_prediction_ = Prediction::Abstain;
  // rho_k(F_t) at the current level, and the two restricted values at the
  // last predicted point, reused by observe().
  std::optional<double> rho_now_;
  std::optional<Point> cached_point_;
  double cached_rho_[2] = {0.0, 0.0};
};

enum class Vc1Rule { MainText, Symmetric };

std::string_view to_string(Vc1Rule r);

/// Γ-count based learner for tree-ordered (VC dimension one) families.
class Vc1Learner : public Learner {
 public:
  Vc1Learner(std::shared_ptr<const HypothesisFamily> family, double alpha, Vc1Rule rule);

  Prediction predict(const Point& x) override;
  void observe(const Point& x, Label y) override;
  Diagnostics diagnostics() const override { return last_; }
  std::string_view name() const override { return "vc1"; }

 private:
  VersionSpace vs_;
  const TreeFamily* tree_;
  TreeGammaIndex gamma_;
  double alpha_;
  Vc1Rule rule_;
  Diagnostics last_;
};

/// Closure-based learner for axis-aligned rectangles; never predicts 1
/// inside the disagreement region.
class RectangleLearner : public Learner {
 public:
  RectangleLearner(std::shared_ptr<const HypothesisFamily> family, double alpha);

  Prediction predict(const Point& x) override;
  void observe(const Point& x, Label y) override;
  std::string_view name() const override { return "rectangle"; }

  /// Prior examples with some coordinate i in [x_i, a_i) or (b_i, x_i],
  /// where [a, b] is the current closure.
  std::size_t witnesses(const Point& x) const;

 private:
  VersionSpace vs_;
  double alpha_;
  std::optional<Box> closure_;
  std::vector<std::vector<double>> history_;
};

/// Follows the first consistent hypothesis; never abstains.
class ErmLearner : public Learner {
 public:
  explicit ErmLearner(std::shared_ptr<const HypothesisFamily> family);
  Prediction predict(const Point& x) override;
  void observe(const Point& x, Label y) override;
  std::string_view name() const override { return "erm"; }

 private:
  VersionSpace vs_;
};

enum class LearnerKind { Disagreement, Interval, Level, Vc1, Rectangle, Erm };

std::string_view to_string(LearnerKind k);
LearnerKind parse_learner_kind(std::string_view text);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::Disagreement;
  double alpha = 0.0;
  Vc1Rule rule = Vc1Rule::Symmetric;
  LevelConfig level;
};

/// The level learner's starting level: VC dimension of the family.
std::size_t family_vc_dimension(const HypothesisFamily& family);

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec,
                                      std::shared_ptr<const HypothesisFamily> family,
                                      const DomainDistribution& dist, Rng rng);

}  // namespace abstain
