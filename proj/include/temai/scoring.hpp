#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "temai/framework.hpp"

namespace temai {

/// appendix: final = capability × adoption × utility (formulas as written).
/// reported: final = capability × adoption² × utility, the chain that matches
/// the published case-study finals.
enum class ChainMode { appendix, reported };

/// raw: weight fraction = ‱ / 10000 (a column summing to 9150‱ caps the rate
/// at 0.915). normalized: weight fraction = ‱ / dimension sum.
enum class WeightMode { raw, normalized };

enum class Stage { capability, adoption, utility };

std::string_view to_string(ChainMode m) noexcept;
std::string_view to_string(WeightMode m) noexcept;
std::string_view to_string(Stage s) noexcept;
ChainMode parse_chain_mode(std::string_view text);
WeightMode parse_weight_mode(std::string_view text);
Stage parse_stage(std::string_view text);

struct StageScores {
  double capability_score = 0.0;      // 0..100
  double adoption_rate = 0.0;         // 0..1
  double effective_capability = 0.0;  // capability × adoption
  double utility_rate = 0.0;          // 0..1
  double final_value = 0.0;
  ChainMode mode = ChainMode::reported;

  bool operator==(const StageScores&) const = default;
};

/// Both chain finals are always carried so the discrepancy stays visible.
struct PipelineResult {
  std::string assessment_id;
  StageScores scores;
  double appendix_final = 0.0;
  double reported_final = 0.0;
  WeightMode weight_mode = WeightMode::raw;

  bool operator==(const PipelineResult&) const = default;
};

struct ConvertedCriterionScore {
  std::string criterion;
  Stage stage;
  int raw_level_score;
  double converted;
};

/// Immutable scoring context over one framework and one weight table.
class Pipeline {
 public:
  /// Throws a completeness error if the table misses a framework criterion.
  Pipeline(FrameworkDefinition framework, WeightTable weights, WeightMode weight_mode = WeightMode::raw);

  const FrameworkDefinition& framework() const { return framework_; }
  const WeightTable& weights() const { return weights_; }
  WeightMode weight_mode() const { return weight_mode_; }

  double weight_fraction(std::string_view criterion) const;

  /// Σ level_score × weight fraction over one dimension, in points (0..100).
  /// Throws a completeness error naming the first unrated criterion.
  double dimension_points(DimensionId dimension, const std::map<std::string, int>& levels) const;

  double capability_score(const AssessmentRecord& a) const;
  double adoption_rate(const AssessmentRecord& a) const;
  double utility_rate(const AssessmentRecord& a) const;

  PipelineResult run(const AssessmentRecord& a, ChainMode mode = ChainMode::reported) const;

  std::vector<ConvertedCriterionScore> converted_scores(const AssessmentRecord& a, Stage stage,
                                                        ChainMode mode = ChainMode::reported) const;

 private:
  struct WeightedCriterion {
    std::string id;
    double fraction;
  };

  FrameworkDefinition framework_;
  WeightTable weights_;
  WeightMode weight_mode_;
  std::map<DimensionId, std::vector<WeightedCriterion>> by_dimension_;
};

/// Combines stage values under a chain mode.
StageScores compose_stages(double capability_score, double adoption_rate, double utility_rate,
                           ChainMode mode);

/// Targets in display units: capability in points, rates in percent.
struct StageTargets {
  std::optional<double> capability_score;
  std::optional<double> adoption_percent;
  std::optional<double> utility_percent;
};

struct LevelFit {
  std::map<std::string, int> levels;  // known + fitted
  std::map<std::string, int> fitted;  // unknowns only
  double residual = 0.0;              // max |value − target| in display units
};

struct FitResult {
  std::vector<std::string> unknowns;
  std::vector<LevelFit> candidates;  // feasible, best residual first
  /// Smallest residual over every enumerated assignment, feasible or not.
  double best_residual = 0.0;
  std::optional<LevelFit> closest;
};

inline constexpr int kMaxFitUnknowns = 8;
inline constexpr double kDefaultFitTolerance = 0.05;

/// Exhaustively enumerates levels for every criterion of a targeted
/// dimension that `known` leaves open. Candidates are ordered by residual,
/// then by their level vector in framework order.
FitResult fit_levels_to_targets(const Pipeline& pipeline, const std::map<std::string, int>& known,
                                const StageTargets& targets,
                                double tolerance = kDefaultFitTolerance);

}  // namespace temai
