#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "temai/scoring.hpp"

namespace temai::valuation {

// --- man-hour model ---------------------------------------------------------

/// Man-hour = BaseRate × AIEfficiency × RiskWeight, where AIEfficiency is the
/// convex combination (a·capability + b·effective + c·final) / 100.
///
/// RiskWeight is a plain multiplier in (0, 2]; 1 is risk-neutral. Whether a
/// value above 1 reads as a complexity premium or a value amplifier is left
/// to the caller.
struct ManHourModel {
  double base_rate = 0.0;
  double a = 1.0 / 3.0;
  double b = 1.0 / 3.0;
  double c = 1.0 / 3.0;
  double risk_weight = 1.0;

  /// Throws unless a,b,c ≥ 0, a+b+c = 1 (1e-9), risk_weight ∈ (0,2], base_rate ≥ 0.
  void validate() const;
};

double ai_efficiency(const ManHourModel& model, const StageScores& scores);
double man_hour_value(const ManHourModel& model, const StageScores& scores);

// --- value density coefficient ---------------------------------------------

struct VdcInputs {
  int task_criticality = 1;
  int knowledge_concentration = 1;
  int risk_exposure = 1;
};

struct VdcResult {
  double score = 0.0;  // geometric mean of the three level scores
  int level = 1;       // smallest level whose score is ≥ the geometric mean
};

VdcResult value_density_coefficient(const VdcInputs& inputs);

/// Copy of `assessment` with the value_density_coefficient criterion set from
/// the decomposed inputs.
AssessmentRecord apply_vdc(const AssessmentRecord& assessment, const VdcInputs& inputs);

// --- regulatory-support quadrants ------------------------------------------

enum class Quadrant { OptimalConditions, FocusedCompliance, SupportDriven, Unconstrained };

std::string_view to_string(Quadrant q) noexcept;
std::string_view strategy_note(Quadrant q) noexcept;

struct QuadrantThresholds {
  double regulatory = 50.0;
  double support = 50.0;
};

struct QuadrantPosition {
  double regulatory_intensity = 0.0;
  double support_level = 0.0;
  Quadrant quadrant = Quadrant::Unconstrained;
  std::string strategy_note;
};

/// Values at a threshold count as high.
QuadrantPosition classify_quadrant(double regulatory_intensity, double support_level,
                                   const QuadrantThresholds& thresholds = {});

// --- pathway stage 1: value density mapping ---------------------------------

struct ScoredAssessment {
  std::reference_wrapper<const AssessmentRecord> assessment;
  std::reference_wrapper<const Pipeline> pipeline;
};

struct Opportunity {
  std::string assessment_id;
  double final_value = 0.0;  // reported chain
  int vdc_level = 0;
  double value_density = 0.0;  // final × vdc_score / 100
  int rank = 0;
};

std::vector<Opportunity> value_density_mapping(std::span<const ScoredAssessment> inputs);

// --- pathway stage 2: capability-adoption alignment -------------------------

struct LimitingFactor {
  std::string criterion;
  int level = 0;
  double converted = 0.0;
};

struct GapReport {
  std::string assessment_id;
  double capability_fraction = 0.0;
  double adoption_rate = 0.0;
  double gap = 0.0;  // capability / 100 − adoption rate
  std::vector<LimitingFactor> limiting_factors;
};

GapReport capability_adoption_gap(const Pipeline& pipeline, const AssessmentRecord& assessment,
                                  std::size_t k = 3);

// --- what-if ----------------------------------------------------------------

struct Intervention {
  std::string criterion;
  int new_level = 0;
};

struct MarginalDelta {
  std::string criterion;
  int old_level = 0;
  int new_level = 0;
  double capability_delta = 0.0;
  double adoption_delta = 0.0;
  double utility_delta = 0.0;
  double final_delta = 0.0;
};

struct WhatIfReport {
  std::string assessment_id;
  ChainMode mode = ChainMode::reported;
  StageScores before;
  StageScores after;  // all interventions applied together
  std::vector<MarginalDelta> marginals;  // each applied alone, largest final delta first
};

/// Errors carry field paths "interventions[i].criterion" / "interventions[i].level".
WhatIfReport what_if(const Pipeline& pipeline, const AssessmentRecord& assessment, ChainMode mode,
                     std::span<const Intervention> interventions);

// --- pathway stage 3: progressive implementation ----------------------------

struct PlannedStep {
  std::string criterion;
  int new_level = 0;
  double marginal_delta = 0.0;
  double confidence = 1.0;
  double priority = 0.0;  // marginal × confidence
};

/// Default confidence by provenance of the current level.
double default_confidence(Provenance p) noexcept;

/// Orders candidate interventions by marginal final-value delta × confidence
/// in the criterion's current level. `confidence` overrides the defaults.
std::vector<PlannedStep> progressive_plan(const Pipeline& pipeline,
                                          const AssessmentRecord& assessment, ChainMode mode,
                                          std::span<const Intervention> candidates,
                                          const std::map<std::string, double>& confidence = {});

// --- pathway stage 4: continuous value assessment ---------------------------

struct TrendPoint {
  std::string assessment_id;
  Timestamp at{};
  StageScores scores;
  double cumulative_final_change = 0.0;  // relative to the first point
};

struct TrendStep {
  std::string from;
  std::string to;
  double capability_delta = 0.0;
  double adoption_delta = 0.0;
  double effective_delta = 0.0;
  double utility_delta = 0.0;
  double final_delta = 0.0;
};

struct TrendReport {
  std::vector<TrendPoint> points;
  std::vector<TrendStep> steps;
};

TrendReport continuous_value_assessment(const Pipeline& pipeline,
                                        std::span<const AssessmentRecord> series, ChainMode mode);

// --- pathway container -------------------------------------------------------

enum class PathwayStage {
  ValueDensityMapping,
  CapabilityAdoptionAlignment,
  ProgressiveImplementation,
  ContinuousValueAssessment,
};

std::string_view to_string(PathwayStage s) noexcept;

/// Stage is derived from the payload alternative, so the two cannot disagree.
class PathwayReport {
 public:
  using Payload =
      std::variant<std::vector<Opportunity>, GapReport, std::vector<PlannedStep>, TrendReport>;

  explicit PathwayReport(Payload payload) : payload_(std::move(payload)) {}

  PathwayStage stage() const { return static_cast<PathwayStage>(payload_.index()); }
  const Payload& payload() const { return payload_; }

 private:
  Payload payload_;
};

}  // namespace temai::valuation
