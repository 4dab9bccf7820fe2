#include "temai/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "temai/error.hpp"

namespace temai::valuation {

void ManHourModel::validate() const {
  if (!(a >= 0.0 && b >= 0.0 && c >= 0.0)) {
    throw Error(ErrorCode::validation, "dimension weights a, b, c must be non-negative", "dimension_weights");
  }
  if (std::abs(a + b + c - 1.0) > 1e-9) {
    throw Error(ErrorCode::validation, fmt::format("dimension weights sum to {}, expected 1", a + b + c),
                "dimension_weights");
  }
  if (!(risk_weight > 0.0 && risk_weight <= 2.0)) {
    throw Error(ErrorCode::validation, fmt::format("risk weight {} is outside (0, 2]", risk_weight),
                "risk_weight");
  }
  if (!(base_rate >= 0.0) || !std::isfinite(base_rate)) {
    throw Error(ErrorCode::validation, "base rate must be a non-negative number", "base_rate");
  }
}

double ai_efficiency(const ManHourModel& model, const StageScores& scores) {
  model.validate();
  return (model.a * scores.capability_score + model.b * scores.effective_capability +
          model.c * scores.final_value) /
         100.0;
}

double man_hour_value(const ManHourModel& model, const StageScores& scores) {
  return model.base_rate * ai_efficiency(model, scores) * model.risk_weight;
}

VdcResult value_density_coefficient(const VdcInputs& inputs) {
  const double product = static_cast<double>(level_to_score(inputs.task_criticality, "task_criticality")) *
                         level_to_score(inputs.knowledge_concentration, "knowledge_concentration") *
                         level_to_score(inputs.risk_exposure, "risk_exposure");
  VdcResult r;
  r.score = std::cbrt(product);
  r.level = std::clamp(static_cast<int>(std::ceil(r.score / 20.0 - 1e-9)), kMinLevel, kMaxLevel);
  return r;
}

AssessmentRecord apply_vdc(const AssessmentRecord& assessment, const VdcInputs& inputs) {
  const LevelRating change{"value_density_coefficient", value_density_coefficient(inputs).level};
  return assessment.with_levels(std::span(&change, 1));
}

std::string_view to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::OptimalConditions: return "OptimalConditions";
    case Quadrant::FocusedCompliance: return "FocusedCompliance";
    case Quadrant::SupportDriven: return "SupportDriven";
    case Quadrant::Unconstrained: return "Unconstrained";
  }
  return "Unconstrained";
}

std::string_view strategy_note(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::OptimalConditions:
      return "Compliance demand and available assistance point the same way; pursue comprehensive "
             "inspection coverage.";
    case Quadrant::FocusedCompliance:
      return "Compliance pressure without assistance; concentrate on the critical inspection points "
             "that carry regulatory exposure.";
    case Quadrant::SupportDriven:
      return "Assistance is available but compliance pull is weak; use support programs to fund "
             "pilots with clear operational payback.";
    case Quadrant::Unconstrained:
      return "Neither pressure nor assistance; adopt where the business case stands on its own.";
  }
  return "";
}

QuadrantPosition classify_quadrant(double regulatory_intensity, double support_level,
                                   const QuadrantThresholds& thresholds) {
  const auto check = [](double v, const char* field) {
    if (!(v >= 0.0 && v <= 100.0)) {
      throw Error(ErrorCode::validation, fmt::format("{} {} is outside 0..100", field, v), field);
    }
  };
  check(regulatory_intensity, "regulatory_intensity");
  check(support_level, "support_level");
  const bool high_reg = regulatory_intensity >= thresholds.regulatory;
  const bool high_sup = support_level >= thresholds.support;

  QuadrantPosition p;
  p.regulatory_intensity = regulatory_intensity;
  p.support_level = support_level;
  p.quadrant = high_reg ? (high_sup ? Quadrant::OptimalConditions : Quadrant::FocusedCompliance)
                        : (high_sup ? Quadrant::SupportDriven : Quadrant::Unconstrained);
  p.strategy_note = std::string(strategy_note(p.quadrant));
  return p;
}

std::vector<Opportunity> value_density_mapping(std::span<const ScoredAssessment> inputs) {
  std::vector<Opportunity> out;
  for (const auto& in : inputs) {
    const auto& a = in.assessment.get();
    const auto result = in.pipeline.get().run(a, ChainMode::reported);
    Opportunity o;
    o.assessment_id = a.id();
    o.final_value = result.scores.final_value;
    o.vdc_level = a.level("value_density_coefficient");
    o.value_density = o.final_value * level_to_score(o.vdc_level) / 100.0;
    out.push_back(std::move(o));
  }
  std::stable_sort(out.begin(), out.end(), [](const Opportunity& x, const Opportunity& y) {
    if (x.value_density != y.value_density) return x.value_density > y.value_density;
    return x.assessment_id < y.assessment_id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

GapReport capability_adoption_gap(const Pipeline& pipeline, const AssessmentRecord& assessment,
                                  std::size_t k) {
  const auto result = pipeline.run(assessment, ChainMode::reported);
  GapReport g;
  g.assessment_id = assessment.id();
  g.capability_fraction = result.scores.capability_score / 100.0;
  g.adoption_rate = result.scores.adoption_rate;
  g.gap = g.capability_fraction - g.adoption_rate;

  auto converted = pipeline.converted_scores(assessment, Stage::adoption, ChainMode::reported);
  // Lowest converted first; among equals the heavier-weighted criterion limits more.
  std::stable_sort(converted.begin(), converted.end(), [&](const auto& x, const auto& y) {
    if (x.converted != y.converted) return x.converted < y.converted;
    const double wx = pipeline.weight_fraction(x.criterion);
    const double wy = pipeline.weight_fraction(y.criterion);
    if (wx != wy) return wx > wy;
    return x.criterion < y.criterion;
  });
  for (std::size_t i = 0; i < converted.size() && i < k; ++i) {
    g.limiting_factors.push_back(
        {converted[i].criterion, assessment.level(converted[i].criterion), converted[i].converted});
  }
  return g;
}

namespace {

void check_interventions(const Pipeline& pipeline, std::span<const Intervention> interventions) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < interventions.size(); ++i) {
    const auto& iv = interventions[i];
    const auto path = fmt::format("interventions[{}]", i);
    if (pipeline.framework().find_criterion(iv.criterion) == nullptr) {
      throw Error(ErrorCode::validation, fmt::format("unknown criterion '{}'", iv.criterion),
                  path + ".criterion");
    }
    if (!seen.insert(iv.criterion).second) {
      throw Error(ErrorCode::validation,
                  fmt::format("criterion '{}' appears in more than one intervention", iv.criterion),
                  path + ".criterion");
    }
    if (iv.new_level < kMinLevel || iv.new_level > kMaxLevel) {
      throw Error(ErrorCode::validation,
                  fmt::format("level {} for '{}' is outside 1..5", iv.new_level, iv.criterion),
                  path + ".level");
    }
  }
}

}  // namespace

WhatIfReport what_if(const Pipeline& pipeline, const AssessmentRecord& assessment, ChainMode mode,
                     std::span<const Intervention> interventions) {
  check_interventions(pipeline, interventions);
  WhatIfReport report;
  report.assessment_id = assessment.id();
  report.mode = mode;
  report.before = pipeline.run(assessment, mode).scores;

  std::vector<LevelRating> all;
  for (const auto& iv : interventions) {
    const LevelRating change{iv.criterion, iv.new_level};
    all.push_back(change);
    const auto alone = pipeline.run(assessment.with_levels(std::span(&change, 1)), mode).scores;
    report.marginals.push_back({iv.criterion, assessment.level(iv.criterion), iv.new_level,
                                alone.capability_score - report.before.capability_score,
                                alone.adoption_rate - report.before.adoption_rate,
                                alone.utility_rate - report.before.utility_rate,
                                alone.final_value - report.before.final_value});
  }
  report.after = pipeline.run(assessment.with_levels(all), mode).scores;
  std::stable_sort(report.marginals.begin(), report.marginals.end(),
                   [](const MarginalDelta& x, const MarginalDelta& y) {
                     if (x.final_delta != y.final_delta) return x.final_delta > y.final_delta;
                     return x.criterion < y.criterion;
                   });
  return report;
}

double default_confidence(Provenance p) noexcept {
  return p == Provenance::oracle_fitted ? 0.5 : 1.0;
}

std::vector<PlannedStep> progressive_plan(const Pipeline& pipeline,
                                          const AssessmentRecord& assessment, ChainMode mode,
                                          std::span<const Intervention> candidates,
                                          const std::map<std::string, double>& confidence) {
  const auto report = what_if(pipeline, assessment, mode, candidates);
  std::vector<PlannedStep> plan;
  for (const auto& m : report.marginals) {
    PlannedStep step;
    step.criterion = m.criterion;
    step.new_level = m.new_level;
    step.marginal_delta = m.final_delta;
    auto it = confidence.find(m.criterion);
    step.confidence =
        it != confidence.end() ? it->second : default_confidence(assessment.provenance_of(m.criterion));
    if (!(step.confidence >= 0.0 && step.confidence <= 1.0)) {
      throw Error(ErrorCode::validation,
                  fmt::format("confidence {} for '{}' is outside [0, 1]", step.confidence, m.criterion),
                  "confidence." + m.criterion);
    }
    step.priority = step.marginal_delta * step.confidence;
    plan.push_back(std::move(step));
  }
  std::stable_sort(plan.begin(), plan.end(), [](const PlannedStep& x, const PlannedStep& y) {
    if (x.priority != y.priority) return x.priority > y.priority;
    return x.criterion < y.criterion;
  });
  return plan;
}

TrendReport continuous_value_assessment(const Pipeline& pipeline,
                                        std::span<const AssessmentRecord> series, ChainMode mode) {
  if (series.size() < 2) {
    throw Error(ErrorCode::validation, "a value trend needs at least two assessments", "series");
  }
  TrendReport report;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i > 0 && series[i].meta().created_at < series[i - 1].meta().created_at) {
      throw Error(ErrorCode::validation,
                  fmt::format("assessment '{}' is dated before its predecessor '{}'", series[i].id(),
                              series[i - 1].id()),
                  fmt::format("series[{}].created_at", i));
    }
    TrendPoint p;
    p.assessment_id = series[i].id();
    p.at = series[i].meta().created_at;
    p.scores = pipeline.run(series[i], mode).scores;
    p.cumulative_final_change =
        i == 0 ? 0.0 : p.scores.final_value - report.points.front().scores.final_value;
    report.points.push_back(std::move(p));
  }
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    const auto& x = report.points[i - 1];
    const auto& y = report.points[i];
    report.steps.push_back({x.assessment_id, y.assessment_id,
                            y.scores.capability_score - x.scores.capability_score,
                            y.scores.adoption_rate - x.scores.adoption_rate,
                            y.scores.effective_capability - x.scores.effective_capability,
                            y.scores.utility_rate - x.scores.utility_rate,
                            y.scores.final_value - x.scores.final_value});
  }
  return report;
}

std::string_view to_string(PathwayStage s) noexcept {
  switch (s) {
    case PathwayStage::ValueDensityMapping: return "ValueDensityMapping";
    case PathwayStage::CapabilityAdoptionAlignment: return "CapabilityAdoptionAlignment";
    case PathwayStage::ProgressiveImplementation: return "ProgressiveImplementation";
    case PathwayStage::ContinuousValueAssessment: return "ContinuousValueAssessment";
  }
  return "ValueDensityMapping";
}

}  // namespace temai::valuation
