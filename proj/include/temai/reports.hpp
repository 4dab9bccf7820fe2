#pragma once

#include <span>
#include <string>
#include <vector>

#include "temai/ahp.hpp"
#include "temai/delphi.hpp"
#include "temai/scoring.hpp"
#include "temai/serialization.hpp"
#include "temai/valuation.hpp"

namespace temai {

/// Presentation rounding: half away from zero to `digits` decimals.
double round_to(double value, int digits);

inline constexpr int kScoreDigits = 2;
inline constexpr int kRateDigits = 4;

Json to_json(const ValidationReport& report);
Json to_json(const StageScores& scores);
Json to_json(const PipelineResult& result);
Json to_json(const std::vector<ConvertedCriterionScore>& scores);

Json to_json(const ahp::PairwiseMatrix& m);
Json to_json(const ahp::WeightVector& w);
Json to_json(const ahp::ConsistencyReport& r);
ahp::PairwiseMatrix pairwise_matrix_from_json(const Json& j, const std::string& path);

Json to_json(const delphi::ConcordanceResult& r);
Json to_json(const delphi::RoundSummary& r);
Json to_json(const delphi::RoundStability& s);
Json to_json(const delphi::ExpertSubmission& s);
delphi::ExpertSubmission submission_from_json(const Json& j, int round, const std::string& path);
Json to_json(const delphi::DelphiStudy& study);
delphi::DelphiStudy delphi_study_from_json(const Json& j);

Json to_json(const valuation::WhatIfReport& r);
Json to_json(const valuation::GapReport& r);
Json to_json(const std::vector<valuation::Opportunity>& ranking);
Json to_json(const std::vector<valuation::PlannedStep>& plan);
Json to_json(const valuation::TrendReport& r);
Json to_json(const valuation::QuadrantPosition& p);
Json to_json(const valuation::PathwayReport& r);

/// Four cells (one per quadrant) with bounds and notes, plus the classified
/// point when one is given.
Json quadrant_grid(const valuation::QuadrantThresholds& thresholds,
                   const valuation::QuadrantPosition* point = nullptr);

/// "assessment_id,mode,stage,value" rows for each result.
std::string stage_table_csv(std::span<const PipelineResult> results);

/// Fixed-width stage table for terminals.
std::string format_stage_table(const PipelineResult& result);

}  // namespace temai
