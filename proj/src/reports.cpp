#include "temai/reports.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "temai/csv.hpp"
#include "temai/error.hpp"

namespace temai {

using namespace json_detail;

double round_to(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const double r = std::round(value * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

namespace {

double score(double v) { return round_to(v, kScoreDigits); }
double rate(double v) { return round_to(v, kRateDigits); }

}  // namespace

Json to_json(const ValidationReport& report) {
  Json sums = Json::array();
  for (const auto& s : report.dimension_sums) {
    sums.push_back({{"dimension", to_string(s.dimension)},
                    {"sum", s.sum.to_string()},
                    {"status", s.status == SumStatus::pass ? "pass" : "warn"}});
  }
  return {{"valid", report.valid()}, {"violations", report.violations}, {"dimension_sums", sums}};
}

Json to_json(const StageScores& s) {
  return {{"capability_score", score(s.capability_score)},
          {"adoption_rate", rate(s.adoption_rate)},
          {"effective_capability", score(s.effective_capability)},
          {"utility_rate", rate(s.utility_rate)},
          {"final_value", score(s.final_value)},
          {"mode", to_string(s.mode)}};
}

Json to_json(const PipelineResult& r) {
  return {{"assessment_id", r.assessment_id},
          {"scores", to_json(r.scores)},
          {"final_value", score(r.scores.final_value)},
          {"appendix_final", score(r.appendix_final)},
          {"reported_final", score(r.reported_final)},
          {"weight_mode", to_string(r.weight_mode)}};
}

Json to_json(const std::vector<ConvertedCriterionScore>& scores) {
  Json out = Json::array();
  for (const auto& s : scores) {
    out.push_back({{"criterion", s.criterion},
                   {"stage", to_string(s.stage)},
                   {"raw_level_score", s.raw_level_score},
                   {"converted", score(s.converted)}});
  }
  return out;
}

// --- ahp ---------------------------------------------------------------------

Json to_json(const ahp::PairwiseMatrix& m) { return {{"items", m.items()}, {"values", m.rows()}}; }

Json to_json(const ahp::WeightVector& w) {
  Json out = Json::array();
  for (std::size_t i = 0; i < w.items.size(); ++i) {
    out.push_back({{"item", w.items[i]}, {"weight", round_to(w.weights[i], 6)}});
  }
  return out;
}

Json to_json(const ahp::ConsistencyReport& r) {
  return {{"lambda_max", round_to(r.lambda_max, 6)},
          {"consistency_index", rate(r.consistency_index)},
          {"random_index", r.random_index},
          {"consistency_ratio", rate(r.consistency_ratio)},
          {"acceptable", r.acceptable}};
}

ahp::PairwiseMatrix pairwise_matrix_from_json(const Json& j, const std::string& path) {
  const Json& items = field(j, "items", path);
  const Json& values = field(j, "values", path);
  if (!items.is_array() || !values.is_array()) {
    throw Error(ErrorCode::parse, "matrix 'items' and 'values' must be arrays", path);
  }
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].is_string()) {
      throw Error(ErrorCode::parse, "matrix items must be strings", index_path(join_path(path, "items"), i));
    }
    ids.push_back(items[i].get<std::string>());
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<double> row;
    for (std::size_t k = 0; k < values[i].size(); ++k) {
      const Json& v = values[i][k];
      const auto cell = fmt::format("{}.values[{}][{}]", path, i, k);
      if (v.is_number()) {
        row.push_back(v.get<double>());
      } else if (v.is_string()) {
        try {
          row.push_back(csv::parse_number(v.get<std::string>()));
        } catch (const Error& e) {
          throw Error(e.code(), e.what(), cell);
        }
      } else {
        throw Error(ErrorCode::parse, "matrix entries must be numbers or fraction strings", cell);
      }
    }
    rows.push_back(std::move(row));
  }
  try {
    return ahp::PairwiseMatrix(std::move(ids), std::move(rows));
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), e.field_path().empty() ? path : join_path(path, e.field_path()));
  }
}

// --- delphi ------------------------------------------------------------------

Json to_json(const delphi::ConcordanceResult& r) {
  return {{"w", rate(r.w)},
          {"n_items", r.n_items},
          {"n_experts", r.n_experts},
          {"tie_corrected", r.tie_corrected},
          {"consensus_reached", r.consensus_reached},
          {"threshold", r.threshold}};
}

Json to_json(const delphi::RoundSummary& r) {
  Json ranking = Json::array();
  for (const auto& item : r.ranking) {
    ranking.push_back(
        {{"item", item.item}, {"mean_rank", rate(item.mean_rank)}, {"position", item.position}});
  }
  return {{"study_id", r.study_id},
          {"round", r.round},
          {"concordance", to_json(r.concordance)},
          {"consensus_reached", r.concordance.consensus_reached},
          {"status", r.status()},
          {"ranking", ranking},
          {"warnings", r.warnings}};
}

Json to_json(const delphi::RoundStability& s) {
  return {{"round_a", s.round_a},
          {"round_b", s.round_b},
          {"mean_rank_shift", rate(s.mean_rank_shift)},
          {"max_rank_shift", s.max_rank_shift},
          {"stable", s.stable},
          {"bound", s.bound}};
}

Json to_json(const delphi::ExpertSubmission& s) {
  Json j = {{"expert_id", s.expert_id}};
  if (const auto* ratings = std::get_if<delphi::Ratings>(&s.values)) {
    j["ratings"] = *ratings;
  } else {
    j["rankings"] = std::get<delphi::Rankings>(s.values);
  }
  return j;
}

delphi::ExpertSubmission submission_from_json(const Json& j, int round, const std::string& path) {
  delphi::ExpertSubmission s;
  s.expert_id = string_field(j, "expert_id", path);
  s.round = round;
  const bool has_rankings = j.contains("rankings");
  const bool has_ratings = j.contains("ratings");
  if (has_rankings == has_ratings) {
    throw Error(ErrorCode::parse, "a submission carries exactly one of 'rankings' or 'ratings'", path);
  }
  const char* key = has_ratings ? "ratings" : "rankings";
  const Json& values = j.at(key);
  if (!values.is_object()) {
    throw Error(ErrorCode::parse, fmt::format("'{}' must map item ids to numbers", key),
                join_path(path, key));
  }
  if (has_ratings) {
    delphi::Ratings ratings;
    for (const auto& [item, v] : values.items()) {
      if (!v.is_number_integer()) {
        throw Error(ErrorCode::parse, "ratings must be integer levels",
                    join_path(join_path(path, key), item));
      }
      ratings.emplace(item, v.get<int>());
    }
    s.values = std::move(ratings);
  } else {
    delphi::Rankings rankings;
    for (const auto& [item, v] : values.items()) {
      if (!v.is_number()) {
        throw Error(ErrorCode::parse, "rankings must be numbers", join_path(join_path(path, key), item));
      }
      rankings.emplace(item, v.get<double>());
    }
    s.values = std::move(rankings);
  }
  return s;
}

Json to_json(const delphi::DelphiStudy& study) {
  Json rounds = Json::array();
  for (const auto& r : study.rounds()) {
    Json subs = Json::array();
    for (const auto& s : r.submissions) subs.push_back(to_json(s));
    rounds.push_back({{"round", r.round}, {"submissions", subs}, {"summary", to_json(r)}});
  }
  const auto& st = study.settings();
  return {{"study_id", study.id()},
          {"settings",
           {{"consensus_threshold", st.consensus_threshold},
            {"stability_bound", st.stability_bound},
            {"round_ceiling", st.round_ceiling},
            {"panel", st.panel}}},
          {"rounds", rounds}};
}

delphi::DelphiStudy delphi_study_from_json(const Json& j) {
  const Json& st = field(j, "settings", "delphi");
  delphi::StudySettings settings;
  settings.consensus_threshold = number_field(st, "consensus_threshold", "delphi.settings");
  settings.stability_bound = int_field(st, "stability_bound", "delphi.settings");
  settings.round_ceiling = int_field(st, "round_ceiling", "delphi.settings");
  settings.panel = string_field(st, "panel", "delphi.settings");
  delphi::DelphiStudy study(string_field(j, "study_id", "delphi"), settings);
  const Json& rounds = field(j, "rounds", "delphi");
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const auto path = index_path("delphi.rounds", i);
    const int round = int_field(rounds[i], "round", path);
    std::vector<delphi::ExpertSubmission> subs;
    const Json& js = field(rounds[i], "submissions", path);
    for (std::size_t k = 0; k < js.size(); ++k) {
      subs.push_back(submission_from_json(js[k], round, index_path(join_path(path, "submissions"), k)));
    }
    study.run_round(round, std::move(subs));
  }
  return study;
}

// --- valuation ---------------------------------------------------------------

Json to_json(const valuation::WhatIfReport& r) {
  Json marginals = Json::array();
  for (const auto& m : r.marginals) {
    marginals.push_back({{"criterion", m.criterion},
                         {"old_level", m.old_level},
                         {"new_level", m.new_level},
                         {"capability_delta", rate(m.capability_delta)},
                         {"adoption_delta", rate(m.adoption_delta)},
                         {"utility_delta", rate(m.utility_delta)},
                         {"final_delta", rate(m.final_delta)}});
  }
  return {{"assessment_id", r.assessment_id},
          {"mode", to_string(r.mode)},
          {"before", to_json(r.before)},
          {"after", to_json(r.after)},
          {"combined_final_delta", rate(r.after.final_value - r.before.final_value)},
          {"marginals", marginals}};
}

Json to_json(const valuation::GapReport& r) {
  Json factors = Json::array();
  for (const auto& f : r.limiting_factors) {
    factors.push_back({{"criterion", f.criterion}, {"level", f.level}, {"converted", score(f.converted)}});
  }
  return {{"assessment_id", r.assessment_id},
          {"capability_fraction", rate(r.capability_fraction)},
          {"adoption_rate", rate(r.adoption_rate)},
          {"gap", rate(r.gap)},
          {"limiting_factors", factors}};
}

Json to_json(const std::vector<valuation::Opportunity>& ranking) {
  Json out = Json::array();
  for (const auto& o : ranking) {
    out.push_back({{"rank", o.rank},
                   {"assessment_id", o.assessment_id},
                   {"final_value", score(o.final_value)},
                   {"vdc_level", o.vdc_level},
                   {"value_density", score(o.value_density)}});
  }
  return out;
}

Json to_json(const std::vector<valuation::PlannedStep>& plan) {
  Json out = Json::array();
  for (const auto& s : plan) {
    out.push_back({{"criterion", s.criterion},
                   {"new_level", s.new_level},
                   {"marginal_delta", rate(s.marginal_delta)},
                   {"confidence", s.confidence},
                   {"priority", rate(s.priority)}});
  }
  return out;
}

Json to_json(const valuation::TrendReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back({{"assessment_id", p.assessment_id},
                      {"at", format_timestamp(p.at)},
                      {"scores", to_json(p.scores)},
                      {"cumulative_final_change", rate(p.cumulative_final_change)}});
  }
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"from", s.from},
                     {"to", s.to},
                     {"capability_delta", rate(s.capability_delta)},
                     {"adoption_delta", rate(s.adoption_delta)},
                     {"effective_delta", rate(s.effective_delta)},
                     {"utility_delta", rate(s.utility_delta)},
                     {"final_delta", rate(s.final_delta)}});
  }
  return {{"points", points}, {"steps", steps}};
}

Json to_json(const valuation::QuadrantPosition& p) {
  return {{"regulatory_intensity", p.regulatory_intensity},
          {"support_level", p.support_level},
          {"quadrant", to_string(p.quadrant)},
          {"strategy_note", p.strategy_note}};
}

Json to_json(const valuation::PathwayReport& r) {
  Json payload = std::visit([](const auto& p) { return to_json(p); }, r.payload());
  return {{"stage", to_string(r.stage())}, {"payload", std::move(payload)}};
}

Json quadrant_grid(const valuation::QuadrantThresholds& t, const valuation::QuadrantPosition* point) {
  using valuation::Quadrant;
  const auto cell = [&](Quadrant q, double reg_lo, double reg_hi, double sup_lo, double sup_hi) {
    return Json{{"quadrant", to_string(q)},
                {"regulatory_range", {reg_lo, reg_hi}},
                {"support_range", {sup_lo, sup_hi}},
                {"strategy_note", valuation::strategy_note(q)}};
  };
  Json j = {{"thresholds", {{"regulatory", t.regulatory}, {"support", t.support}}},
            {"cells",
             {cell(Quadrant::OptimalConditions, t.regulatory, 100, t.support, 100),
              cell(Quadrant::FocusedCompliance, t.regulatory, 100, 0, t.support),
              cell(Quadrant::SupportDriven, 0, t.regulatory, t.support, 100),
              cell(Quadrant::Unconstrained, 0, t.regulatory, 0, t.support)}}};
  if (point != nullptr) j["point"] = to_json(*point);
  return j;
}

std::string stage_table_csv(std::span<const PipelineResult> results) {
  std::string out = csv::format_row({"assessment_id", "mode", "stage", "value"});
  for (const auto& r : results) {
    const auto mode = std::string(to_string(r.scores.mode));
    const auto& s = r.scores;
    const std::pair<const char*, std::string> rows[] = {
        {"capability_score", fmt::format("{:.2f}", s.capability_score)},
        {"adoption_rate", fmt::format("{:.4f}", s.adoption_rate)},
        {"effective_capability", fmt::format("{:.2f}", s.effective_capability)},
        {"utility_rate", fmt::format("{:.4f}", s.utility_rate)},
        {"final_value", fmt::format("{:.2f}", s.final_value)},
    };
    for (const auto& [stage, value] : rows) {
      out += csv::format_row({r.assessment_id, mode, stage, value});
    }
  }
  return out;
}

std::string format_stage_table(const PipelineResult& r) {
  const auto& s = r.scores;
  std::string out = fmt::format("assessment {} ({} chain, {} weights)\n", r.assessment_id,
                                to_string(s.mode), to_string(r.weight_mode));
  out += fmt::format("  {:<22}{:>10.2f}\n", "capability score", s.capability_score);
  out += fmt::format("  {:<22}{:>9.2f}%\n", "adoption rate", s.adoption_rate * 100.0);
  out += fmt::format("  {:<22}{:>10.2f}\n", "effective capability", s.effective_capability);
  out += fmt::format("  {:<22}{:>9.2f}%\n", "utility rate", s.utility_rate * 100.0);
  out += fmt::format("  {:<22}{:>10.2f}\n", "final value", s.final_value);
  out += fmt::format("  {:<22}{:>10.2f}\n", "appendix-chain final", r.appendix_final);
  out += fmt::format("  {:<22}{:>10.2f}\n", "reported-chain final", r.reported_final);
  return out;
}

}  // namespace temai
