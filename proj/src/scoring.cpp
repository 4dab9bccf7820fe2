#include "temai/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "temai/error.hpp"

namespace temai {

std::string_view to_string(ChainMode m) noexcept {
  return m == ChainMode::appendix ? "appendix" : "reported";
}

std::string_view to_string(WeightMode m) noexcept {
  return m == WeightMode::raw ? "raw" : "normalized";
}

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::capability: return "capability";
    case Stage::adoption: return "adoption";
    case Stage::utility: return "utility";
  }
  return "capability";
}

ChainMode parse_chain_mode(std::string_view text) {
  if (text == "appendix") return ChainMode::appendix;
  if (text == "reported") return ChainMode::reported;
  throw Error(ErrorCode::validation, fmt::format("unknown mode '{}' (appendix|reported)", text), "mode");
}

WeightMode parse_weight_mode(std::string_view text) {
  if (text == "raw") return WeightMode::raw;
  if (text == "normalized") return WeightMode::normalized;
  throw Error(ErrorCode::validation, fmt::format("unknown weight mode '{}' (raw|normalized)", text),
              "weight_mode");
}

Stage parse_stage(std::string_view text) {
  for (auto s : {Stage::capability, Stage::adoption, Stage::utility}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::validation,
              fmt::format("unknown stage '{}' (capability|adoption|utility)", text), "stage");
}

Pipeline::Pipeline(FrameworkDefinition framework, WeightTable weights, WeightMode weight_mode)
    : framework_(std::move(framework)), weights_(std::move(weights)), weight_mode_(weight_mode) {
  for (auto d : kDimensions) {
    const auto criteria = framework_.criteria_in(d);
    const double dim_sum = weights_.dimension_sum(framework_, d).value();
    auto& list = by_dimension_[d];
    for (const Criterion* c : criteria) {
      const Permyriad w = weights_.weight(c->id);
      const double fraction = weight_mode_ == WeightMode::raw ? w.value() / 10000.0 : w.value() / dim_sum;
      list.push_back({c->id, fraction});
    }
  }
}

double Pipeline::weight_fraction(std::string_view criterion) const {
  for (const auto& [d, list] : by_dimension_) {
    for (const auto& wc : list) {
      if (wc.id == criterion) return wc.fraction;
    }
  }
  throw Error(ErrorCode::lookup, fmt::format("criterion '{}' is not part of framework '{}'", criterion,
                                             framework_.id()));
}

double Pipeline::dimension_points(DimensionId dimension,
                                  const std::map<std::string, int>& levels) const {
  double total = 0.0;
  for (const auto& wc : by_dimension_.at(dimension)) {
    auto it = levels.find(wc.id);
    if (it == levels.end()) {
      throw Error(ErrorCode::completeness, fmt::format("no rating for criterion '{}'", wc.id),
                  "ratings." + wc.id);
    }
    total += level_to_score(it->second, wc.id) * wc.fraction;
  }
  return total;
}

double Pipeline::capability_score(const AssessmentRecord& a) const {
  return dimension_points(DimensionId::capability, a.level_map());
}

double Pipeline::adoption_rate(const AssessmentRecord& a) const {
  return dimension_points(DimensionId::adoption, a.level_map()) / 100.0;
}

double Pipeline::utility_rate(const AssessmentRecord& a) const {
  return dimension_points(DimensionId::utility, a.level_map()) / 100.0;
}

StageScores compose_stages(double capability_score, double adoption_rate, double utility_rate,
                           ChainMode mode) {
  StageScores s;
  s.capability_score = capability_score;
  s.adoption_rate = adoption_rate;
  s.effective_capability = capability_score * adoption_rate;
  s.utility_rate = utility_rate;
  s.final_value = mode == ChainMode::appendix ? s.effective_capability * utility_rate
                                              : s.effective_capability * adoption_rate * utility_rate;
  s.mode = mode;
  return s;
}

PipelineResult Pipeline::run(const AssessmentRecord& a, ChainMode mode) const {
  const auto levels = a.level_map();
  const double cap = dimension_points(DimensionId::capability, levels);
  const double adoption = dimension_points(DimensionId::adoption, levels) / 100.0;
  const double utility = dimension_points(DimensionId::utility, levels) / 100.0;

  PipelineResult r;
  r.assessment_id = a.id();
  r.scores = compose_stages(cap, adoption, utility, mode);
  r.appendix_final = compose_stages(cap, adoption, utility, ChainMode::appendix).final_value;
  r.reported_final = compose_stages(cap, adoption, utility, ChainMode::reported).final_value;
  r.weight_mode = weight_mode_;
  return r;
}

std::vector<ConvertedCriterionScore> Pipeline::converted_scores(const AssessmentRecord& a,
                                                                Stage stage, ChainMode mode) const {
  const auto result = run(a, mode);
  const auto& s = result.scores;
  const DimensionId dim = stage == Stage::capability ? DimensionId::capability
                          : stage == Stage::adoption ? DimensionId::adoption
                                                     : DimensionId::utility;
  // Utility-stage display carries the same adoption factor as the chain.
  const double utility_carry = mode == ChainMode::reported
                                   ? s.capability_score * s.adoption_rate * s.adoption_rate
                                   : s.capability_score * s.adoption_rate;

  std::vector<ConvertedCriterionScore> out;
  for (const auto& wc : by_dimension_.at(dim)) {
    const int raw = level_to_score(a.level(wc.id), wc.id);
    double converted = 0.0;
    switch (stage) {
      case Stage::capability: converted = raw * wc.fraction; break;
      case Stage::adoption: converted = raw * s.capability_score / 100.0; break;
      case Stage::utility: converted = raw * utility_carry / 100.0; break;
    }
    out.push_back({wc.id, stage, raw, converted});
  }
  return out;
}

FitResult fit_levels_to_targets(const Pipeline& pipeline, const std::map<std::string, int>& known,
                                const StageTargets& targets, double tolerance) {
  const auto& framework = pipeline.framework();
  for (const auto& [criterion, level] : known) {
    if (framework.find_criterion(criterion) == nullptr) {
      throw Error(ErrorCode::validation, fmt::format("unknown criterion '{}'", criterion),
                  "known." + criterion);
    }
    level_to_score(level, criterion);
  }

  struct Target {
    DimensionId dimension;
    double value;
  };
  std::vector<Target> active;
  if (targets.capability_score) active.push_back({DimensionId::capability, *targets.capability_score});
  if (targets.adoption_percent) active.push_back({DimensionId::adoption, *targets.adoption_percent});
  if (targets.utility_percent) active.push_back({DimensionId::utility, *targets.utility_percent});
  if (active.empty()) throw Error(ErrorCode::validation, "no stage targets given", "targets");

  FitResult result;
  for (const auto& c : framework.criteria()) {
    const auto dim = framework.dimension_of(c.id);
    const bool targeted = std::any_of(active.begin(), active.end(),
                                      [&](const Target& t) { return dim && t.dimension == *dim; });
    if (targeted && !known.contains(c.id)) result.unknowns.push_back(c.id);
  }
  if (result.unknowns.size() > static_cast<std::size_t>(kMaxFitUnknowns)) {
    throw Error(ErrorCode::unsupported,
                fmt::format("{} unknown levels exceed the enumeration limit of {}",
                            result.unknowns.size(), kMaxFitUnknowns),
                "known");
  }

  const std::size_t k = result.unknowns.size();
  std::vector<int> combo(k, kMinLevel);
  std::map<std::string, int> levels = known;
  std::vector<LevelFit> all;
  while (true) {
    for (std::size_t i = 0; i < k; ++i) levels[result.unknowns[i]] = combo[i];
    double residual = 0.0;
    // Points and percent share one scale: a rate of 0.5116 is 51.16 points.
    for (const auto& t : active) {
      residual = std::max(residual, std::abs(pipeline.dimension_points(t.dimension, levels) - t.value));
    }
    LevelFit fit;
    fit.levels = levels;
    for (std::size_t i = 0; i < k; ++i) fit.fitted[result.unknowns[i]] = combo[i];
    fit.residual = residual;
    all.push_back(std::move(fit));

    std::size_t pos = 0;
    while (pos < k && combo[pos] == kMaxLevel) combo[pos++] = kMinLevel;
    if (pos == k) break;
    ++combo[pos];
  }

  const auto order_key = [&](const LevelFit& f) {
    std::vector<int> key;
    for (const auto& c : framework.criteria()) {
      auto it = f.levels.find(c.id);
      key.push_back(it == f.levels.end() ? 0 : it->second);
    }
    return key;
  };
  std::sort(all.begin(), all.end(), [&](const LevelFit& a, const LevelFit& b) {
    if (std::abs(a.residual - b.residual) > 1e-12) return a.residual < b.residual;
    return order_key(a) < order_key(b);
  });

  result.best_residual = all.front().residual;
  result.closest = all.front();
  for (auto& f : all) {
    if (f.residual <= tolerance + 1e-12) result.candidates.push_back(std::move(f));
  }
  return result;
}

}  // namespace temai
