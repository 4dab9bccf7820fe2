#pragma once

// Shared helpers and independent oracle data for the test binaries. The
// weight arrays below are typed in again from the published tables rather
// than read from the library, so that a transcription slip in either place
// shows up as a mismatch.

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "temai/canonical.hpp"
#include "temai/framework.hpp"
#include "temai/scoring.hpp"

namespace oracle {

inline constexpr std::array<const char*, 25> kIds = {
    "perception_capability",        "analytical_capability",
    "decision_making_capability",   "execution_capability",
    "evolution_capability",         "environmental_adaptation",
    "sensor_integration",           "human_machine_interaction_maturity",
    "modification_difficulty",      "scene_transfer_difficulty",
    "technical_absorption_capacity", "digital_infrastructure",
    "change_management_capability", "upstream_downstream_ecosystem",
    "standards_completeness",       "policy_compatibility",
    "value_chain_optimization",     "quality_improvement",
    "cost_reduction",               "efficiency_enhancement",
    "risk_prevention",              "value_density_coefficient",
    "environmental_metrics",        "social_metrics",
    "governance_metrics"};

// [begin, end) of each dimension within kIds.
inline constexpr std::array<std::pair<int, int>, 3> kSpans = {{{0, 8}, {8, 17}, {17, 25}}};

inline constexpr std::array<double, 25> kStore = {
    1888.89, 1666.67, 1444.44, 1111.11, 555.56,  1333.33, 1111.11, 888.89,
    1794.44, 1372.22, 1025.00, 1081.94, 1025.00, 1041.67, 916.67,  541.67, 351.39,
    1528.73, 1999.11, 1763.92, 1175.94, 587.97,  1472.17, 883.30,  588.87};

inline constexpr std::array<double, 25> kPv = {
    1844.97, 1656.54, 1619.26, 1167.17, 490.05,  1217.27, 1127.70, 877.03,
    1540.86, 1178.14, 1265.94, 1107.52, 1186.55, 1226.74, 1121.63, 689.63, 683.00,
    1323.07, 1823.28, 1613.84, 1452.53, 565.29,  1718.29, 1002.36, 501.34};

inline constexpr std::array<int, 25> kRetailLevels = {4, 3, 2, 3, 2, 3, 2, 3, 4, 2, 4, 4, 2,
                                                      1, 1, 4, 3, 3, 4, 5, 4, 5, 2, 1, 4};
inline constexpr std::array<int, 25> kPvLevels = {4, 3, 3, 4, 1, 5, 2, 5, 2, 4, 2, 4, 4,
                                                  2, 4, 4, 5, 4, 2, 4, 5, 4, 5, 4, 2};

struct Stages {
  double capability, adoption, effective, utility, appendix, reported;
};

/// Direct evaluation of the three weighted sums and both chains.
inline Stages evaluate(const std::array<double, 25>& weights, const std::array<int, 25>& levels,
                       bool normalized = false) {
  std::array<double, 3> points{};
  for (int d = 0; d < 3; ++d) {
    double wsum = 0.0;
    for (int i = kSpans[d].first; i < kSpans[d].second; ++i) wsum += weights[i];
    for (int i = kSpans[d].first; i < kSpans[d].second; ++i) {
      const double frac = normalized ? weights[i] / wsum : weights[i] / 10000.0;
      points[d] += 20.0 * levels[i] * frac;
    }
  }
  Stages s{};
  s.capability = points[0];
  s.adoption = points[1] / 100.0;
  s.effective = s.capability * s.adoption;
  s.utility = points[2] / 100.0;
  s.appendix = s.capability * s.adoption * s.utility;
  s.reported = s.capability * s.adoption * s.adoption * s.utility;
  return s;
}

}  // namespace oracle

namespace testutil {

inline temai::AssessmentRecord make_assessment(const std::string& id, const std::string& table,
                                               const std::array<int, 25>& levels,
                                               const std::string& created_at = "2025-01-01T00:00:00Z") {
  std::vector<temai::LevelRating> ratings;
  for (std::size_t i = 0; i < levels.size(); ++i) ratings.emplace_back(oracle::kIds[i], levels[i]);
  temai::AssessmentMetadata meta{id, temai::canonical::kFrameworkId, table, "test",
                                 temai::parse_timestamp(created_at)};
  return temai::AssessmentRecord(meta, std::move(ratings));
}

inline std::array<int, 25> random_levels(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> level(temai::kMinLevel, temai::kMaxLevel);
  std::array<int, 25> out{};
  for (auto& l : out) l = level(rng);
  return out;
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace testutil
