#pragma once

#include <string>

#include "temai/framework.hpp"

namespace temai::canonical {

inline constexpr const char* kFrameworkId = "temai-v1";
inline constexpr const char* kStoreTable = "store";
inline constexpr const char* kPvTable = "pv";

/// 3 dimensions, 8 components, 25 weighted criteria; retail table names are
/// registered as "store" aliases and photovoltaic names as "pv" aliases.
const FrameworkDefinition& framework();

/// Retail weights, as published (Adoption column sums to 9150.00‱).
const WeightTable& store_weights();
/// Photovoltaic weights, as published.
const WeightTable& pv_weights();

const AssessmentRecord& retail_assessment();
const AssessmentRecord& pv_assessment();

/// Stage values reported for a case study, rates as fractions.
struct PublishedStages {
  double capability_score;
  double adoption_rate;
  double effective_capability;
  double utility_rate;
  double final_value;
};

inline constexpr PublishedStages kRetailPublished{57.56, 0.5116, 29.44, 0.7046, 10.61};
inline constexpr PublishedStages kPvPublished{70.19, 0.6523, 45.78, 0.7704, 23.01};

/// Three-factor products of the published stage values.
inline constexpr double kRetailAppendixFinal = 20.74;
inline constexpr double kPvAppendixFinal = 35.27;

inline constexpr double kPublishedCapabilityGap = 12.63;
inline constexpr double kPublishedAdoptionGapPoints = 14.07;

}  // namespace temai::canonical
