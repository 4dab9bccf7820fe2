#include "temai/canonical.hpp"

#include <tuple>
#include <vector>

namespace temai::canonical {

namespace {

struct Row {
  const char* id;
  const char* component;
  const char* display;
  const char* store_name;
  const char* store_weight;
  const char* pv_name;
  const char* pv_weight;
};

// Table order. The store table's "Intelligent Level 4x1" heading is read as
// "Intelligent Level".
constexpr Row kRows[] = {
    {"perception_capability", "intelligent_level", "Perception Capability", "Perception", "1888.89", "Perception Capability", "1844.97"},
    {"analytical_capability", "intelligent_level", "Analytical Capability", "Analysis", "1666.67", "Analytical Capability", "1656.54"},
    {"decision_making_capability", "intelligent_level", "Decision-Making Capability", "Decision", "1444.44", "Decision - Making Capability", "1619.26"},
    {"execution_capability", "intelligent_level", "Execution Capability", "Action", "1111.11", "Execution Capability", "1167.17"},
    {"evolution_capability", "intelligent_level", "Evolution Capability", "evolvability", "555.56", "Evolution Capability", "490.05"},
    {"environmental_adaptation", "equipment_compatibility", "Environmental Adaptation", "environmental adaptability", "1333.33", "Environmental Adaptation", "1217.27"},
    {"sensor_integration", "equipment_compatibility", "Sensor Integration", "sensor fusion degree", "1111.11", "Sensor Integration", "1127.70"},
    {"human_machine_interaction_maturity", "equipment_compatibility", "Human-Machine Interaction Maturity", "HMI Maturity", "888.89", "Human - Machine Interaction Maturity", "877.03"},

    {"modification_difficulty", "task_adaptability", "Modification Difficulty", "Process Reengineering Complexity", "1794.44", "Modification Difficulty", "1540.86"},
    {"scene_transfer_difficulty", "task_adaptability", "Scene Transfer Difficulty", "Cross - Scenario Scalability", "1372.22", "Scene Transfer Difficulty", "1178.14"},
    {"technical_absorption_capacity", "organizational_preparedness", "Technical Absorption Capacity", "AI literacy", "1025.00", "Technical Absorption Capacity", "1265.94"},
    {"digital_infrastructure", "organizational_preparedness", "Digital Infrastructure", "Digital Infrastructure", "1081.94", "Digital Infrastructure", "1107.52"},
    {"change_management_capability", "organizational_preparedness", "Change Management Capability", "Change Mgt Capability", "1025.00", "Change Management Capability", "1186.55"},
    {"upstream_downstream_ecosystem", "ecosystem_maturity", "Upstream-Downstream Ecosystem", "Upstream and Downstream Ecosystems", "1041.67", "Upstream - Downstream Ecosystem", "1226.74"},
    {"standards_completeness", "ecosystem_maturity", "Standards Completeness", "Standard Completeness Degree", "916.67", "Standards Completeness", "1121.63"},
    {"policy_compatibility", "ecosystem_maturity", "Policy Compatibility", "Policy Fit", "541.67", "Policy Compatibility", "689.63"},
    {"value_chain_optimization", "value_optimization_pathway", "Value Chain Optimization", "Value Optimization Pathway", "351.39", "Value Chain Optimization", "683.00"},

    {"quality_improvement", "economic_value_creation", "Quality Improvement", "Quality Enhancement", "1528.73", "Quality Improvement", "1323.07"},
    {"cost_reduction", "economic_value_creation", "Cost Reduction", "Cost Displacement", "1999.11", "Cost Reduction", "1823.28"},
    {"efficiency_enhancement", "economic_value_creation", "Efficiency Enhancement", "Efficiency Amplification", "1763.92", "Efficiency Enhancement", "1613.84"},
    {"risk_prevention", "economic_value_creation", "Risk Prevention", "Risk Prevention", "1175.94", "Risk Prevention", "1452.53"},
    {"value_density_coefficient", "economic_value_creation", "Value Density Coefficient", "Value Density", "587.97", "Value Density Coefficient", "565.29"},
    {"environmental_metrics", "esg_value_creation", "Environmental Metrics", "Environmental Footprint", "1472.17", "Environmental Metrics", "1718.29"},
    {"social_metrics", "esg_value_creation", "Social Metrics", "Social Impact Quadrant", "883.30", "Social Metrics", "1002.36"},
    {"governance_metrics", "esg_value_creation", "Governance Metrics", "Governance Alignment", "588.87", "Governance Metrics", "501.34"},
};

FrameworkDefinition build_framework() {
  std::array<Dimension, 3> dimensions = {Dimension{DimensionId::capability, "Capability"},
                                         Dimension{DimensionId::adoption, "Adoption"},
                                         Dimension{DimensionId::utility, "Utility"}};
  std::vector<Component> components = {
      {"intelligent_level", DimensionId::capability, "Intelligent Level"},
      {"equipment_compatibility", DimensionId::capability, "Equipment Compatibility"},
      {"task_adaptability", DimensionId::adoption, "Task Adaptability"},
      {"organizational_preparedness", DimensionId::adoption, "Organizational Preparedness"},
      {"ecosystem_maturity", DimensionId::adoption, "Ecosystem Maturity"},
      {"value_optimization_pathway", DimensionId::adoption, "Value Optimization Pathway"},
      {"economic_value_creation", DimensionId::utility, "Economic Value Creation"},
      {"esg_value_creation", DimensionId::utility, "ESG Value Creation"},
  };
  std::vector<Criterion> criteria;
  for (const Row& r : kRows) {
    criteria.push_back(Criterion{r.id, r.component, r.display,
                                 {Alias{kStoreTable, r.store_name}, Alias{kPvTable, r.pv_name}}});
  }
  return FrameworkDefinition(kFrameworkId, std::move(dimensions), std::move(components),
                             std::move(criteria));
}

WeightTable build_table(bool store) {
  std::map<std::string, Permyriad> entries;
  for (const Row& r : kRows) {
    entries.emplace(r.id, Permyriad::parse(store ? r.store_weight : r.pv_weight));
  }
  return store ? WeightTable(kStoreTable, "retail store inspection", std::move(entries))
               : WeightTable(kPvTable, "photovoltaic system inspection", std::move(entries));
}

using LevelSpec = std::tuple<const char*, int, Provenance>;

AssessmentRecord build_assessment(const char* id, const char* table, const char* sector,
                                  std::initializer_list<LevelSpec> levels) {
  std::vector<LevelRating> ratings;
  std::map<std::string, Provenance> provenance;
  for (const auto& [criterion, level, prov] : levels) {
    ratings.emplace_back(criterion, level);
    provenance.emplace(criterion, prov);
  }
  AssessmentMetadata meta{id, kFrameworkId, table, sector, parse_timestamp("2025-01-01T00:00:00Z")};
  return AssessmentRecord(std::move(meta), std::move(ratings), std::move(provenance));
}

constexpr auto kStated = Provenance::paper_stated;
constexpr auto kFitted = Provenance::oracle_fitted;

}  // namespace

const FrameworkDefinition& framework() {
  static const FrameworkDefinition def = build_framework();
  return def;
}

const WeightTable& store_weights() {
  static const WeightTable table = build_table(true);
  return table;
}

const WeightTable& pv_weights() {
  static const WeightTable table = build_table(false);
  return table;
}

// Levels not given in prose were recovered by exhaustive fitting against the
// published stage values (lowest residual, then lexicographic order).
const AssessmentRecord& retail_assessment() {
  static const AssessmentRecord record = build_assessment(
      "retail", kStoreTable, "retail store inspection",
      {
          {"perception_capability", 4, kStated},
          {"analytical_capability", 3, kFitted},
          {"decision_making_capability", 2, kStated},
          {"execution_capability", 3, kFitted},
          {"evolution_capability", 2, kStated},
          {"environmental_adaptation", 3, kStated},
          {"sensor_integration", 2, kStated},
          {"human_machine_interaction_maturity", 3, kStated},
          {"modification_difficulty", 4, kFitted},
          {"scene_transfer_difficulty", 2, kStated},
          {"technical_absorption_capacity", 4, kStated},
          {"digital_infrastructure", 4, kFitted},
          {"change_management_capability", 2, kStated},
          {"upstream_downstream_ecosystem", 1, kFitted},
          {"standards_completeness", 1, kFitted},
          {"policy_compatibility", 4, kFitted},
          {"value_chain_optimization", 3, kStated},
          {"quality_improvement", 3, kFitted},
          {"cost_reduction", 4, kStated},
          {"efficiency_enhancement", 5, kStated},
          {"risk_prevention", 4, kFitted},
          {"value_density_coefficient", 5, kFitted},
          {"environmental_metrics", 2, kStated},
          {"social_metrics", 1, kFitted},
          {"governance_metrics", 4, kStated},
      });
  return record;
}

const AssessmentRecord& pv_assessment() {
  static const AssessmentRecord record = build_assessment(
      "pv", kPvTable, "photovoltaic system inspection",
      {
          {"perception_capability", 4, kStated},
          {"analytical_capability", 3, kFitted},
          {"decision_making_capability", 3, kStated},
          {"execution_capability", 4, kStated},
          {"evolution_capability", 1, kStated},
          {"environmental_adaptation", 5, kStated},
          {"sensor_integration", 2, kStated},
          {"human_machine_interaction_maturity", 5, kStated},
          {"modification_difficulty", 2, kStated},
          {"scene_transfer_difficulty", 4, kStated},
          {"technical_absorption_capacity", 2, kStated},
          {"digital_infrastructure", 4, kFitted},
          {"change_management_capability", 4, kFitted},
          {"upstream_downstream_ecosystem", 2, kFitted},
          {"standards_completeness", 4, kStated},
          {"policy_compatibility", 4, kStated},
          {"value_chain_optimization", 5, kStated},
          {"quality_improvement", 4, kFitted},
          {"cost_reduction", 2, kStated},
          {"efficiency_enhancement", 4, kFitted},
          {"risk_prevention", 5, kStated},
          {"value_density_coefficient", 4, kFitted},
          {"environmental_metrics", 5, kStated},
          {"social_metrics", 4, kFitted},
          {"governance_metrics", 2, kFitted},
      });
  return record;
}

}  // namespace temai::canonical
