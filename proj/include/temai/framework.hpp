#pragma once

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "temai/decimal.hpp"

namespace temai {

using Timestamp = std::chrono::sys_seconds;

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

enum class DimensionId { capability, adoption, utility };

inline constexpr std::array<DimensionId, 3> kDimensions = {
    DimensionId::capability, DimensionId::adoption, DimensionId::utility};

std::string_view to_string(DimensionId id) noexcept;
DimensionId parse_dimension(std::string_view text);

struct Dimension {
  DimensionId id;
  std::string display_name;

  bool operator==(const Dimension&) const = default;
};

struct Component {
  std::string id;
  DimensionId dimension;
  std::string display_name;

  bool operator==(const Component&) const = default;
};

/// A per-weight-table spelling of a criterion name.
struct Alias {
  std::string table_id;
  std::string name;

  bool operator==(const Alias&) const = default;
};

struct Criterion {
  std::string id;
  std::string component;
  std::string display_name;
  std::vector<Alias> aliases;

  bool operator==(const Criterion&) const = default;
};

/// The three-level hierarchy. Construction keeps whatever it is given so that
/// validate_framework can report structural problems instead of throwing.
class FrameworkDefinition {
 public:
  FrameworkDefinition(std::string id, std::array<Dimension, 3> dimensions,
                      std::vector<Component> components, std::vector<Criterion> criteria);

  const std::string& id() const { return id_; }
  const std::array<Dimension, 3>& dimensions() const { return dimensions_; }
  const std::vector<Component>& components() const { return components_; }
  const std::vector<Criterion>& criteria() const { return criteria_; }

  const Criterion* find_criterion(std::string_view id) const;
  const Component* find_component(std::string_view id) const;
  std::optional<DimensionId> dimension_of(std::string_view criterion_id) const;

  /// Criteria of one dimension in declaration order; orphans are skipped.
  std::vector<const Criterion*> criteria_in(DimensionId dimension) const;
  std::vector<const Component*> components_in(DimensionId dimension) const;

  /// Maps a table-specific criterion name (or a canonical id) to the canonical
  /// id. Matching ignores case and spacing around hyphens.
  std::string resolve_alias(std::string_view name, std::string_view table_id) const;

  bool operator==(const FrameworkDefinition& other) const;

 private:
  std::string id_;
  std::array<Dimension, 3> dimensions_;
  std::vector<Component> components_;
  std::vector<Criterion> criteria_;
};

class WeightTable {
 public:
  /// Throws on non-positive weights.
  WeightTable(std::string table_id, std::string sector, std::map<std::string, Permyriad> entries);

  const std::string& table_id() const { return table_id_; }
  const std::string& sector() const { return sector_; }
  const std::map<std::string, Permyriad>& entries() const { return entries_; }

  const Permyriad* find(std::string_view criterion) const;
  Permyriad weight(std::string_view criterion) const;
  Permyriad dimension_sum(const FrameworkDefinition& framework, DimensionId dimension) const;

  /// Same table with every weight in `dimension` multiplied by `factor`.
  WeightTable scaled(const FrameworkDefinition& framework, DimensionId dimension,
                     std::int64_t factor) const;

  bool operator==(const WeightTable&) const = default;

 private:
  std::string table_id_;
  std::string sector_;
  std::map<std::string, Permyriad> entries_;
};

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 5;

/// 20 × level. Throws a validation error mentioning `context` when the level
/// is outside 1..5.
int level_to_score(int level, std::string_view context = {});

class LevelRating {
 public:
  LevelRating(std::string criterion, int level);

  const std::string& criterion() const { return criterion_; }
  int level() const { return level_; }
  int score() const { return level_to_score(level_); }

  bool operator==(const LevelRating&) const = default;

 private:
  std::string criterion_;
  int level_;
};

enum class Provenance { paper_stated, oracle_fitted, user_entered };

std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view text);

struct AssessmentMetadata {
  std::string assessment_id;
  std::string framework_id;
  std::string weight_table;
  std::string sector;
  Timestamp created_at{};

  bool operator==(const AssessmentMetadata&) const = default;
};

/// One evaluation instance. Ratings are kept sorted by criterion id; each
/// criterion may appear once.
class AssessmentRecord {
 public:
  AssessmentRecord(AssessmentMetadata meta, std::vector<LevelRating> ratings,
                   std::map<std::string, Provenance> provenance = {});

  const AssessmentMetadata& meta() const { return meta_; }
  const std::string& id() const { return meta_.assessment_id; }
  const std::vector<LevelRating>& ratings() const { return ratings_; }
  const std::map<std::string, Provenance>& provenance() const { return provenance_; }

  std::optional<int> find_level(std::string_view criterion) const;
  /// Throws a completeness error when the criterion has no rating.
  int level(std::string_view criterion) const;
  std::map<std::string, int> level_map() const;
  Provenance provenance_of(std::string_view criterion) const;

  /// Throws unless every framework criterion is rated and nothing else is.
  void check_complete(const FrameworkDefinition& framework) const;

  /// Copy with the given levels replaced; changed criteria become user_entered.
  AssessmentRecord with_levels(std::span<const LevelRating> changes) const;
  AssessmentRecord with_metadata(AssessmentMetadata meta) const;

  bool operator==(const AssessmentRecord&) const = default;

 private:
  AssessmentMetadata meta_;
  std::vector<LevelRating> ratings_;
  std::map<std::string, Provenance> provenance_;
};

enum class SumStatus { pass, warn };

struct DimensionSum {
  DimensionId dimension;
  Permyriad sum;
  SumStatus status;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<DimensionSum> dimension_sums;

  bool valid() const { return violations.empty(); }
  const DimensionSum* sum_for(DimensionId dimension) const;
};

inline constexpr int kExpectedComponents = 8;
inline constexpr std::array<int, 3> kExpectedCriteriaPerDimension = {8, 9, 8};
inline constexpr int kExpectedCriteria = 25;
/// ±0.05‱, the rounding slack of two-decimal tables.
inline constexpr Permyriad kWeightSumTolerance = Permyriad::from_hundredths(5);

/// Structural checks against the TEMAI shape and, when a weight table is
/// given, weight coverage and per-dimension sums.
ValidationReport validate_framework(const FrameworkDefinition& framework,
                                    const WeightTable* weights = nullptr);

}  // namespace temai
