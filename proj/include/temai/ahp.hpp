#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "temai/framework.hpp"

namespace temai::ahp {

inline constexpr double kReciprocityTolerance = 1e-9;
inline constexpr double kMinJudgment = 1.0 / 9.0;
inline constexpr double kMaxJudgment = 9.0;
inline constexpr double kPowerTolerance = 1e-10;
inline constexpr int kPowerMaxIterations = 1000;
inline constexpr double kDefaultCrThreshold = 0.1;
inline constexpr int kMaxConsistencyOrder = 10;

/// Random consistency index by matrix order, index 0 ↔ n = 1.
inline constexpr std::array<double, 10> kRandomIndex = {0.0,  0.0,  0.58, 0.90, 1.12,
                                                        1.24, 1.32, 1.41, 1.45, 1.49};

/// Reciprocal positive judgment matrix on the Saaty scale. Row-major storage.
class PairwiseMatrix {
 public:
  /// Validates square shape, unit diagonal, reciprocity and [1/9, 9] bounds.
  PairwiseMatrix(std::vector<std::string> items, std::vector<std::vector<double>> values);

  /// Builds the fully consistent matrix values[i][j] = w_i / w_j.
  static PairwiseMatrix from_weights(std::vector<std::string> items, std::span<const double> weights);

  std::size_t size() const { return items_.size(); }
  const std::vector<std::string>& items() const { return items_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * items_.size() + j]; }
  std::vector<std::vector<double>> rows() const;

  bool operator==(const PairwiseMatrix&) const = default;

 private:
  std::vector<std::string> items_;
  std::vector<double> values_;
};

struct WeightVector {
  std::vector<std::string> items;
  std::vector<double> weights;

  double weight_of(std::string_view item) const;
};

enum class Method { eigenvector, geometric_mean };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);

struct ConsistencyReport {
  double lambda_max = 0.0;
  double consistency_index = 0.0;
  double random_index = 0.0;
  double consistency_ratio = 0.0;
  bool acceptable = true;
};

/// Principal right eigenvector via power iteration from the uniform vector,
/// or normalized row geometric means.
WeightVector derive_weights(const PairwiseMatrix& m, Method method = Method::eigenvector);

/// Rayleigh-style estimate of the principal eigenvalue for a positive weight
/// vector: mean of (A w)_i / w_i.
double lambda_max(const PairwiseMatrix& m, const WeightVector& w);

ConsistencyReport consistency(const PairwiseMatrix& m, double threshold = kDefaultCrThreshold);

/// Element-wise geometric mean over experts judging the same item list.
PairwiseMatrix aggregate_experts(std::span<const PairwiseMatrix> matrices);

/// Row-major CSV; the header row lists item ids and each following row holds
/// one matrix row. Entries may be written as fractions ("1/3").
PairwiseMatrix matrix_from_csv(std::string_view text);

/// Combines per-level priority vectors into a weight table. Each criterion's
/// weight within its dimension is component share × criterion share × 10000‱.
WeightTable synthesize_hierarchy(const FrameworkDefinition& framework, std::string table_id,
                                 std::string sector, const WeightVector& dimension_weights,
                                 const std::map<DimensionId, WeightVector>& component_weights,
                                 const std::map<std::string, WeightVector>& criterion_weights);

}  // namespace temai::ahp
