#include "temai/ahp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "temai/csv.hpp"
#include "temai/error.hpp"

namespace temai::ahp {

namespace {

// Slack for judgments that were computed (1/9 written as 0.111..., geometric
// means) rather than typed.
constexpr double kBoundSlack = 1e-12;

std::string cell(std::size_t i, std::size_t j) { return fmt::format("values[{}][{}]", i, j); }

std::vector<double> normalized(std::vector<double> v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

PairwiseMatrix::PairwiseMatrix(std::vector<std::string> items,
                               std::vector<std::vector<double>> values)
    : items_(std::move(items)) {
  const std::size_t n = items_.size();
  if (n == 0) throw Error(ErrorCode::validation, "pairwise matrix needs at least one item", "items");
  if (values.size() != n) {
    throw Error(ErrorCode::validation,
                fmt::format("pairwise matrix has {} rows for {} items", values.size(), n), "values");
  }
  std::vector<std::string> sorted = items_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::validation, "pairwise matrix items must be unique", "items");
  }
  values_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i].size() != n) {
      throw Error(ErrorCode::validation,
                  fmt::format("row {} has {} entries, expected {}", i, values[i].size(), n),
                  fmt::format("values[{}]", i));
    }
    for (double v : values[i]) values_.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v) || v <= 0.0) {
        throw Error(ErrorCode::validation, fmt::format("entry {} = {} is not positive", cell(i, j), v),
                    cell(i, j));
      }
      if (i == j && std::abs(v - 1.0) > kReciprocityTolerance) {
        throw Error(ErrorCode::validation, fmt::format("diagonal entry {} = {} must be 1", cell(i, j), v),
                    cell(i, j));
      }
      if (v < kMinJudgment * (1.0 - kBoundSlack) || v > kMaxJudgment * (1.0 + kBoundSlack)) {
        throw Error(ErrorCode::validation,
                    fmt::format("entry {} = {} is outside the Saaty scale [1/9, 9]", cell(i, j), v),
                    cell(i, j));
      }
      if (j > i && std::abs(v * at(j, i) - 1.0) > kReciprocityTolerance) {
        throw Error(ErrorCode::validation,
                    fmt::format("entries {} and {} are not reciprocal ({} × {})", cell(i, j),
                                cell(j, i), v, at(j, i)),
                    cell(j, i));
      }
    }
  }
}

PairwiseMatrix PairwiseMatrix::from_weights(std::vector<std::string> items,
                                            std::span<const double> weights) {
  if (weights.size() != items.size()) {
    throw Error(ErrorCode::validation, "weight count does not match item count", "weights");
  }
  std::vector<std::vector<double>> values(weights.size(), std::vector<double>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t j = 0; j < weights.size(); ++j) {
      values[i][j] = i == j ? 1.0 : weights[i] / weights[j];
    }
  }
  return PairwiseMatrix(std::move(items), std::move(values));
}

std::vector<std::vector<double>> PairwiseMatrix::rows() const {
  const std::size_t n = size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = at(i, j);
  }
  return out;
}

double WeightVector::weight_of(std::string_view item) const {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] == item) return weights[i];
  }
  throw Error(ErrorCode::lookup, fmt::format("no weight for item '{}'", item));
}

std::string_view to_string(Method m) noexcept {
  return m == Method::eigenvector ? "eigenvector" : "geometric_mean";
}

Method parse_method(std::string_view text) {
  if (text == "eigenvector") return Method::eigenvector;
  if (text == "geometric_mean") return Method::geometric_mean;
  throw Error(ErrorCode::validation,
              fmt::format("unknown derivation method '{}' (eigenvector|geometric_mean)", text),
              "method");
}

WeightVector derive_weights(const PairwiseMatrix& m, Method method) {
  const std::size_t n = m.size();
  if (n < 2) throw Error(ErrorCode::validation, "weight derivation needs at least two items", "items");

  if (method == Method::geometric_mean) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      double log_sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) log_sum += std::log(m.at(i, j));
      w[i] = std::exp(log_sum / static_cast<double>(n));
    }
    return {m.items(), normalized(std::move(w))};
  }

  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int iter = 1; iter <= kPowerMaxIterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m.at(i, j) * x[j];
      next[i] = s;
    }
    next = normalized(std::move(next));
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - x[i]));
    std::swap(x, next);
    next.assign(n, 0.0);
    if (delta < kPowerTolerance) return {m.items(), std::move(x)};
  }
  throw Error(ErrorCode::numerical,
              fmt::format("power iteration did not converge within {} iterations", kPowerMaxIterations));
}

double lambda_max(const PairwiseMatrix& m, const WeightVector& w) {
  const std::size_t n = m.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m.at(i, j) * w.weights[j];
    total += s / w.weights[i];
  }
  return total / static_cast<double>(n);
}

ConsistencyReport consistency(const PairwiseMatrix& m, double threshold) {
  const std::size_t n = m.size();
  if (n > static_cast<std::size_t>(kMaxConsistencyOrder)) {
    throw Error(ErrorCode::unsupported,
                fmt::format("consistency is tabulated for n ≤ {}, got n = {}", kMaxConsistencyOrder, n));
  }
  ConsistencyReport r;
  r.random_index = kRandomIndex[n - 1];
  if (n <= 2) {
    r.lambda_max = static_cast<double>(n);
    r.acceptable = 0.0 < threshold;
    return r;
  }
  r.lambda_max = lambda_max(m, derive_weights(m, Method::eigenvector));
  r.consistency_index = (r.lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1);
  r.consistency_ratio = r.consistency_index / r.random_index;
  r.acceptable = r.consistency_ratio < threshold;
  return r;
}

PairwiseMatrix aggregate_experts(std::span<const PairwiseMatrix> matrices) {
  if (matrices.empty()) throw Error(ErrorCode::validation, "no expert matrices to aggregate", "matrices");
  const auto& items = matrices.front().items();
  for (std::size_t k = 1; k < matrices.size(); ++k) {
    if (matrices[k].items() != items) {
      throw Error(ErrorCode::validation,
                  fmt::format("matrix {} judges items [{}], expected [{}]", k,
                              fmt::join(matrices[k].items(), ", "), fmt::join(items, ", ")),
                  fmt::format("matrices[{}].items", k));
    }
  }
  const std::size_t n = items.size();
  const double experts = static_cast<double>(matrices.size());
  std::vector<std::vector<double>> values(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double log_sum = 0.0;
      for (const auto& m : matrices) log_sum += std::log(m.at(i, j));
      values[i][j] = std::exp(log_sum / experts);
      values[j][i] = 1.0 / values[i][j];
    }
  }
  return PairwiseMatrix(items, std::move(values));
}

PairwiseMatrix matrix_from_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorCode::parse, "matrix CSV is empty");
  const auto& header = rows.front();
  if (rows.size() - 1 != header.size()) {
    throw Error(ErrorCode::parse, fmt::format("matrix CSV has {} item columns but {} data rows",
                                              header.size(), rows.size() - 1));
  }
  std::vector<std::vector<double>> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw Error(ErrorCode::parse, fmt::format("matrix CSV row {} has {} fields, expected {}", r,
                                                rows[r].size(), header.size()));
    }
    std::vector<double> row;
    for (const auto& f : rows[r]) row.push_back(csv::parse_number(f));
    values.push_back(std::move(row));
  }
  return PairwiseMatrix(header, std::move(values));
}

namespace {

void check_priority_vector(const WeightVector& v, const std::string& path) {
  if (v.items.size() != v.weights.size() || v.items.empty()) {
    throw Error(ErrorCode::validation, "priority vector items and weights differ in length", path);
  }
  double sum = 0.0;
  for (double w : v.weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::validation, "priority weights must be positive", path);
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::validation, fmt::format("priority weights sum to {}, expected 1", sum), path);
  }
}

}  // namespace

WeightTable synthesize_hierarchy(const FrameworkDefinition& framework, std::string table_id,
                                 std::string sector, const WeightVector& dimension_weights,
                                 const std::map<DimensionId, WeightVector>& component_weights,
                                 const std::map<std::string, WeightVector>& criterion_weights) {
  check_priority_vector(dimension_weights, "dimension_weights");
  for (const auto& item : dimension_weights.items) parse_dimension(item);

  std::map<std::string, Permyriad> entries;
  for (const auto& criterion : framework.criteria()) {
    const Component* comp = framework.find_component(criterion.component);
    const auto unreachable = [&](std::string_view why) {
      return Error(ErrorCode::structural,
                   fmt::format("criterion '{}' is unreachable: {}", criterion.id, why),
                   "criterion_weights." + criterion.component);
    };
    if (comp == nullptr) throw unreachable("its component is not defined");

    auto cw = component_weights.find(comp->dimension);
    if (cw == component_weights.end()) throw unreachable("no component weights for its dimension");
    check_priority_vector(cw->second, fmt::format("component_weights.{}", to_string(comp->dimension)));
    const auto comp_hits = std::count(cw->second.items.begin(), cw->second.items.end(), comp->id);
    if (comp_hits != 1) throw unreachable("its component is not listed exactly once");

    auto kw = criterion_weights.find(comp->id);
    if (kw == criterion_weights.end()) throw unreachable("no criterion weights for its component");
    check_priority_vector(kw->second, "criterion_weights." + comp->id);
    const auto crit_hits = std::count(kw->second.items.begin(), kw->second.items.end(), criterion.id);
    if (crit_hits != 1) throw unreachable("it is not listed exactly once under its component");

    const double share = cw->second.weight_of(comp->id) * kw->second.weight_of(criterion.id);
    entries.emplace(criterion.id, Permyriad::from_value(share * 10000.0));
  }
  return WeightTable(std::move(table_id), std::move(sector), std::move(entries));
}

}  // namespace temai::ahp
