#include "temai/framework.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "temai/error.hpp"

namespace temai {

// --- timestamps ------------------------------------------------------------

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string buf(text);
  if (buf.size() != 20 ||
      std::sscanf(buf.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &s, &tail) != 7 ||
      tail != 'Z') {
    throw Error(ErrorCode::parse, fmt::format("timestamp '{}' is not YYYY-MM-DDTHH:MM:SSZ", text));
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                        std::chrono::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::parse, fmt::format("timestamp '{}' is out of range", text));
  }
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s};
}

// --- dimensions ------------------------------------------------------------

std::string_view to_string(DimensionId id) noexcept {
  switch (id) {
    case DimensionId::capability: return "capability";
    case DimensionId::adoption: return "adoption";
    case DimensionId::utility: return "utility";
  }
  return "capability";
}

DimensionId parse_dimension(std::string_view text) {
  for (auto d : kDimensions) {
    if (to_string(d) == text) return d;
  }
  throw Error(ErrorCode::parse, fmt::format("unknown dimension '{}'", text));
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::paper_stated: return "paper_stated";
    case Provenance::oracle_fitted: return "oracle_fitted";
    case Provenance::user_entered: return "user_entered";
  }
  return "user_entered";
}

Provenance parse_provenance(std::string_view text) {
  for (auto p : {Provenance::paper_stated, Provenance::oracle_fitted, Provenance::user_entered}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorCode::parse, fmt::format("unknown provenance '{}'", text));
}

// --- framework -------------------------------------------------------------

namespace {

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

FrameworkDefinition::FrameworkDefinition(std::string id, std::array<Dimension, 3> dimensions,
                                         std::vector<Component> components,
                                         std::vector<Criterion> criteria)
    : id_(std::move(id)),
      dimensions_(std::move(dimensions)),
      components_(std::move(components)),
      criteria_(std::move(criteria)) {}

const Criterion* FrameworkDefinition::find_criterion(std::string_view id) const {
  auto it = std::find_if(criteria_.begin(), criteria_.end(),
                         [&](const Criterion& c) { return c.id == id; });
  return it == criteria_.end() ? nullptr : &*it;
}

const Component* FrameworkDefinition::find_component(std::string_view id) const {
  auto it = std::find_if(components_.begin(), components_.end(),
                         [&](const Component& c) { return c.id == id; });
  return it == components_.end() ? nullptr : &*it;
}

std::optional<DimensionId> FrameworkDefinition::dimension_of(std::string_view criterion_id) const {
  const Criterion* c = find_criterion(criterion_id);
  if (c == nullptr) return std::nullopt;
  const Component* comp = find_component(c->component);
  if (comp == nullptr) return std::nullopt;
  return comp->dimension;
}

std::vector<const Criterion*> FrameworkDefinition::criteria_in(DimensionId dimension) const {
  std::vector<const Criterion*> out;
  for (const auto& c : criteria_) {
    const Component* comp = find_component(c.component);
    if (comp != nullptr && comp->dimension == dimension) out.push_back(&c);
  }
  return out;
}

std::vector<const Component*> FrameworkDefinition::components_in(DimensionId dimension) const {
  std::vector<const Component*> out;
  for (const auto& c : components_) {
    if (c.dimension == dimension) out.push_back(&c);
  }
  return out;
}

std::string FrameworkDefinition::resolve_alias(std::string_view name,
                                               std::string_view table_id) const {
  const std::string key = normalize_name(name);
  std::vector<std::pair<std::string, const Criterion*>> known;
  for (const auto& c : criteria_) {
    known.emplace_back(c.id, &c);
    known.emplace_back(c.display_name, &c);
    for (const auto& alias : c.aliases) {
      if (alias.table_id == table_id) known.emplace_back(alias.name, &c);
    }
  }
  for (const auto& [label, crit] : known) {
    if (normalize_name(label) == key) return crit->id;
  }

  std::vector<std::pair<std::size_t, std::string>> ranked;
  std::set<std::string> seen;
  for (const auto& [label, crit] : known) {
    if (label == crit->id || !seen.insert(label).second) continue;
    ranked.emplace_back(edit_distance(key, normalize_name(label)), label);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> nearest;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) nearest.push_back(ranked[i].second);
  throw Error(ErrorCode::lookup,
              fmt::format("unknown criterion name '{}' for table '{}'; nearest candidates: {}",
                          name, table_id, fmt::join(nearest, ", ")));
}

bool FrameworkDefinition::operator==(const FrameworkDefinition& other) const {
  return id_ == other.id_ && dimensions_ == other.dimensions_ &&
         components_ == other.components_ && criteria_ == other.criteria_;
}

// --- weights ---------------------------------------------------------------

WeightTable::WeightTable(std::string table_id, std::string sector,
                         std::map<std::string, Permyriad> entries)
    : table_id_(std::move(table_id)), sector_(std::move(sector)), entries_(std::move(entries)) {
  for (const auto& [criterion, w] : entries_) {
    if (w.hundredths() <= 0) {
      throw Error(ErrorCode::validation,
                  fmt::format("weight for '{}' in table '{}' must be strictly positive, got {}",
                              criterion, table_id_, w.to_string()),
                  "entries." + criterion);
    }
  }
}

const Permyriad* WeightTable::find(std::string_view criterion) const {
  auto it = entries_.find(std::string(criterion));
  return it == entries_.end() ? nullptr : &it->second;
}

Permyriad WeightTable::weight(std::string_view criterion) const {
  if (const Permyriad* w = find(criterion)) return *w;
  throw Error(ErrorCode::completeness,
              fmt::format("weight table '{}' has no weight for criterion '{}'", table_id_, criterion),
              "entries." + std::string(criterion));
}

Permyriad WeightTable::dimension_sum(const FrameworkDefinition& framework,
                                     DimensionId dimension) const {
  Permyriad sum;
  for (const Criterion* c : framework.criteria_in(dimension)) {
    if (const Permyriad* w = find(c->id)) sum += *w;
  }
  return sum;
}

WeightTable WeightTable::scaled(const FrameworkDefinition& framework, DimensionId dimension,
                                std::int64_t factor) const {
  auto entries = entries_;
  for (const Criterion* c : framework.criteria_in(dimension)) {
    auto it = entries.find(c->id);
    if (it != entries.end()) it->second = Permyriad::from_hundredths(it->second.hundredths() * factor);
  }
  return WeightTable(table_id_, sector_, std::move(entries));
}

// --- levels ----------------------------------------------------------------

int level_to_score(int level, std::string_view context) {
  if (level < kMinLevel || level > kMaxLevel) {
    throw Error(ErrorCode::validation,
                context.empty()
                    ? fmt::format("level {} is outside 1..5", level)
                    : fmt::format("level {} for criterion '{}' is outside 1..5", level, context),
                std::string(context));
  }
  return 20 * level;
}

LevelRating::LevelRating(std::string criterion, int level)
    : criterion_(std::move(criterion)), level_(level) {
  level_to_score(level_, criterion_);
}

// --- assessments -----------------------------------------------------------

AssessmentRecord::AssessmentRecord(AssessmentMetadata meta, std::vector<LevelRating> ratings,
                                   std::map<std::string, Provenance> provenance)
    : meta_(std::move(meta)), ratings_(std::move(ratings)), provenance_(std::move(provenance)) {
  std::sort(ratings_.begin(), ratings_.end(),
            [](const LevelRating& a, const LevelRating& b) { return a.criterion() < b.criterion(); });
  for (std::size_t i = 1; i < ratings_.size(); ++i) {
    if (ratings_[i].criterion() == ratings_[i - 1].criterion()) {
      throw Error(ErrorCode::validation,
                  fmt::format("criterion '{}' is rated more than once", ratings_[i].criterion()),
                  "ratings");
    }
  }
  for (const auto& [criterion, p] : provenance_) {
    if (!find_level(criterion)) {
      throw Error(ErrorCode::validation,
                  fmt::format("provenance given for unrated criterion '{}'", criterion),
                  "provenance." + criterion);
    }
  }
}

std::optional<int> AssessmentRecord::find_level(std::string_view criterion) const {
  auto it = std::lower_bound(
      ratings_.begin(), ratings_.end(), criterion,
      [](const LevelRating& r, std::string_view key) { return r.criterion() < key; });
  if (it == ratings_.end() || it->criterion() != criterion) return std::nullopt;
  return it->level();
}

int AssessmentRecord::level(std::string_view criterion) const {
  if (auto l = find_level(criterion)) return *l;
  throw Error(ErrorCode::completeness,
              fmt::format("assessment '{}' has no rating for criterion '{}'", meta_.assessment_id,
                          criterion),
              "ratings." + std::string(criterion));
}

std::map<std::string, int> AssessmentRecord::level_map() const {
  std::map<std::string, int> out;
  for (const auto& r : ratings_) out.emplace(r.criterion(), r.level());
  return out;
}

Provenance AssessmentRecord::provenance_of(std::string_view criterion) const {
  auto it = provenance_.find(std::string(criterion));
  return it == provenance_.end() ? Provenance::user_entered : it->second;
}

void AssessmentRecord::check_complete(const FrameworkDefinition& framework) const {
  for (const auto& c : framework.criteria()) level(c.id);
  for (const auto& r : ratings_) {
    if (framework.find_criterion(r.criterion()) == nullptr) {
      throw Error(ErrorCode::validation,
                  fmt::format("rating for '{}' does not match any criterion of framework '{}'",
                              r.criterion(), framework.id()),
                  "ratings." + r.criterion());
    }
  }
}

AssessmentRecord AssessmentRecord::with_levels(std::span<const LevelRating> changes) const {
  auto levels = level_map();
  auto provenance = provenance_;
  for (const auto& change : changes) {
    levels[change.criterion()] = change.level();
    provenance[change.criterion()] = Provenance::user_entered;
  }
  std::vector<LevelRating> ratings;
  ratings.reserve(levels.size());
  for (const auto& [criterion, level] : levels) ratings.emplace_back(criterion, level);
  return AssessmentRecord(meta_, std::move(ratings), std::move(provenance));
}

AssessmentRecord AssessmentRecord::with_metadata(AssessmentMetadata meta) const {
  AssessmentRecord copy = *this;
  copy.meta_ = std::move(meta);
  return copy;
}

// --- validation ------------------------------------------------------------

const DimensionSum* ValidationReport::sum_for(DimensionId dimension) const {
  for (const auto& s : dimension_sums) {
    if (s.dimension == dimension) return &s;
  }
  return nullptr;
}

ValidationReport validate_framework(const FrameworkDefinition& framework,
                                    const WeightTable* weights) {
  ValidationReport report;
  auto& v = report.violations;

  std::set<std::string> ids;
  for (const auto& comp : framework.components()) {
    if (!ids.insert(comp.id).second) v.push_back(fmt::format("duplicate component id '{}'", comp.id));
  }
  ids.clear();
  for (const auto& c : framework.criteria()) {
    if (!ids.insert(c.id).second) v.push_back(fmt::format("duplicate criterion id '{}'", c.id));
    if (framework.find_component(c.component) == nullptr) {
      v.push_back(fmt::format("orphan criterion '{}' references unknown component '{}'", c.id,
                              c.component));
    }
  }
  for (const auto& comp : framework.components()) {
    const bool used = std::any_of(framework.criteria().begin(), framework.criteria().end(),
                                  [&](const Criterion& c) { return c.component == comp.id; });
    if (!used) v.push_back(fmt::format("component '{}' has no criteria", comp.id));
  }

  const auto n_components = static_cast<int>(framework.components().size());
  if (n_components != kExpectedComponents) {
    v.push_back(fmt::format("component count {} ≠ {}", n_components, kExpectedComponents));
  }
  const auto n_criteria = static_cast<int>(framework.criteria().size());
  if (n_criteria != kExpectedCriteria) {
    v.push_back(fmt::format("criterion count {} ≠ {}", n_criteria, kExpectedCriteria));
  }
  for (std::size_t i = 0; i < kDimensions.size(); ++i) {
    const auto n = static_cast<int>(framework.criteria_in(kDimensions[i]).size());
    if (n != kExpectedCriteriaPerDimension[i]) {
      v.push_back(fmt::format("{} criterion count {} ≠ {}", to_string(kDimensions[i]), n,
                              kExpectedCriteriaPerDimension[i]));
    }
  }

  if (weights != nullptr) {
    for (const auto& c : framework.criteria()) {
      if (weights->find(c.id) == nullptr) {
        v.push_back(fmt::format("weight table '{}' has no weight for '{}'", weights->table_id(), c.id));
      }
    }
    for (const auto& [criterion, w] : weights->entries()) {
      if (framework.find_criterion(criterion) == nullptr) {
        v.push_back(fmt::format("weight table '{}' names unknown criterion '{}'",
                                weights->table_id(), criterion));
      }
    }
    for (auto d : kDimensions) {
      const Permyriad sum = weights->dimension_sum(framework, d);
      const std::int64_t off = sum.hundredths() - kFullDimension.hundredths();
      const bool within = (off < 0 ? -off : off) <= kWeightSumTolerance.hundredths();
      report.dimension_sums.push_back({d, sum, within ? SumStatus::pass : SumStatus::warn});
    }
  }
  return report;
}

}  // namespace temai
