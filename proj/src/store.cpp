#include "temai/store.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>

#include <fmt/format.h>

#include "temai/canonical.hpp"
#include "temai/error.hpp"
#include "temai/reports.hpp"

namespace temai::store {

namespace fs = std::filesystem;
using namespace json_detail;

Timestamp system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

// --- cache -------------------------------------------------------------------

std::optional<PipelineResult> ResultCache::find(const std::string& assessment_id, int version,
                                                const std::string& table_id, WeightMode wm,
                                                ChainMode mode) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(Key{assessment_id, version, table_id, wm, mode});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResultCache::put(const std::string& assessment_id, int version, const std::string& table_id,
                      WeightMode wm, ChainMode mode, PipelineResult result) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(Key{assessment_id, version, table_id, wm, mode}, std::move(result));
}

void ResultCache::drop_assessment(const std::string& assessment_id) {
  std::lock_guard lock(mu_);
  std::erase_if(entries_, [&](const auto& e) { return std::get<0>(e.first) == assessment_id; });
}

void ResultCache::drop_table(const std::string& table_id) {
  std::lock_guard lock(mu_);
  std::erase_if(entries_, [&](const auto& e) { return std::get<2>(e.first) == table_id; });
}

void ResultCache::clear() {
  std::lock_guard lock(mu_);
  entries_.clear();
}

std::size_t ResultCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// --- study document ----------------------------------------------------------

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

StudyDocument::StudyDocument(std::string study_id, std::string framework_id,
                             std::string weight_table, delphi::StudySettings settings, Clock clock)
    : id_(std::move(study_id)),
      framework_id_(std::move(framework_id)),
      weight_table_(std::move(weight_table)),
      delphi_(id_, std::move(settings)),
      clock_(std::move(clock)) {
  if (!valid_id(id_)) {
    throw Error(ErrorCode::validation, fmt::format("invalid study id '{}'", id_), "study_id");
  }
  log("study.create", id_, fmt::format("framework={} weights={}", framework_id_, weight_table_));
}

void StudyDocument::log(std::string action, std::string target, std::string detail) {
  audit_.push_back({clock_(), std::move(action), std::move(target), std::move(detail)});
}

const AssessmentRecord* StudyDocument::find(const std::string& assessment_id,
                                            std::optional<int> version) const {
  auto it = assessments_.find(assessment_id);
  if (it == assessments_.end()) return nullptr;
  const auto& versions = it->second;
  if (!version) return &versions.back();
  if (*version < 1 || *version > static_cast<int>(versions.size())) return nullptr;
  return &versions[*version - 1];
}

int StudyDocument::version_count(const std::string& assessment_id) const {
  auto it = assessments_.find(assessment_id);
  return it == assessments_.end() ? 0 : static_cast<int>(it->second.size());
}

int StudyDocument::add_assessment(AssessmentRecord record) {
  if (!valid_id(record.id())) {
    throw Error(ErrorCode::validation, fmt::format("invalid assessment id '{}'", record.id()),
                "assessment_id");
  }
  auto& versions = assessments_[record.id()];
  if (!versions.empty() && record.meta().created_at < versions.back().meta().created_at) {
    throw Error(ErrorCode::conflict,
                fmt::format("new version of '{}' is dated before version {} ({})", record.id(),
                            versions.size(), format_timestamp(versions.back().meta().created_at)),
                "created_at");
  }
  const std::string id = record.id();
  versions.push_back(std::move(record));
  cache_.drop_assessment(id);
  const int version = static_cast<int>(versions.size());
  log("assessment.version", id, fmt::format("version {}", version));
  return version;
}

const delphi::RoundSummary& StudyDocument::run_round(int round,
                                                     std::vector<delphi::ExpertSubmission> submissions) {
  const auto& summary = delphi_.run_round(round, std::move(submissions));
  log("delphi.round", id_,
      fmt::format("round {} W={:.4f} {}", summary.round, summary.concordance.w, summary.status()));
  return summary;
}

void StudyDocument::weights_changed(const std::string& table_id) {
  cache_.drop_table(table_id);
  log("weights.change", table_id, "cached results dropped");
}

PipelineResult StudyDocument::pipeline_result(const Pipeline& pipeline,
                                              const std::string& assessment_id,
                                              std::optional<int> version, ChainMode mode) const {
  const AssessmentRecord* record = find(assessment_id, version);
  if (record == nullptr) {
    throw Error(ErrorCode::not_found,
                version ? fmt::format("assessment '{}' has no version {}", assessment_id, *version)
                        : fmt::format("assessment '{}' not found", assessment_id));
  }
  const int v = version ? *version : version_count(assessment_id);
  const auto& table = pipeline.weights().table_id();
  if (auto hit = cache_.find(assessment_id, v, table, pipeline.weight_mode(), mode)) return *hit;
  auto result = pipeline.run(*record, mode);
  cache_.put(assessment_id, v, table, pipeline.weight_mode(), mode, result);
  return result;
}

bool StudyDocument::operator==(const StudyDocument& o) const {
  return id_ == o.id_ && framework_id_ == o.framework_id_ && weight_table_ == o.weight_table_ &&
         delphi_ == o.delphi_ && assessments_ == o.assessments_ && audit_ == o.audit_;
}

Json to_json(const StudyDocument& study) {
  Json assessments = Json::object();
  for (const auto& [id, versions] : study.assessments()) {
    Json list = Json::array();
    for (const auto& v : versions) list.push_back(temai::to_json(v));
    assessments[id] = std::move(list);
  }
  Json audit = Json::array();
  for (const auto& e : study.audit()) {
    audit.push_back(
        {{"at", format_timestamp(e.at)}, {"action", e.action}, {"target", e.target}, {"detail", e.detail}});
  }
  return {{"temai_schema", kSchemaVersion},
          {"kind", "study"},
          {"study_id", study.id()},
          {"framework", study.framework_id()},
          {"weight_table", study.weight_table()},
          {"delphi", temai::to_json(study.delphi())},
          {"assessments", std::move(assessments)},
          {"audit", std::move(audit)}};
}

StudyDocument study_from_json(const Json& doc, Clock clock) {
  check_schema(doc, "study");
  StudyDocument study(string_field(doc, "study_id", ""), string_field(doc, "framework", ""),
                      string_field(doc, "weight_table", ""), {}, clock);
  study.delphi_ = delphi_study_from_json(field(doc, "delphi", ""));
  if (study.delphi_.id() != study.id_) {
    throw Error(ErrorCode::validation, "delphi study id differs from the document id", "delphi.study_id");
  }
  study.audit_.clear();

  const Json& assessments = field(doc, "assessments", "");
  for (const auto& [id, versions] : assessments.items()) {
    const auto path = join_path("assessments", id);
    if (!versions.is_array() || versions.empty()) {
      throw Error(ErrorCode::parse, "assessment versions must be a non-empty array", path);
    }
    auto& list = study.assessments_[id];
    for (std::size_t i = 0; i < versions.size(); ++i) {
      auto record = assessment_from_json(versions[i]);
      if (record.id() != id) {
        throw Error(ErrorCode::validation,
                    fmt::format("version lists assessment '{}' under '{}'", record.id(), id),
                    index_path(path, i));
      }
      list.push_back(std::move(record));
    }
  }

  const Json& audit = field(doc, "audit", "");
  for (std::size_t i = 0; i < audit.size(); ++i) {
    const auto path = index_path("audit", i);
    study.audit_.push_back({parse_timestamp(string_field(audit[i], "at", path)),
                            string_field(audit[i], "action", path),
                            string_field(audit[i], "target", path),
                            string_field(audit[i], "detail", path)});
  }
  return study;
}

std::string save(const StudyDocument& study) { return dump_canonical(to_json(study)); }

StudyDocument load(std::string_view text, Clock clock) {
  return study_from_json(parse_json(text), std::move(clock));
}

// --- config ------------------------------------------------------------------

Config Config::load(const std::string& path) {
  Config c;
  if (!path.empty()) {
    const Json doc = parse_json(read_file(path));
    if (!doc.is_object()) throw Error(ErrorCode::parse, "config must be a JSON object", path);
    c.host = doc.value("host", c.host);
    c.port = doc.value("port", c.port);
    c.data_dir = doc.value("data_dir", c.data_dir);
    c.consensus_threshold = doc.value("consensus_threshold", c.consensus_threshold);
    c.api_token = doc.value("api_token", c.api_token);
  }
  const auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  try {
    if (auto v = env("PORT")) c.port = std::stoi(*v);
    if (auto v = env("CONSENSUS_THRESHOLD")) c.consensus_threshold = std::stod(*v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::validation, "PORT and CONSENSUS_THRESHOLD must be numbers", "environment");
  }
  if (auto v = env("DATA_DIR")) c.data_dir = *v;
  if (auto v = env("TEMAI_API_TOKEN")) c.api_token = *v;

  if (c.port < 0 || c.port > 65535) {
    throw Error(ErrorCode::validation, fmt::format("port {} is out of range", c.port), "port");
  }
  if (!(c.consensus_threshold > 0.0 && c.consensus_threshold <= 1.0)) {
    throw Error(ErrorCode::validation,
                fmt::format("consensus threshold {} is outside (0, 1]", c.consensus_threshold),
                "consensus_threshold");
  }
  return c;
}

// --- workspace ---------------------------------------------------------------

namespace {

void write_atomically(const fs::path& target, const std::string& contents) {
  fs::path tmp = target;
  tmp += ".tmp";
  write_file(tmp.string(), contents);
  fs::rename(tmp, target);
}

}  // namespace

Workspace::Workspace(Config config, Clock clock) : config_(std::move(config)), clock_(std::move(clock)) {
  frameworks_.emplace(canonical::kFrameworkId, canonical::framework());
  tables_.emplace(canonical::kStoreTable, canonical::store_weights());
  tables_.emplace(canonical::kPvTable, canonical::pv_weights());
  if (!config_.data_dir.empty()) load_data_dir();
}

void Workspace::load_data_dir() {
  const fs::path root(config_.data_dir);
  fs::create_directories(root / "studies");
  fs::create_directories(root / "weights");
  for (const auto& entry : fs::directory_iterator(root / "weights")) {
    if (entry.path().extension() != ".json") continue;
    auto table = weight_table_from_json(parse_json(read_file(entry.path().string())));
    tables_.insert_or_assign(table.table_id(), std::move(table));
  }
  for (const auto& entry : fs::directory_iterator(root / "studies")) {
    if (entry.path().extension() != ".json") continue;
    auto doc = load(read_file(entry.path().string()), clock_);
    for (const auto& [id, versions] : doc.assessments()) assessment_index_[id] = doc.id();
    const auto id = doc.id();
    studies_.emplace(id, std::make_shared<Slot>(std::move(doc)));
  }
}

std::vector<std::string> Workspace::framework_ids() const {
  std::shared_lock lock(catalog_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, f] : frameworks_) ids.push_back(id);
  return ids;
}

FrameworkDefinition Workspace::framework(const std::string& id) const {
  std::shared_lock lock(catalog_mu_);
  auto it = frameworks_.find(id);
  if (it == frameworks_.end()) {
    throw Error(ErrorCode::not_found, fmt::format("framework '{}' not found", id));
  }
  return it->second;
}

std::vector<WeightTable> Workspace::weight_tables() const {
  std::shared_lock lock(catalog_mu_);
  std::vector<WeightTable> out;
  for (const auto& [id, t] : tables_) out.push_back(t);
  return out;
}

WeightTable Workspace::weight_table(const std::string& id) const {
  std::shared_lock lock(catalog_mu_);
  auto it = tables_.find(id);
  if (it == tables_.end()) {
    throw Error(ErrorCode::not_found, fmt::format("weight table '{}' not found", id));
  }
  return it->second;
}

void Workspace::put_weight_table(WeightTable table) {
  if (!valid_id(table.table_id())) {
    throw Error(ErrorCode::validation, fmt::format("invalid table id '{}'", table.table_id()), "table_id");
  }
  const auto framework = this->framework(canonical::kFrameworkId);
  const auto report = validate_framework(framework, &table);
  if (!report.valid()) {
    throw Error(ErrorCode::validation, report.violations.front(), "entries");
  }
  const std::string id = table.table_id();
  {
    std::unique_lock lock(catalog_mu_);
    if (!config_.data_dir.empty()) {
      write_atomically(fs::path(config_.data_dir) / "weights" / (id + ".json"),
                       dump_canonical(temai::to_json(table)));
    }
    tables_.insert_or_assign(id, std::move(table));
  }
  for (const auto& study_id : study_ids()) {
    write(study_id, false, [&](StudyDocument& doc) { doc.weights_changed(id); });
  }
}

Pipeline Workspace::pipeline(const std::string& table_id, WeightMode weight_mode) const {
  return Pipeline(framework(canonical::kFrameworkId), weight_table(table_id), weight_mode);
}

std::vector<std::string> Workspace::study_ids() const {
  std::shared_lock lock(studies_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : studies_) ids.push_back(id);
  return ids;
}

std::optional<std::string> Workspace::study_of(const std::string& assessment_id) const {
  std::shared_lock lock(studies_mu_);
  auto it = assessment_index_.find(assessment_id);
  if (it == assessment_index_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<Workspace::Slot> Workspace::find_slot(const std::string& study_id) const {
  std::shared_lock lock(studies_mu_);
  auto it = studies_.find(study_id);
  if (it == studies_.end()) {
    throw Error(ErrorCode::not_found, fmt::format("study '{}' not found", study_id));
  }
  return it->second;
}

std::shared_ptr<Workspace::Slot> Workspace::find_or_create_slot(const std::string& study_id) {
  {
    std::shared_lock lock(studies_mu_);
    if (auto it = studies_.find(study_id); it != studies_.end()) return it->second;
  }
  delphi::StudySettings settings;
  settings.consensus_threshold = config_.consensus_threshold;
  StudyDocument doc(study_id, canonical::kFrameworkId, canonical::kStoreTable, settings, clock_);
  std::unique_lock lock(studies_mu_);
  auto [it, inserted] = studies_.try_emplace(study_id, nullptr);
  if (inserted) it->second = std::make_shared<Slot>(std::move(doc));
  return it->second;
}

void Workspace::after_write(const StudyDocument& doc) {
  {
    std::unique_lock lock(studies_mu_);
    for (const auto& [id, versions] : doc.assessments()) assessment_index_[id] = doc.id();
  }
  if (!config_.data_dir.empty()) {
    write_atomically(fs::path(config_.data_dir) / "studies" / (doc.id() + ".json"), save(doc));
  }
}

}  // namespace temai::store
