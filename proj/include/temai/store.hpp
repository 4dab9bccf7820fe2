#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "temai/delphi.hpp"
#include "temai/scoring.hpp"
#include "temai/serialization.hpp"

namespace temai::store {

using Clock = std::function<Timestamp()>;

/// Wall clock truncated to whole seconds.
Timestamp system_now();

struct AuditEntry {
  Timestamp at{};
  std::string action;  // e.g. "assessment.version", "delphi.round"
  std::string target;
  std::string detail;

  bool operator==(const AuditEntry&) const = default;
};

/// Memoized pipeline results. Copies start empty: the cache is derived state.
class ResultCache {
 public:
  ResultCache() = default;
  ResultCache(const ResultCache&) {}
  ResultCache& operator=(const ResultCache&) {
    clear();
    return *this;
  }

  std::optional<PipelineResult> find(const std::string& assessment_id, int version,
                                     const std::string& table_id, WeightMode wm, ChainMode mode) const;
  void put(const std::string& assessment_id, int version, const std::string& table_id, WeightMode wm,
           ChainMode mode, PipelineResult result);
  void drop_assessment(const std::string& assessment_id);
  void drop_table(const std::string& table_id);
  void clear();
  std::size_t size() const;

 private:
  using Key = std::tuple<std::string, int, std::string, WeightMode, ChainMode>;
  mutable std::mutex mu_;
  std::map<Key, PipelineResult> entries_;
};

/// Persistence unit: one Delphi study plus the versioned assessments scored
/// against it. Assessment versions are immutable snapshots; the audit log only
/// grows.
class StudyDocument {
 public:
  StudyDocument(std::string study_id, std::string framework_id, std::string weight_table,
                delphi::StudySettings settings = {}, Clock clock = system_now);

  const std::string& id() const { return id_; }
  const std::string& framework_id() const { return framework_id_; }
  const std::string& weight_table() const { return weight_table_; }
  const delphi::DelphiStudy& delphi() const { return delphi_; }
  const std::map<std::string, std::vector<AssessmentRecord>>& assessments() const {
    return assessments_;
  }
  const std::vector<AuditEntry>& audit() const { return audit_; }

  /// Latest version when `version` is empty; nullptr when absent.
  const AssessmentRecord* find(const std::string& assessment_id,
                               std::optional<int> version = std::nullopt) const;
  int version_count(const std::string& assessment_id) const;

  /// Appends a new version (1-based number returned). A version dated before
  /// its predecessor is a conflict.
  int add_assessment(AssessmentRecord record);
  const delphi::RoundSummary& run_round(int round, std::vector<delphi::ExpertSubmission> submissions);
  /// Drops cached results computed with `table_id`.
  void weights_changed(const std::string& table_id);

  /// Cached run of one assessment version through `pipeline`.
  PipelineResult pipeline_result(const Pipeline& pipeline, const std::string& assessment_id,
                                 std::optional<int> version, ChainMode mode) const;
  std::size_t cached_results() const { return cache_.size(); }

  void set_clock(Clock clock) { clock_ = std::move(clock); }

  /// Compares persisted state only.
  bool operator==(const StudyDocument& other) const;

 private:
  friend StudyDocument study_from_json(const Json& doc, Clock clock);
  void log(std::string action, std::string target, std::string detail);

  std::string id_;
  std::string framework_id_;
  std::string weight_table_;
  delphi::DelphiStudy delphi_;
  std::map<std::string, std::vector<AssessmentRecord>> assessments_;
  std::vector<AuditEntry> audit_;
  Clock clock_;
  mutable ResultCache cache_;
};

Json to_json(const StudyDocument& study);
StudyDocument study_from_json(const Json& doc, Clock clock = system_now);

/// Canonical bytes: sorted keys, fixed decimal strings for weights.
std::string save(const StudyDocument& study);
StudyDocument load(std::string_view text, Clock clock = system_now);

/// Ids that become file names: letters, digits, '-', '_', '.', not leading '.'.
bool valid_id(std::string_view id);

// --- service workspace -------------------------------------------------------

struct Config {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string data_dir;  // empty keeps everything in memory
  double consensus_threshold = delphi::kDefaultConsensusThreshold;
  std::string api_token;  // empty disables the bearer check

  /// Reads an optional JSON config file, then applies PORT, DATA_DIR,
  /// CONSENSUS_THRESHOLD and TEMAI_API_TOKEN from the environment.
  static Config load(const std::string& path = {});
};

/// Shared service state: the framework/weight catalog and all studies.
/// Reads of one study run concurrently; writes to one study are serialized.
class Workspace {
 public:
  static constexpr const char* kDefaultStudy = "default";

  explicit Workspace(Config config, Clock clock = system_now);

  const Config& config() const { return config_; }
  Timestamp now() const { return clock_(); }

  std::vector<std::string> framework_ids() const;
  FrameworkDefinition framework(const std::string& id) const;
  std::vector<WeightTable> weight_tables() const;
  WeightTable weight_table(const std::string& id) const;
  /// Adds or replaces a table after validating it against the framework, and
  /// invalidates every cached result computed with it.
  void put_weight_table(WeightTable table);
  Pipeline pipeline(const std::string& table_id, WeightMode weight_mode) const;

  std::vector<std::string> study_ids() const;
  /// Study holding an assessment id, if any.
  std::optional<std::string> study_of(const std::string& assessment_id) const;

  /// Runs `fn` under the study's shared lock. not_found when absent.
  template <class Fn>
  auto read(const std::string& study_id, Fn&& fn) const {
    auto slot = find_slot(study_id);
    std::shared_lock lock(slot->mu);
    return fn(static_cast<const StudyDocument&>(slot->doc));
  }

  /// Runs `fn` under the study's exclusive lock (creating the study when
  /// asked), then persists it.
  template <class Fn>
  auto write(const std::string& study_id, bool create, Fn&& fn) {
    auto slot = create ? find_or_create_slot(study_id) : find_slot(study_id);
    std::unique_lock lock(slot->mu);
    if constexpr (std::is_void_v<decltype(fn(slot->doc))>) {
      fn(slot->doc);
      after_write(slot->doc);
    } else {
      auto out = fn(slot->doc);
      after_write(slot->doc);
      return out;
    }
  }

 private:
  struct Slot {
    explicit Slot(StudyDocument d) : doc(std::move(d)) {}
    mutable std::shared_mutex mu;
    StudyDocument doc;
  };

  std::shared_ptr<Slot> find_slot(const std::string& study_id) const;
  std::shared_ptr<Slot> find_or_create_slot(const std::string& study_id);
  void after_write(const StudyDocument& doc);
  void load_data_dir();

  Config config_;
  Clock clock_;
  mutable std::shared_mutex catalog_mu_;
  std::map<std::string, FrameworkDefinition> frameworks_;
  std::map<std::string, WeightTable> tables_;
  mutable std::shared_mutex studies_mu_;
  std::map<std::string, std::shared_ptr<Slot>> studies_;
  std::map<std::string, std::string> assessment_index_;
};

}  // namespace temai::store
