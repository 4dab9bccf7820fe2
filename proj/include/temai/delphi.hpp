#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace temai::delphi {

inline constexpr double kDefaultConsensusThreshold = 0.7;
inline constexpr int kDefaultStabilityBound = 1;
inline constexpr int kDefaultRoundCeiling = 3;

/// Item → rank (1 = best). Tied items carry their mid-rank.
using Rankings = std::map<std::string, double>;
/// Item → level 1..5.
using Ratings = std::map<std::string, int>;

struct ExpertSubmission {
  std::string expert_id;
  int round = 1;
  std::variant<Rankings, Ratings> values;

  bool operator==(const ExpertSubmission&) const = default;
};

/// Fractional (mid-rank) ranking of values sorted descending: highest value
/// gets rank 1, ties share the mean of the positions they occupy.
Rankings rank_descending(const std::map<std::string, double>& values);

/// Rankings of a submission, validating that explicit rankings are a proper
/// (possibly tied) ranking of 1..n.
Rankings to_rankings(const ExpertSubmission& submission);

struct ConcordanceResult {
  double w = 0.0;
  int n_items = 0;
  int n_experts = 0;
  bool tie_corrected = false;
  bool consensus_reached = false;
  double threshold = kDefaultConsensusThreshold;

  bool operator==(const ConcordanceResult&) const = default;
};

/// consensus ⇔ w ≥ threshold
bool consensus(double w, double threshold) noexcept;

/// Kendall's coefficient of concordance with tie correction:
/// W = 12 S / (m² (n³ − n) − m Σ(t³ − t)).
ConcordanceResult kendalls_w(std::span<const ExpertSubmission> submissions,
                             double threshold = kDefaultConsensusThreshold);

struct RankedItem {
  std::string item;
  double mean_rank = 0.0;
  int position = 0;  // 1-based

  bool operator==(const RankedItem&) const = default;
};

struct RoundSummary {
  std::string study_id;
  int round = 0;
  ConcordanceResult concordance;
  std::vector<RankedItem> ranking;  // ascending mean rank, ties by item id
  std::vector<std::string> warnings;
  std::vector<ExpertSubmission> submissions;

  bool further_round_required() const { return !concordance.consensus_reached; }
  std::string_view status() const {
    return further_round_required() ? "further round required" : "consensus reached";
  }
  bool operator==(const RoundSummary&) const = default;
};

struct RoundStability {
  int round_a = 0;
  int round_b = 0;
  double mean_rank_shift = 0.0;
  int max_rank_shift = 0;
  bool stable = true;
  int bound = kDefaultStabilityBound;

  bool operator==(const RoundStability&) const = default;
};

/// Compares the aggregate positions of two rounds over the same items.
RoundStability stability(const RoundSummary& a, const RoundSummary& b,
                         int bound = kDefaultStabilityBound);

struct StudySettings {
  double consensus_threshold = kDefaultConsensusThreshold;
  int stability_bound = kDefaultStabilityBound;
  int round_ceiling = kDefaultRoundCeiling;
  /// Which expert panel the study models, e.g. "framework-10" or "metrics-18".
  std::string panel;

  bool operator==(const StudySettings&) const = default;
};

/// Pure round evaluation; `round` must match every submission.
RoundSummary summarize_round(std::string study_id, int round,
                             std::vector<ExpertSubmission> submissions,
                             const StudySettings& settings = {});

/// Sequence of rounds for one study. Not internally synchronized; callers
/// serialize writers per study.
class DelphiStudy {
 public:
  explicit DelphiStudy(std::string study_id, StudySettings settings = {});

  const std::string& id() const { return id_; }
  const StudySettings& settings() const { return settings_; }
  const std::vector<RoundSummary>& rounds() const { return rounds_; }

  /// Appends round (rounds().size() + 1). Rejects duplicate experts, rounds
  /// out of sequence, and submissions labelled with another round.
  const RoundSummary& run_round(int round, std::vector<ExpertSubmission> submissions);

  bool consensus_reached() const;
  /// Stability between the last two rounds, if there are two.
  std::optional<RoundStability> latest_stability() const;

  bool operator==(const DelphiStudy&) const = default;

 private:
  std::string id_;
  StudySettings settings_;
  std::vector<RoundSummary> rounds_;
};

enum class SubmissionKind { rankings, ratings };

/// CSV with header expert_id,item_id,value; one line per expert × item.
std::vector<ExpertSubmission> submissions_from_csv(std::string_view text, SubmissionKind kind,
                                                   int round);

}  // namespace temai::delphi
