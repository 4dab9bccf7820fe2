#include "temai/delphi.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "temai/csv.hpp"
#include "temai/error.hpp"

namespace temai::delphi {

namespace {

std::vector<std::string> item_set(const Rankings& r) {
  std::vector<std::string> items;
  for (const auto& [item, rank] : r) items.push_back(item);
  return items;
}

// Σ(t³ − t) over groups of equal ranks.
double tie_sum(const Rankings& r) {
  std::map<double, int> groups;
  for (const auto& [item, rank] : r) ++groups[rank];
  double total = 0.0;
  for (const auto& [rank, t] : groups) {
    if (t > 1) total += static_cast<double>(t) * t * t - t;
  }
  return total;
}

}  // namespace

Rankings rank_descending(const std::map<std::string, double>& values) {
  std::vector<std::pair<double, std::string>> order;
  for (const auto& [item, v] : values) order.emplace_back(v, item);
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  Rankings out;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && order[j].first == order[i].first) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) out[order[k].second] = mid;
    i = j;
  }
  return out;
}

Rankings to_rankings(const ExpertSubmission& submission) {
  if (const auto* ratings = std::get_if<Ratings>(&submission.values)) {
    std::map<std::string, double> values;
    for (const auto& [item, level] : *ratings) {
      if (level < 1 || level > 5) {
        throw Error(ErrorCode::validation,
                    fmt::format("expert '{}' rated '{}' at level {}, outside 1..5",
                                submission.expert_id, item, level),
                    fmt::format("submissions.{}.ratings.{}", submission.expert_id, item));
      }
      values[item] = level;
    }
    return rank_descending(values);
  }
  const auto& rankings = std::get<Rankings>(submission.values);
  // A valid (possibly tied) ranking equals its own re-ranking ascending.
  std::map<std::string, double> negated;
  for (const auto& [item, rank] : rankings) negated[item] = -rank;
  if (rank_descending(negated) != rankings) {
    throw Error(ErrorCode::validation,
                fmt::format("expert '{}' did not submit a ranking of 1..{}", submission.expert_id,
                            rankings.size()),
                fmt::format("submissions.{}.rankings", submission.expert_id));
  }
  return rankings;
}

bool consensus(double w, double threshold) noexcept { return w >= threshold; }

ConcordanceResult kendalls_w(std::span<const ExpertSubmission> submissions, double threshold) {
  if (submissions.size() < 2) {
    throw Error(ErrorCode::validation, "Kendall's W needs at least two experts", "submissions");
  }
  std::vector<Rankings> ranks;
  for (const auto& s : submissions) ranks.push_back(to_rankings(s));

  const auto items = item_set(ranks.front());
  for (std::size_t k = 1; k < ranks.size(); ++k) {
    if (item_set(ranks[k]) != items) {
      throw Error(ErrorCode::validation,
                  fmt::format("expert '{}' ranked a different item set than expert '{}'",
                              submissions[k].expert_id, submissions.front().expert_id),
                  fmt::format("submissions[{}]", k));
    }
  }
  if (items.size() < 2) {
    throw Error(ErrorCode::validation, "Kendall's W is degenerate with fewer than two items",
                "submissions");
  }

  const double m = static_cast<double>(ranks.size());
  const double n = static_cast<double>(items.size());
  std::map<std::string, double> rank_sum;
  double ties = 0.0;
  for (const auto& r : ranks) {
    for (const auto& [item, rank] : r) rank_sum[item] += rank;
    ties += tie_sum(r);
  }
  const double mean = m * (n + 1.0) / 2.0;
  double s = 0.0;
  for (const auto& [item, total] : rank_sum) s += (total - mean) * (total - mean);

  ConcordanceResult result;
  result.n_items = static_cast<int>(items.size());
  result.n_experts = static_cast<int>(ranks.size());
  result.tie_corrected = ties > 0.0;
  const double denom = m * m * (n * n * n - n) - m * ties;
  // Every expert tying every item leaves nothing to agree on.
  result.w = denom > 0.0 ? std::clamp(12.0 * s / denom, 0.0, 1.0) : 0.0;
  result.threshold = threshold;
  result.consensus_reached = consensus(result.w, threshold);
  return result;
}

RoundStability stability(const RoundSummary& a, const RoundSummary& b, int bound) {
  std::map<std::string, int> pos_a, pos_b;
  for (const auto& r : a.ranking) pos_a[r.item] = r.position;
  for (const auto& r : b.ranking) pos_b[r.item] = r.position;
  std::set<std::string> keys_a, keys_b;
  for (const auto& [k, v] : pos_a) keys_a.insert(k);
  for (const auto& [k, v] : pos_b) keys_b.insert(k);
  if (keys_a != keys_b || keys_a.empty()) {
    throw Error(ErrorCode::validation,
                fmt::format("rounds {} and {} rank different item sets", a.round, b.round), "rounds");
  }
  RoundStability out;
  out.round_a = a.round;
  out.round_b = b.round;
  out.bound = bound;
  double total = 0.0;
  for (const auto& [item, p] : pos_a) {
    const int shift = std::abs(p - pos_b[item]);
    total += shift;
    out.max_rank_shift = std::max(out.max_rank_shift, shift);
  }
  out.mean_rank_shift = total / static_cast<double>(pos_a.size());
  out.stable = out.max_rank_shift <= bound;
  return out;
}

RoundSummary summarize_round(std::string study_id, int round,
                             std::vector<ExpertSubmission> submissions,
                             const StudySettings& settings) {
  std::set<std::string> experts;
  for (std::size_t i = 0; i < submissions.size(); ++i) {
    const auto& s = submissions[i];
    if (s.round != round) {
      throw Error(ErrorCode::validation,
                  fmt::format("submission from expert '{}' belongs to round {}, not round {}",
                              s.expert_id, s.round, round),
                  fmt::format("submissions[{}].round", i));
    }
    if (!experts.insert(s.expert_id).second) {
      throw Error(ErrorCode::validation,
                  fmt::format("expert '{}' submitted more than once in round {}", s.expert_id, round),
                  fmt::format("submissions[{}].expert_id", i));
    }
  }

  RoundSummary summary;
  summary.study_id = std::move(study_id);
  summary.round = round;
  summary.concordance = kendalls_w(submissions, settings.consensus_threshold);

  std::map<std::string, double> rank_sum;
  for (const auto& s : submissions) {
    for (const auto& [item, rank] : to_rankings(s)) rank_sum[item] += rank;
  }
  for (const auto& [item, total] : rank_sum) {
    summary.ranking.push_back({item, total / static_cast<double>(submissions.size()), 0});
  }
  std::stable_sort(summary.ranking.begin(), summary.ranking.end(),
                   [](const RankedItem& a, const RankedItem& b) {
                     if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
                     return a.item < b.item;
                   });
  for (std::size_t i = 0; i < summary.ranking.size(); ++i) {
    summary.ranking[i].position = static_cast<int>(i + 1);
  }
  if (round > settings.round_ceiling) {
    summary.warnings.push_back(fmt::format(
        "round {} exceeds the planned ceiling of {} rounds", round, settings.round_ceiling));
  }
  summary.submissions = std::move(submissions);
  return summary;
}

DelphiStudy::DelphiStudy(std::string study_id, StudySettings settings)
    : id_(std::move(study_id)), settings_(std::move(settings)) {
  if (!(settings_.consensus_threshold > 0.0 && settings_.consensus_threshold <= 1.0)) {
    throw Error(ErrorCode::validation, "consensus threshold must lie in (0, 1]", "consensus_threshold");
  }
  if (settings_.stability_bound < 0) {
    throw Error(ErrorCode::validation, "stability bound must be non-negative", "stability_bound");
  }
}

const RoundSummary& DelphiStudy::run_round(int round, std::vector<ExpertSubmission> submissions) {
  const int expected = static_cast<int>(rounds_.size()) + 1;
  if (round != expected) {
    throw Error(ErrorCode::conflict,
                fmt::format("study '{}' expects round {}, got round {}", id_, expected, round), "round");
  }
  if (!rounds_.empty()) {
    // Validate comparability before accepting the round.
    RoundSummary candidate = summarize_round(id_, round, std::move(submissions), settings_);
    stability(rounds_.back(), candidate, settings_.stability_bound);
    rounds_.push_back(std::move(candidate));
  } else {
    rounds_.push_back(summarize_round(id_, round, std::move(submissions), settings_));
  }
  return rounds_.back();
}

bool DelphiStudy::consensus_reached() const {
  return !rounds_.empty() && rounds_.back().concordance.consensus_reached;
}

std::optional<RoundStability> DelphiStudy::latest_stability() const {
  if (rounds_.size() < 2) return std::nullopt;
  return stability(rounds_[rounds_.size() - 2], rounds_.back(), settings_.stability_bound);
}

std::vector<ExpertSubmission> submissions_from_csv(std::string_view text, SubmissionKind kind,
                                                   int round) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorCode::parse, "submission CSV is empty");
  const csv::Row expected_header = {"expert_id", "item_id", "value"};
  if (rows.front() != expected_header) {
    throw Error(ErrorCode::parse, "submission CSV header must be expert_id,item_id,value");
  }
  std::vector<std::string> order;
  std::map<std::string, ExpertSubmission> by_expert;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) {
      throw Error(ErrorCode::parse, fmt::format("submission CSV line {} has {} fields", r + 1, row.size()));
    }
    auto [it, inserted] = by_expert.try_emplace(row[0]);
    if (inserted) {
      order.push_back(row[0]);
      it->second.expert_id = row[0];
      it->second.round = round;
      if (kind == SubmissionKind::ratings) it->second.values = Ratings{};
    }
    const double value = csv::parse_number(row[2]);
    const auto dup = [&] {
      return Error(ErrorCode::validation,
                   fmt::format("expert '{}' lists item '{}' twice", row[0], row[1]));
    };
    if (kind == SubmissionKind::ratings) {
      if (value != std::floor(value)) {
        throw Error(ErrorCode::validation,
                    fmt::format("rating '{}' on CSV line {} is not an integer level", row[2], r + 1));
      }
      if (!std::get<Ratings>(it->second.values).emplace(row[1], static_cast<int>(value)).second) throw dup();
    } else {
      if (!std::get<Rankings>(it->second.values).emplace(row[1], value).second) throw dup();
    }
  }
  std::vector<ExpertSubmission> out;
  for (const auto& id : order) out.push_back(std::move(by_expert[id]));
  return out;
}

}  // namespace temai::delphi
