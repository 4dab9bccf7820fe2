#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "temai/delphi.hpp"
#include "temai/error.hpp"

using namespace temai;
using namespace temai::delphi;

namespace {

std::vector<ExpertSubmission> panel(const std::vector<std::vector<double>>& ranks, int round = 1) {
  std::vector<ExpertSubmission> out;
  for (std::size_t e = 0; e < ranks.size(); ++e) {
    Rankings r;
    for (std::size_t i = 0; i < ranks[e].size(); ++i) r["item" + std::to_string(i)] = ranks[e][i];
    out.push_back({"E" + std::to_string(e + 1), round, r});
  }
  return out;
}

std::vector<ExpertSubmission> rating_panel(const std::vector<std::vector<int>>& levels, int round = 1) {
  std::vector<ExpertSubmission> out;
  for (std::size_t e = 0; e < levels.size(); ++e) {
    Ratings r;
    for (std::size_t i = 0; i < levels[e].size(); ++i) r["item" + std::to_string(i)] = levels[e][i];
    out.push_back({"E" + std::to_string(e + 1), round, r});
  }
  return out;
}

// Direct formula over a rank matrix, ties corrected.
double w_formula(const std::vector<std::vector<double>>& ranks) {
  const double m = static_cast<double>(ranks.size());
  const std::size_t items = ranks.front().size();
  const double n = static_cast<double>(items);
  std::vector<double> totals(items, 0.0);
  double t = 0.0;
  for (const auto& row : ranks) {
    for (std::size_t i = 0; i < items; ++i) totals[i] += row[i];
    std::map<double, int> groups;
    for (double r : row) ++groups[r];
    for (const auto& [r, g] : groups) t += static_cast<double>(g) * g * g - g;
  }
  const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
  double s = 0.0;
  for (double x : totals) s += (x - mean) * (x - mean);
  return 12.0 * s / (m * m * (n * n * n - n) - m * t);
}

// For untied rankings W = ((m − 1) · mean pairwise Spearman ρ + 1) / m.
double w_spearman(const std::vector<std::vector<double>>& ranks) {
  const std::size_t m = ranks.size();
  const double n = static_cast<double>(ranks.front().size());
  double total = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < ranks[a].size(); ++i) d2 += (ranks[a][i] - ranks[b][i]) * (ranks[a][i] - ranks[b][i]);
      total += 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
      ++pairs;
    }
  }
  const double md = static_cast<double>(m);
  return ((md - 1.0) * (total / pairs) + 1.0) / md;
}

std::vector<double> mid_ranks(const std::vector<int>& levels) {
  std::vector<double> out(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    int higher = 0, equal = 0;
    for (int l : levels) {
      higher += l > levels[i];
      equal += l == levels[i];
    }
    out[i] = higher + (equal + 1) / 2.0;
  }
  return out;
}

std::vector<std::vector<double>> random_permutations(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  std::vector<std::vector<double>> out(m, std::vector<double>(n));
  for (auto& row : out) {
    std::iota(row.begin(), row.end(), 1.0);
    std::shuffle(row.begin(), row.end(), rng);
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::validation;
}

const std::vector<std::vector<double>> kPanel069 = {
    {2, 1, 4, 3, 5}, {2, 1, 3, 5, 4}, {3, 1, 4, 2, 5}, {1, 2, 4, 5, 3}, {1, 2, 3, 4, 5},
    {3, 1, 2, 4, 5}, {2, 1, 3, 4, 5}, {2, 3, 1, 4, 5}, {2, 1, 4, 3, 5}, {3, 1, 2, 4, 5}};
const std::vector<std::vector<double>> kPanel082 = {
    {4, 3, 5, 1, 2}, {4, 3, 5, 2, 1}, {4, 2, 5, 3, 1}, {4, 1, 5, 3, 2}, {4, 3, 5, 1, 2},
    {4, 3, 5, 1, 2}, {5, 1, 4, 3, 2}, {4, 3, 5, 2, 1}, {4, 2, 5, 3, 1}, {4, 2, 5, 3, 1}};

}  // namespace

TEST_CASE("boundary panels") {
  SUBCASE("identical rankings") {
    const auto r = kendalls_w(panel({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}}));
    CHECK(r.w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.consensus_reached);
    CHECK_FALSE(r.tie_corrected);
  }
  SUBCASE("two-expert reversal") {
    const auto r = kendalls_w(panel({{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}}));
    CHECK(std::abs(r.w) < 1e-12);
    CHECK_FALSE(r.consensus_reached);
  }
  SUBCASE("three experts, one swap each") {
    const auto r = kendalls_w(panel({{1, 2, 3, 4}, {1, 2, 4, 3}, {2, 1, 3, 4}}));
    CHECK(r.w == doctest::Approx(444.0 / 540.0).epsilon(1e-12));
    CHECK(r.n_experts == 3);
    CHECK(r.n_items == 4);
  }
}

TEST_CASE("gating at the 0.7 threshold") {
  const auto low = kendalls_w(panel(kPanel069));
  CHECK(low.w == doctest::Approx(0.69).epsilon(1e-12));
  CHECK_FALSE(low.consensus_reached);
  const auto high = kendalls_w(panel(kPanel082));
  CHECK(high.w == doctest::Approx(0.82).epsilon(1e-12));
  CHECK(high.consensus_reached);
  CHECK(consensus(0.7, 0.7));
  CHECK_FALSE(consensus(std::nextafter(0.7, 0.0), 0.7));
  CHECK(kendalls_w(panel(kPanel069), 0.6).consensus_reached);
}

TEST_CASE("ratings become mid-ranks") {
  const ExpertSubmission s{"E1", 1, Ratings{{"a", 5}, {"b", 3}, {"c", 3}, {"d", 1}}};
  const auto r = to_rankings(s);
  CHECK(r.at("a") == 1.0);
  CHECK(r.at("b") == 2.5);
  CHECK(r.at("c") == 2.5);
  CHECK(r.at("d") == 4.0);

  const auto tied = kendalls_w(rating_panel({{5, 3, 3, 1}, {4, 4, 2, 1}, {5, 4, 3, 3}}));
  CHECK(tied.tie_corrected);
  CHECK(tied.w == doctest::Approx(w_formula({{1, 2.5, 2.5, 4}, {1.5, 1.5, 3, 4}, {1, 2, 3.5, 3.5}})).epsilon(1e-12));

  CHECK(code_of([] { (void)to_rankings({"E1", 1, Ratings{{"a", 6}}}); }) == ErrorCode::validation);
}

TEST_CASE("all-tied panels carry no agreement") {
  const auto r = kendalls_w(rating_panel({{3, 3, 3}, {2, 2, 2}}));
  CHECK(r.w == 0.0);
  CHECK(r.tie_corrected);
}

TEST_CASE("explicit rankings must be proper") {
  CHECK_NOTHROW((void)to_rankings({"E", 1, Rankings{{"a", 1.5}, {"b", 1.5}, {"c", 3}}}));
  CHECK(code_of([] { (void)to_rankings({"E", 1, Rankings{{"a", 1}, {"b", 1}, {"c", 3}}}); }) ==
        ErrorCode::validation);
  CHECK(code_of([] { (void)to_rankings({"E", 1, Rankings{{"a", 1}, {"b", 2}, {"c", 4}}}); }) ==
        ErrorCode::validation);
}

TEST_CASE("degenerate inputs") {
  CHECK(code_of([] { (void)kendalls_w(panel({{1, 2, 3}})); }) == ErrorCode::validation);
  CHECK(code_of([] { (void)kendalls_w(panel({{1}, {1}})); }) == ErrorCode::validation);
  auto mismatched = panel({{1, 2}, {1, 2}});
  std::get<Rankings>(mismatched[1].values) = Rankings{{"item0", 1}, {"other", 2}};
  try {
    (void)kendalls_w(mismatched);
    FAIL("mismatched item sets accepted");
  } catch (const Error& e) {
    CHECK(e.field_path() == "submissions[1]");
  }
}

TEST_CASE("agreement with the Spearman identity on untied panels") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + trial % 12;
    const std::size_t n = 2 + (trial / 12) % 10;
    const auto ranks = random_permutations(rng, m, n);
    const double w = kendalls_w(panel(ranks)).w;
    CHECK(std::abs(w - w_spearman(ranks)) < 1e-9);
    CHECK(std::abs(w - w_formula(ranks)) < 1e-9);
  }
}

TEST_CASE("agreement with the direct formula on tied rating panels") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> level(1, 5);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + trial % 9, n = 3 + trial % 7;
    std::vector<std::vector<int>> levels(m, std::vector<int>(n));
    for (auto& row : levels)
      for (auto& l : row) l = level(rng);
    std::vector<std::vector<double>> ranks;
    for (const auto& row : levels) ranks.push_back(mid_ranks(row));
    bool all_tied = true;
    for (const auto& row : levels) all_tied &= std::adjacent_find(row.begin(), row.end(), std::not_equal_to<>()) == row.end();
    if (all_tied) continue;
    const auto r = kendalls_w(rating_panel(levels));
    CHECK(std::abs(r.w - w_formula(ranks)) < 1e-9);
    CHECK(r.w >= 0.0);
    CHECK(r.w <= 1.0);
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("invariance under expert order and item relabelling") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto ranks = random_permutations(rng, 6, 5);
    const double w = kendalls_w(panel(ranks)).w;
    std::shuffle(ranks.begin(), ranks.end(), rng);
    CHECK(std::abs(kendalls_w(panel(ranks)).w - w) < 1e-12);
    // Applying one column permutation to every expert relabels items.
    std::vector<std::size_t> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabelled = ranks;
    for (std::size_t e = 0; e < ranks.size(); ++e)
      for (std::size_t i = 0; i < 5; ++i) relabelled[e][i] = ranks[e][perm[i]];
    CHECK(std::abs(kendalls_w(panel(relabelled)).w - w) < 1e-12);
  }
}

TEST_CASE("round summaries") {
  const auto s = summarize_round("study", 1, panel(kPanel069));
  REQUIRE(s.ranking.size() == 5);
  CHECK(s.ranking[0].item == "item1");
  CHECK(s.ranking[0].mean_rank == doctest::Approx(1.4));
  CHECK(s.ranking[4].item == "item4");
  CHECK(s.ranking[4].position == 5);
  CHECK(s.further_round_required());
  CHECK(s.status() == "further round required");
  CHECK(s.warnings.empty());

  auto dup = panel({{1, 2}, {2, 1}});
  dup[1].expert_id = dup[0].expert_id;
  try {
    (void)summarize_round("study", 1, dup);
    FAIL("duplicate expert accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("E1") != std::string::npos);
    CHECK(e.field_path() == "submissions[1].expert_id");
  }
  try {
    (void)summarize_round("study", 2, panel({{1, 2}, {2, 1}}, 1));
    FAIL("round label mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.field_path() == "submissions[0].round");
  }
}

TEST_CASE("studies run rounds in sequence") {
  DelphiStudy study("s1");
  CHECK_FALSE(study.consensus_reached());
  CHECK(code_of([&] { (void)study.run_round(2, panel(kPanel069, 2)); }) == ErrorCode::conflict);
  study.run_round(1, panel(kPanel069, 1));
  CHECK_FALSE(study.consensus_reached());
  CHECK_FALSE(study.latest_stability().has_value());

  // Same panel again: positions unchanged.
  study.run_round(2, panel(kPanel069, 2));
  auto st = study.latest_stability();
  REQUIRE(st.has_value());
  CHECK(st->max_rank_shift == 0);
  CHECK(st->stable);

  study.run_round(3, panel(kPanel082, 3));
  st = study.latest_stability();
  CHECK(st->max_rank_shift == 4);
  CHECK_FALSE(st->stable);
  CHECK(study.consensus_reached());

  // A fourth round is allowed but flagged.
  const auto& fourth = study.run_round(4, panel(kPanel082, 4));
  REQUIRE(fourth.warnings.size() == 1);
  CHECK(fourth.warnings[0].find("ceiling of 3") != std::string::npos);

  // Rounds over a different item set are rejected and not recorded.
  CHECK(code_of([&] { (void)study.run_round(5, panel({{1, 2}, {2, 1}}, 5)); }) == ErrorCode::validation);
  CHECK(study.rounds().size() == 4);
}

TEST_CASE("stability within one position") {
  RoundSummary a, b;
  a.round = 1;
  b.round = 2;
  a.ranking = {{"x", 1, 1}, {"y", 2, 2}, {"z", 3, 3}};
  b.ranking = {{"y", 1, 1}, {"x", 2, 2}, {"z", 3, 3}};
  const auto s = stability(a, b);
  CHECK(s.max_rank_shift == 1);
  CHECK(s.mean_rank_shift == doctest::Approx(2.0 / 3.0));
  CHECK(s.stable);
  CHECK_FALSE(stability(a, b, 0).stable);
}

TEST_CASE("study settings are validated") {
  StudySettings bad;
  bad.consensus_threshold = 0.0;
  CHECK_THROWS_AS(DelphiStudy("s", bad), Error);
  bad.consensus_threshold = 0.7;
  bad.stability_bound = -1;
  CHECK_THROWS_AS(DelphiStudy("s", bad), Error);
}

TEST_CASE("submission csv") {
  const auto subs = submissions_from_csv(
      "expert_id,item_id,value\nA,x,5\nA,y,3\nB,x,4\nB,y,4\n", SubmissionKind::ratings, 2);
  REQUIRE(subs.size() == 2);
  CHECK(subs[0].expert_id == "A");
  CHECK(subs[1].round == 2);
  CHECK(std::get<Ratings>(subs[1].values).at("y") == 4);

  const auto ranked = submissions_from_csv("expert_id,item_id,value\nA,x,1\nA,y,2\n", SubmissionKind::rankings, 1);
  CHECK(std::get<Rankings>(ranked[0].values).at("y") == 2.0);

  CHECK(code_of([] { (void)submissions_from_csv("who,what\n", SubmissionKind::ratings, 1); }) == ErrorCode::parse);
  CHECK(code_of([] {
          (void)submissions_from_csv("expert_id,item_id,value\nA,x,2.5\n", SubmissionKind::ratings, 1);
        }) == ErrorCode::validation);
  CHECK(code_of([] {
          (void)submissions_from_csv("expert_id,item_id,value\nA,x,2\nA,x,3\n", SubmissionKind::ratings, 1);
        }) == ErrorCode::validation);
}
