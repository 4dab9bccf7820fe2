#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "support.hpp"
#include "temai/canonical.hpp"
#include "temai/error.hpp"
#include "temai/store.hpp"

using namespace temai;
using namespace temai::store;
namespace fs = std::filesystem;

namespace {

// Deterministic clock advancing one minute per call.
Clock ticking(std::string start = "2025-03-01T09:00:00Z") {
  auto t = std::make_shared<Timestamp>(parse_timestamp(start));
  return [t] {
    const auto now = *t;
    *t += std::chrono::minutes(1);
    return now;
  };
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("temai-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct EnvGuard {
  std::string name;
  explicit EnvGuard(std::string n, const char* value) : name(std::move(n)) { ::setenv(name.c_str(), value, 1); }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

std::vector<delphi::ExpertSubmission> small_round(int round) {
  return {{"A", round, delphi::Rankings{{"x", 1}, {"y", 2}, {"z", 3}}},
          {"B", round, delphi::Rankings{{"x", 1}, {"y", 3}, {"z", 2}}},
          {"C", round, delphi::Rankings{{"x", 2}, {"y", 1}, {"z", 3}}}};
}

StudyDocument populated(Clock clock = ticking()) {
  StudyDocument doc("s1", canonical::kFrameworkId, canonical::kStoreTable, {}, std::move(clock));
  doc.add_assessment(canonical::retail_assessment());
  auto levels = oracle::kRetailLevels;
  levels[9] = 4;
  doc.add_assessment(testutil::make_assessment("retail", "store", levels, "2025-06-01T00:00:00Z"));
  doc.add_assessment(canonical::pv_assessment());
  doc.run_round(1, small_round(1));
  return doc;
}

}  // namespace

TEST_CASE("identifier rules") {
  CHECK(valid_id("retail-2025_q1.v2"));
  CHECK_FALSE(valid_id(""));
  CHECK_FALSE(valid_id(".hidden"));
  CHECK_FALSE(valid_id("../escape"));
  CHECK_FALSE(valid_id("a/b"));
  CHECK_FALSE(valid_id("has space"));
  CHECK_FALSE(valid_id(std::string(129, 'a')));
  CHECK(valid_id(std::string(128, 'a')));
}

TEST_CASE("versions are appended and looked up") {
  const auto doc = populated();
  CHECK(doc.version_count("retail") == 2);
  CHECK(doc.version_count("pv") == 1);
  CHECK(doc.version_count("missing") == 0);
  CHECK(doc.find("retail")->level("scene_transfer_difficulty") == 4);
  CHECK(doc.find("retail", 1)->level("scene_transfer_difficulty") == 2);
  CHECK(doc.find("retail", 3) == nullptr);
  CHECK(doc.find("retail", 0) == nullptr);
  CHECK(doc.find("missing") == nullptr);
}

TEST_CASE("versions may not go back in time") {
  auto doc = populated();
  try {
    doc.add_assessment(testutil::make_assessment("retail", "store", oracle::kRetailLevels, "2024-01-01T00:00:00Z"));
    FAIL("backdated version accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflict);
  }
  CHECK(doc.version_count("retail") == 2);
  CHECK_THROWS_AS(doc.add_assessment(testutil::make_assessment("bad id", "store", oracle::kRetailLevels)), Error);
}

TEST_CASE("audit log only grows") {
  auto doc = populated();
  const auto before = doc.audit();
  REQUIRE(before.size() == 5);
  CHECK(before[0].action == "study.create");
  CHECK(before[1].action == "assessment.version");
  CHECK(before[1].target == "retail");
  CHECK(before[4].action == "delphi.round");
  for (std::size_t i = 1; i < before.size(); ++i) CHECK(before[i - 1].at < before[i].at);

  doc.weights_changed("store");
  doc.run_round(2, small_round(2));
  const auto& after = doc.audit();
  REQUIRE(after.size() == 7);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] == before[i]);
  CHECK(after[5].action == "weights.change");

  // Failed operations leave no trace.
  CHECK_THROWS(doc.run_round(5, small_round(5)));
  CHECK(doc.audit().size() == 7);
}

TEST_CASE("round trip through canonical json") {
  const auto doc = populated();
  const auto text = save(doc);
  const auto back = load(text, ticking());
  CHECK(back == doc);
  CHECK(save(back) == text);
  CHECK(save(doc) == text);
  CHECK(back.audit() == doc.audit());
  CHECK(back.delphi().rounds().size() == 1);
  CHECK(back.delphi().rounds()[0].concordance.w == doctest::Approx(doc.delphi().rounds()[0].concordance.w));
  CHECK(text.find("\"temai_schema\"") != std::string::npos);
}

TEST_CASE("unsupported schema versions are refused") {
  auto j = to_json(populated());
  j["temai_schema"] = 99;
  try {
    (void)study_from_json(j);
    FAIL("schema 99 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema_version);
  }
  j["temai_schema"] = 1;
  j["kind"] = "assessment";
  CHECK_THROWS_AS(study_from_json(j), Error);
  CHECK_THROWS_AS(load("{not json"), Error);
}

TEST_CASE("pipeline results are cached per version and table") {
  auto doc = populated();
  const Pipeline store(canonical::framework(), canonical::store_weights());
  const auto first = doc.pipeline_result(store, "retail", 1, ChainMode::reported);
  CHECK(first.scores.final_value == doctest::Approx(10.61).epsilon(0.003));
  CHECK(doc.cached_results() == 1);
  CHECK(doc.pipeline_result(store, "retail", 1, ChainMode::reported) == first);
  CHECK(doc.cached_results() == 1);
  (void)doc.pipeline_result(store, "retail", std::nullopt, ChainMode::reported);
  (void)doc.pipeline_result(store, "retail", 1, ChainMode::appendix);
  (void)doc.pipeline_result(store, "pv", std::nullopt, ChainMode::reported);
  CHECK(doc.cached_results() == 4);

  // A new version drops only that assessment's entries.
  doc.add_assessment(testutil::make_assessment("retail", "store", oracle::kRetailLevels, "2025-09-01T00:00:00Z"));
  CHECK(doc.cached_results() == 1);

  // A weight change drops entries computed with that table.
  (void)doc.pipeline_result(store, "retail", 3, ChainMode::reported);
  CHECK(doc.cached_results() == 2);
  doc.weights_changed("pv");
  CHECK(doc.cached_results() == 2);
  doc.weights_changed("store");
  CHECK(doc.cached_results() == 0);

  // Copies never share cached state.
  (void)doc.pipeline_result(store, "pv", std::nullopt, ChainMode::reported);
  const StudyDocument copy = doc;
  CHECK(copy.cached_results() == 0);

  CHECK_THROWS_AS(doc.pipeline_result(store, "retail", 9, ChainMode::reported), Error);
  CHECK_THROWS_AS(doc.pipeline_result(store, "ghost", std::nullopt, ChainMode::reported), Error);
}

TEST_CASE("cached results match fresh runs for random assessments") {
  StudyDocument doc("s", canonical::kFrameworkId, canonical::kStoreTable, {}, ticking());
  const Pipeline store(canonical::framework(), canonical::store_weights());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto a = testutil::make_assessment("a" + std::to_string(i), "store", testutil::random_levels(rng));
    doc.add_assessment(a);
    for (int pass = 0; pass < 2; ++pass) CHECK(doc.pipeline_result(store, a.id(), 1, ChainMode::reported) == store.run(a));
  }
}

TEST_CASE("config file and environment overrides") {
  TempDir tmp;
  const auto file = (tmp.path / "config.json").string();
  std::ofstream(file) << R"({"port": 9000, "host": "127.0.0.1", "consensus_threshold": 0.75})";
  auto c = Config::load(file);
  CHECK(c.port == 9000);
  CHECK(c.host == "127.0.0.1");
  CHECK(c.consensus_threshold == 0.75);
  CHECK(c.data_dir.empty());
  {
    EnvGuard port("PORT", "9100");
    EnvGuard dir("DATA_DIR", "/var/lib/temai");
    EnvGuard thr("CONSENSUS_THRESHOLD", "0.8");
    EnvGuard tok("TEMAI_API_TOKEN", "secret");
    c = Config::load(file);
    CHECK(c.port == 9100);
    CHECK(c.data_dir == "/var/lib/temai");
    CHECK(c.consensus_threshold == 0.8);
    CHECK(c.api_token == "secret");
  }
  CHECK(Config::load().port == 8080);
  {
    EnvGuard thr("CONSENSUS_THRESHOLD", "1.5");
    CHECK_THROWS_AS(Config::load(), Error);
  }
  {
    EnvGuard port("PORT", "eighty");
    CHECK_THROWS_AS(Config::load(), Error);
  }
  CHECK_THROWS_AS(Config::load((tmp.path / "absent.json").string()), Error);
}

TEST_CASE("workspace persists studies and weight tables") {
  TempDir tmp;
  Config cfg;
  cfg.data_dir = tmp.path.string();
  cfg.consensus_threshold = 0.8;
  {
    Workspace ws(cfg, ticking());
    CHECK(ws.framework_ids() == std::vector<std::string>{canonical::kFrameworkId});
    CHECK(ws.weight_tables().size() == 2);
    const int v = ws.write(Workspace::kDefaultStudy, true,
                           [](StudyDocument& d) { return d.add_assessment(canonical::retail_assessment()); });
    CHECK(v == 1);
    ws.write("panel", true, [](StudyDocument& d) { d.run_round(1, small_round(1)); });
    CHECK(ws.read("panel", [](const StudyDocument& d) { return d.delphi().settings().consensus_threshold; }) == 0.8);
    CHECK(ws.study_of("retail") == std::optional<std::string>("default"));
    CHECK_FALSE(ws.study_of("pv").has_value());

    auto entries = canonical::store_weights().entries();
    WeightTable custom("custom", "variant", entries);
    ws.put_weight_table(custom);
    CHECK(fs::exists(tmp.path / "weights" / "custom.json"));
    CHECK(fs::exists(tmp.path / "studies" / "default.json"));
    CHECK(fs::exists(tmp.path / "studies" / "panel.json"));
  }
  Workspace reopened(cfg, ticking());
  CHECK(reopened.study_ids() == std::vector<std::string>{"default", "panel"});
  CHECK(reopened.weight_table("custom").entries() == canonical::store_weights().entries());
  CHECK(reopened.study_of("retail") == std::optional<std::string>("default"));
  const auto audit = reopened.read("default", [](const StudyDocument& d) { return d.audit(); });
  CHECK(audit.back().action == "weights.change");
  CHECK_THROWS_AS(reopened.read("nobody", [](const StudyDocument&) { return 0; }), Error);
  CHECK_THROWS_AS(reopened.weight_table("nobody"), Error);
  CHECK_THROWS_AS(reopened.framework("nobody"), Error);
}

TEST_CASE("invalid weight tables are rejected") {
  Workspace ws(Config{}, ticking());
  auto entries = canonical::store_weights().entries();
  entries.erase("risk_prevention");
  CHECK_THROWS_AS(ws.put_weight_table(WeightTable("partial", "", entries)), Error);
  CHECK_THROWS_AS(ws.put_weight_table(WeightTable("../x", "", canonical::store_weights().entries())), Error);
  CHECK(ws.weight_tables().size() == 2);
}

TEST_CASE("weight updates invalidate every study cache") {
  Workspace ws(Config{}, ticking());
  ws.write("a", true, [](StudyDocument& d) { d.add_assessment(canonical::retail_assessment()); });
  const auto store = ws.pipeline("store", WeightMode::raw);
  (void)ws.read("a", [&](const StudyDocument& d) { return d.pipeline_result(store, "retail", {}, ChainMode::reported); });
  CHECK(ws.read("a", [](const StudyDocument& d) { return d.cached_results(); }) == 1);
  ws.put_weight_table(canonical::store_weights());
  CHECK(ws.read("a", [](const StudyDocument& d) { return d.cached_results(); }) == 0);
}

TEST_CASE("concurrent writers and readers") {
  TempDir tmp;
  Config cfg;
  cfg.data_dir = tmp.path.string();
  Workspace ws(cfg);
  constexpr int kThreads = 8, kPerThread = 25;
  std::atomic<int> reads{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937_64 rng(t);
      const auto store = ws.pipeline("store", WeightMode::raw);
      for (int i = 0; i < kPerThread; ++i) {
        // Half the threads share one study so its lock is contended.
        const std::string study = t % 2 == 0 ? "shared" : "own" + std::to_string(t);
        const std::string id = "t" + std::to_string(t) + "-" + std::to_string(i);
        ws.write(study, true, [&](StudyDocument& d) {
          d.add_assessment(testutil::make_assessment(id, "store", testutil::random_levels(rng)));
        });
        ws.read(study, [&](const StudyDocument& d) {
          (void)d.pipeline_result(store, id, {}, ChainMode::reported);
          ++reads;
        });
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(reads == kThreads * kPerThread);
  const auto shared = ws.read("shared", [](const StudyDocument& d) { return d.assessments().size(); });
  CHECK(shared == static_cast<std::size_t>(kThreads / 2 * kPerThread));
  for (int t = 1; t < kThreads; t += 2) {
    CHECK(ws.read("own" + std::to_string(t), [](const StudyDocument& d) { return d.assessments().size(); }) ==
          static_cast<std::size_t>(kPerThread));
  }
  // What is on disk matches what is in memory.
  Workspace reopened(cfg);
  CHECK(reopened.read("shared", [](const StudyDocument& d) { return save(d); }) ==
        ws.read("shared", [](const StudyDocument& d) { return save(d); }));
}
