#include <doctest.h>

#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "temai/api.hpp"
#include "temai/canonical.hpp"
#include "temai/server.hpp"

using namespace temai;
using namespace temai::api;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(TEMAI_FIXTURES_DIR) + "/" + name);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fixed clock so created_at defaults are predictable.
store::Clock fixed_clock() {
  return [] { return parse_timestamp("2025-05-05T12:00:00Z"); };
}

struct Harness {
  store::Workspace ws;
  Api api;
  explicit Harness(store::Config cfg = {}) : ws(std::move(cfg), fixed_clock()), api(ws) {}

  Response call(const std::string& method, const std::string& target, const std::string& body = {},
                std::map<std::string, std::string> headers = {}) {
    return api.handle(Request::make(method, target, body, std::move(headers)));
  }
  Response post_json(const std::string& target, const Json& body, std::map<std::string, std::string> headers = {}) {
    return call("POST", target, body.dump(), std::move(headers));
  }
  void load_cases() {
    REQUIRE(call("POST", "/assessments", fixture("assessment_retail.json")).status == 201);
    REQUIRE(call("POST", "/assessments", fixture("assessment_pv.json")).status == 201);
  }
};

Json delphi_round_body(const std::string& csv_name) {
  // expert_id,item_id,value rows turned into JSON rankings.
  std::map<std::string, Json> by_expert;
  std::istringstream in(fixture(csv_name));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(','), b = line.find(',', a + 1);
    by_expert[line.substr(0, a)][line.substr(a + 1, b - a - 1)] = std::stod(line.substr(b + 1));
  }
  Json subs = Json::array();
  for (auto& [expert, rankings] : by_expert) subs.push_back({{"expert_id", expert}, {"rankings", rankings}});
  return {{"submissions", subs}};
}

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::parse) == 400);
  CHECK(http_status(ErrorCode::unauthorized) == 401);
  CHECK(http_status(ErrorCode::not_found) == 404);
  CHECK(http_status(ErrorCode::conflict) == 409);
  for (auto c : {ErrorCode::validation, ErrorCode::completeness, ErrorCode::lookup, ErrorCode::structural,
                 ErrorCode::numerical, ErrorCode::unsupported, ErrorCode::schema_version}) {
    CHECK(http_status(c) == 422);
  }
  const auto r = error_response(Error(ErrorCode::validation, "bad", "a.b"));
  CHECK(r.status == 422);
  CHECK(r.json()["field_path"] == "a.b");
  CHECK(r.json()["code"] == "validation");
}

TEST_CASE("request parsing") {
  const auto r = Request::make("GET", "/quadrants?regulatory=80&note=a%20b+c", "", {{"X-Thing", "1"}});
  CHECK(r.path == "/quadrants");
  CHECK(r.param("regulatory") == std::optional<std::string>("80"));
  CHECK(r.param("note") == std::optional<std::string>("a b c"));
  CHECK(r.header("x-thing") == std::optional<std::string>("1"));
  CHECK_FALSE(r.param("absent").has_value());
}

TEST_CASE("health and catalog") {
  Harness h;
  CHECK(h.call("GET", "/health").json()["status"] == "ok");
  const auto f = h.call("GET", "/frameworks").json();
  CHECK(f["frameworks"][0]["criteria"] == 25);
  CHECK(f["weight_tables"].size() == 2);
  const auto one = h.call("GET", "/frameworks/temai-v1").json();
  CHECK(one["weight_tables"]["store"]["valid"] == true);
  CHECK(h.call("GET", "/frameworks/nope").status == 404);
  const auto w = h.call("GET", "/weights/store").json();
  CHECK(w["weight_table"]["entries"]["perception_capability"] == "1888.89");
  CHECK(h.call("DELETE", "/weights/store").status == 405);
  CHECK(h.call("DELETE", "/weights/store").json()["code"] == "method_not_allowed");
  CHECK(h.call("GET", "/nowhere").status == 404);
}

TEST_CASE("retail pipeline over http") {
  Harness h;
  h.load_cases();
  const auto r = h.call("GET", "/assessments/retail/pipeline");
  REQUIRE(r.status == 200);
  const auto j = r.json();
  CHECK(j["final_value"].get<double>() == doctest::Approx(10.61).epsilon(1e-9));
  CHECK(j["scores"]["capability_score"].get<double>() == doctest::Approx(57.56));
  CHECK(j["scores"]["adoption_rate"].get<double>() == doctest::Approx(0.5116));
  CHECK(j["appendix_final"].get<double>() == doctest::Approx(20.75));
  CHECK(j["weight_table"] == "store");
  CHECK(j["converted"]["capability"].size() == 8);

  const auto app = h.call("POST", "/assessments/retail/pipeline?mode=appendix", "{}").json();
  CHECK(app["final_value"] == app["appendix_final"]);
  const auto pv = h.call("GET", "/assessments/pv/pipeline").json();
  CHECK(pv["final_value"].get<double>() == doctest::Approx(23.01));
  const auto norm = h.call("GET", "/assessments/retail/pipeline?weight_mode=normalized").json();
  CHECK(norm["weight_mode"] == "normalized");
  CHECK(norm["scores"]["adoption_rate"].get<double>() > 0.5116);

  CHECK(h.call("GET", "/assessments/retail/pipeline?mode=triple").status == 422);
  CHECK(h.call("GET", "/assessments/ghost/pipeline").status == 404);
  CHECK(h.call("GET", "/assessments/retail/pipeline?version=7").status == 404);
}

TEST_CASE("assessment intake") {
  Harness h;
  h.load_cases();
  auto doc = parse_json(fixture("assessment_retail.json"));
  CHECK(h.call("GET", "/assessments/retail").json()["versions"] == 1);

  // Table display names resolve to canonical ids.
  doc["created_at"] = "2025-02-01T00:00:00Z";
  for (auto& r : doc["ratings"]) {
    if (r["criterion"] == "scene_transfer_difficulty") {
      r["criterion"] = "Cross - Scenario Scalability";
      r["level"] = 4;
    }
  }
  const auto created = h.post_json("/assessments", doc);
  REQUIRE(created.status == 201);
  CHECK(created.json()["version"] == 2);
  CHECK(h.call("GET", "/assessments/retail/pipeline").json()["final_value"].get<double>() ==
        doctest::Approx(13.01).epsilon(0.001));
  CHECK(h.call("GET", "/assessments/retail?version=1").json()["assessment"]["created_at"] == "2025-01-01T00:00:00Z");

  auto partial = doc;
  partial["ratings"].erase(0);
  partial["assessment_id"] = "partial";
  CHECK(h.post_json("/assessments", partial).status == 422);

  auto unknown = doc;
  unknown["ratings"][3]["criterion"] = "telepathy";
  const auto bad = h.post_json("/assessments", unknown);
  CHECK(bad.status == 422);
  CHECK(bad.json()["field_path"] == "ratings[3].criterion");

  auto other_study = doc;
  other_study["study_id"] = "elsewhere";
  CHECK(h.post_json("/assessments", other_study).status == 409);

  auto backdated = doc;
  backdated["created_at"] = "2024-01-01T00:00:00Z";
  CHECK(h.post_json("/assessments", backdated).status == 409);

  auto defaults = Json::object();
  defaults["assessment_id"] = "fresh";
  defaults["weight_table"] = "pv";
  defaults["ratings"] = parse_json(fixture("assessment_pv.json"))["ratings"];
  const auto fresh = h.post_json("/assessments", defaults);
  REQUIRE(fresh.status == 201);
  CHECK(fresh.json()["assessment"]["created_at"] == "2025-05-05T12:00:00Z");

  CHECK(h.call("POST", "/assessments", "{broken").status == 400);
  auto future = doc;
  future["temai_schema"] = 99;
  CHECK(h.post_json("/assessments", future).json()["code"] == "schema_version");
}

TEST_CASE("what-if and plan") {
  Harness h;
  h.load_cases();
  const auto r = h.post_json("/assessments/retail/whatif",
                             {{"interventions", {{{"criterion", "Scene Transfer Difficulty"}, {"level", 4}}}}});
  REQUIRE(r.status == 200);
  const auto j = r.json();
  CHECK(j["marginals"][0]["criterion"] == "scene_transfer_difficulty");
  CHECK(j["marginals"][0]["adoption_delta"].get<double>() == doctest::Approx(0.0549));
  CHECK(j["combined_final_delta"].get<double>() == doctest::Approx(2.3996));
  CHECK_FALSE(j.contains("applied_version"));

  const auto unknown = h.post_json("/assessments/retail/whatif", {{"interventions", {{{"criterion", "bogus"}, {"level", 3}}}}});
  CHECK(unknown.status == 422);
  CHECK(unknown.json()["field_path"] == "interventions[0].criterion");
  const auto level = h.post_json("/assessments/retail/whatif",
                                 {{"interventions", {{{"criterion", "social_metrics"}, {"level", 9}}}}});
  CHECK(level.json()["field_path"] == "interventions[0].level");
  CHECK(h.post_json("/assessments/retail/whatif", Json::object()).status == 422);

  const auto applied = h.post_json("/assessments/retail/whatif",
                                   {{"interventions", {{{"criterion", "scene_transfer_difficulty"}, {"level", 4}}}},
                                    {"apply", true}});
  CHECK(applied.json()["applied_version"] == 2);
  CHECK(h.call("GET", "/assessments/retail").json()["assessment"]["provenance"]["scene_transfer_difficulty"] ==
        "user_entered");

  const auto plan = h.post_json("/assessments/pv/plan",
                                {{"candidates", {{{"criterion", "analytical_capability"}, {"level", 5}},
                                                 {{"criterion", "perception_capability"}, {"level", 5}}}}});
  REQUIRE(plan.status == 200);
  const auto steps = plan.json()["pathway"]["payload"];
  CHECK(plan.json()["pathway"]["stage"] == "ProgressiveImplementation");
  REQUIRE(steps.size() == 2);
  CHECK(steps[0]["priority"].get<double>() >= steps[1]["priority"].get<double>());
}

TEST_CASE("reports and pathway stages") {
  Harness h;
  h.load_cases();
  const auto csv = h.call("GET", "/assessments/retail/report.csv");
  CHECK(csv.status == 200);
  CHECK(csv.content_type == "text/csv");
  CHECK(csv.body.rfind("assessment_id,mode,stage,value\n", 0) == 0);
  CHECK(csv.body.find("retail,reported,final_value,10.61") != std::string::npos);
  CHECK(csv.body.find("retail,appendix,final_value,20.75") != std::string::npos);

  const auto gap = h.call("GET", "/assessments/retail/gap?k=2").json();
  CHECK(gap["pathway"]["stage"] == "CapabilityAdoptionAlignment");
  CHECK(gap["pathway"]["payload"]["limiting_factors"].size() == 2);
  CHECK(h.call("GET", "/assessments/retail/gap?k=-1").status == 422);

  CHECK(h.call("GET", "/assessments/retail/trend").status == 422);
  h.post_json("/assessments/retail/whatif",
              {{"interventions", {{{"criterion", "scene_transfer_difficulty"}, {"level", 4}}}}, {"apply", true}});
  const auto trend = h.call("GET", "/assessments/retail/trend").json();
  CHECK(trend["pathway"]["payload"]["steps"][0]["from"] == "retail@1");
  CHECK(trend["pathway"]["payload"]["steps"][0]["final_delta"].get<double>() == doctest::Approx(2.3996));

  const auto density = h.post_json("/pathway/value-density", {{"assessment_ids", {"retail", "pv"}}}).json();
  CHECK(density["pathway"]["payload"][0]["assessment_id"] == "pv");
  CHECK(h.post_json("/pathway/value-density", {{"assessment_ids", {"ghost"}}}).status == 404);

  const auto vdc = h.post_json("/valuation/vdc", {{"task_criticality", 5}, {"knowledge_concentration", 5},
                                                  {"risk_exposure", 5}}).json();
  CHECK(vdc["level"] == 5);
  CHECK(h.post_json("/valuation/vdc", {{"task_criticality", 7}, {"knowledge_concentration", 5},
                                       {"risk_exposure", 5}}).status == 422);

  const auto mh = h.post_json("/valuation/man-hours", {{"assessment_id", "pv"}, {"base_rate", 100},
                                                       {"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  CHECK(mh.status == 200);
  CHECK(mh.json()["man_hour_value"].get<double>() > 0);
  CHECK(h.post_json("/valuation/man-hours", {{"assessment_id", "pv"}, {"base_rate", 100}, {"a", 0.9}}).json()["field_path"] ==
        "dimension_weights");

  const auto quad = h.call("GET", "/quadrants?regulatory=80&support=20").json();
  CHECK(quad["point"]["quadrant"] == "FocusedCompliance");
  CHECK(quad["cells"].size() == 4);
  CHECK(h.call("GET", "/quadrants?regulatory=50&support=50").json()["point"]["quadrant"] == "OptimalConditions");
  CHECK(h.call("GET", "/quadrants?regulatory=150&support=50").status == 422);
}

TEST_CASE("delphi rounds over http") {
  Harness h;
  const auto first = h.post_json("/studies/panel/rounds", delphi_round_body("delphi_round_w069.csv"));
  REQUIRE(first.status == 201);
  const auto j = first.json();
  CHECK(j["round"]["concordance"]["w"].get<double>() == doctest::Approx(0.69));
  CHECK(j["consensus_reached"] == false);
  CHECK(j["round"]["status"] == "further round required");

  const auto second = h.call("POST", "/studies/panel/rounds?kind=rankings", fixture("delphi_round_w082.csv"),
                             {{"Content-Type", "text/csv"}});
  REQUIRE(second.status == 201);
  CHECK(second.json()["consensus_reached"] == true);
  CHECK(second.json()["stability"]["max_rank_shift"] == 4);
  CHECK(h.call("GET", "/studies/panel/rounds").json()["rounds_completed"] == 2);

  auto out_of_order = delphi_round_body("delphi_round_w069.csv");
  out_of_order["round"] = 7;
  CHECK(h.post_json("/studies/panel/rounds", out_of_order).status == 409);

  const auto audit = h.call("GET", "/studies/panel/audit").json();
  CHECK(audit.back()["action"] == "delphi.round");
  CHECK(h.call("GET", "/studies/panel").json()["kind"] == "study");
  CHECK(h.call("GET", "/studies/none").status == 404);
}

TEST_CASE("ahp derivation over http") {
  Harness h;
  const auto csv = h.call("POST", "/ahp/derive", fixture("consistent3.csv"), {{"Content-Type", "text/csv"}});
  REQUIRE(csv.status == 200);
  const auto j = csv.json();
  CHECK(j["weights"][0]["weight"].get<double>() == doctest::Approx(4.0 / 7.0).epsilon(1e-6));
  CHECK(j["consistency"]["acceptable"] == true);

  const Json cyclic = {{"items", {"a", "b", "c"}}, {"values", {{1, 9, 1.0 / 9}, {1.0 / 9, 1, 9}, {9, 1.0 / 9, 1}}}};
  const auto bad = h.post_json("/ahp/derive", {{"matrix", cyclic}}).json();
  CHECK(bad["consistency"]["acceptable"] == false);

  const Json other = {{"items", {"a", "b", "c"}}, {"values", {{1, 2, 4}, {0.5, 1, 2}, {0.25, 0.5, 1}}}};
  const auto agg = h.post_json("/ahp/derive", {{"matrices", {other, other}}, {"method", "geometric_mean"}}).json();
  CHECK(agg["experts"].size() == 2);
  CHECK(agg["method"] == "geometric_mean");
  CHECK(h.post_json("/ahp/derive", Json::object()).status == 422);
  const Json out_of_scale = {{"items", {"a", "b"}}, {"values", {{1, 12}, {1.0 / 12, 1}}}};
  CHECK(h.post_json("/ahp/derive", {{"matrix", out_of_scale}}).status == 422);
}

TEST_CASE("weight table updates") {
  Harness h;
  h.load_cases();
  auto table = parse_json(fixture("weights_store.json"));
  table["table_id"] = "store";
  table["entries"]["scene_transfer_difficulty"] = "1400.00";
  table["entries"]["modification_difficulty"] = "1766.66";
  const auto put = h.call("PUT", "/weights/store", table.dump());
  CHECK(put.status == 200);
  const double after = h.call("GET", "/assessments/retail/pipeline").json()["final_value"].get<double>();
  CHECK(after != doctest::Approx(10.61).epsilon(1e-6));

  table["table_id"] = "other";
  CHECK(h.call("PUT", "/weights/store", table.dump()).status == 422);
  table["table_id"] = "store";
  table["entries"].erase("risk_prevention");
  CHECK(h.call("PUT", "/weights/store", table.dump()).status == 422);
}

TEST_CASE("idempotent retries") {
  Harness h;
  const auto body = fixture("assessment_retail.json");
  const std::map<std::string, std::string> key = {{"Idempotency-Key", "k-1"}};
  const auto first = h.call("POST", "/assessments", body, key);
  const auto again = h.call("POST", "/assessments", body, key);
  CHECK(first.status == 201);
  CHECK(again.status == 201);
  CHECK(again.body == first.body);
  CHECK(h.call("GET", "/assessments/retail").json()["versions"] == 1);

  const auto clash = h.call("POST", "/assessments", fixture("assessment_pv.json"), key);
  CHECK(clash.status == 409);
  CHECK(clash.json()["field_path"] == "idempotency-key");

  // Without a key the same body is a second write.
  auto later = parse_json(body);
  later["created_at"] = "2025-03-01T00:00:00Z";
  CHECK(h.post_json("/assessments", later).json()["version"] == 2);
}

TEST_CASE("bearer token") {
  store::Config cfg;
  cfg.api_token = "t0ken";
  Harness h(cfg);
  CHECK(h.call("GET", "/health").status == 200);
  const auto denied = h.call("GET", "/frameworks");
  CHECK(denied.status == 401);
  CHECK(denied.json()["code"] == "unauthorized");
  CHECK(h.call("GET", "/frameworks", "", {{"Authorization", "Bearer wrong"}}).status == 401);
  CHECK(h.call("GET", "/frameworks", "", {{"Authorization", "Bearer t0ken"}}).status == 200);
}

TEST_CASE("concurrent api calls") {
  Harness h;
  h.load_cases();
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        if (t % 2 == 0) {
          ok += h.call("GET", "/assessments/retail/pipeline").status == 200;
        } else {
          auto doc = parse_json(fixture("assessment_pv.json"));
          doc["assessment_id"] = "pv-" + std::to_string(t) + "-" + std::to_string(i);
          doc["study_id"] = "s" + std::to_string(t % 3);
          ok += h.post_json("/assessments", doc).status == 201;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 160);
}

TEST_CASE("real socket round trip") {
  Harness h;
  HttpServer server(h.api);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  server.start();

  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  const auto created = client.Post("/assessments", fixture("assessment_retail.json"), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);

  const auto result = client.Get("/assessments/retail/pipeline?mode=reported");
  REQUIRE(result);
  CHECK(parse_json(result->body)["final_value"].get<double>() == doctest::Approx(10.61));

  const auto report = client.Get("/assessments/retail/report.csv");
  REQUIRE(report);
  CHECK(report->get_header_value("Content-Type").rfind("text/csv", 0) == 0);

  const auto missing = client.Get("/assessments/ghost");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  server.stop();
}
