#include "temai/api.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include <fmt/format.h>

#include "temai/ahp.hpp"
#include "temai/canonical.hpp"
#include "temai/reports.hpp"
#include "temai/valuation.hpp"

namespace temai::api {

using namespace json_detail;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto end = path.find('/', start);
    const auto piece = path.substr(start, end == std::string_view::npos ? path.npos : end - start);
    if (!piece.empty()) parts.push_back(percent_decode(piece));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

Response json_response(const Json& body, int status = 200) {
  return {status, "application/json", dump_canonical(body)};
}

Json body_json(const Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = parse_json(req.body);
  if (!j.is_object()) throw Error(ErrorCode::parse, "request body must be a JSON object");
  return j;
}

bool is_csv(const Request& req) {
  const auto type = req.header("content-type");
  return type && lower(*type).find("csv") != std::string::npos;
}

int int_param(const Request& req, const std::string& name, int fallback) {
  const auto v = req.param(name);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const int out = std::stoi(*v, &used);
    if (used == v->size()) return out;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::validation, fmt::format("query parameter '{}' must be an integer", name), name);
}

double number_param(const Request& req, const std::string& name, double fallback) {
  const auto v = req.param(name);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double out = std::stod(*v, &used);
    if (used == v->size()) return out;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::validation, fmt::format("query parameter '{}' must be a number", name), name);
}

std::optional<int> version_param(const Request& req) {
  if (!req.param("version")) return std::nullopt;
  return int_param(req, "version", 0);
}

ChainMode mode_of(const Request& req, const Json& body) {
  if (auto m = req.param("mode")) return parse_chain_mode(*m);
  if (body.contains("mode")) return parse_chain_mode(string_field(body, "mode", ""));
  return ChainMode::reported;
}

WeightMode weight_mode_of(const Request& req) {
  if (auto m = req.param("weight_mode")) return parse_weight_mode(*m);
  return WeightMode::raw;
}

// Resolves every "criterion" in a list through the table's alias names,
// reporting failures at `<list>[i].criterion`.
void resolve_criteria(Json& list, const std::string& list_path, const FrameworkDefinition& framework,
                      const std::string& table_id) {
  if (!list.is_array()) throw Error(ErrorCode::parse, "expected an array", list_path);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto path = index_path(list_path, i);
    if (!list[i].is_object()) throw Error(ErrorCode::parse, "expected an object", path);
    const auto name = string_field(list[i], "criterion", path);
    try {
      list[i]["criterion"] = framework.resolve_alias(name, table_id);
    } catch (const Error& e) {
      throw Error(ErrorCode::validation, e.what(), join_path(path, "criterion"));
    }
  }
}

std::vector<valuation::Intervention> interventions_from(const Json& list, const std::string& path) {
  std::vector<valuation::Intervention> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto item = index_path(path, i);
    out.push_back({string_field(list[i], "criterion", item), int_field(list[i], "level", item)});
  }
  return out;
}

}  // namespace

// --- request helpers ---------------------------------------------------------

Request Request::make(std::string method, std::string_view target, std::string body,
                      std::map<std::string, std::string> headers) {
  Request r;
  r.method = std::move(method);
  r.body = std::move(body);
  for (auto& [k, v] : headers) r.headers.emplace(lower(k), v);
  const auto q = target.find('?');
  r.path = std::string(target.substr(0, q));
  if (q != std::string_view::npos) {
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const auto pair = rest.substr(0, amp);
      const auto eq = pair.find('=');
      if (!pair.empty()) {
        r.query[percent_decode(pair.substr(0, eq))] =
            eq == std::string_view::npos ? std::string{} : percent_decode(pair.substr(eq + 1));
      }
      if (amp == std::string_view::npos) break;
      rest = rest.substr(amp + 1);
    }
  }
  return r;
}

std::optional<std::string> Request::header(std::string_view name) const {
  auto it = headers.find(lower(name));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Request::param(const std::string& name) const {
  auto it = query.find(name);
  if (it == query.end()) return std::nullopt;
  return it->second;
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return 400;
    case ErrorCode::unauthorized: return 401;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::validation:
    case ErrorCode::completeness:
    case ErrorCode::lookup:
    case ErrorCode::structural:
    case ErrorCode::numerical:
    case ErrorCode::unsupported:
    case ErrorCode::schema_version: return 422;
  }
  return 500;
}

Response error_response(const Error& error) {
  return json_response({{"code", to_string(error.code())},
                        {"message", error.what()},
                        {"field_path", error.field_path()}},
                       http_status(error.code()));
}

// --- api ---------------------------------------------------------------------

Api::Api(store::Workspace& workspace) : ws_(workspace) {}

Response Api::handle(const Request& request) {
  try {
    const auto& token = ws_.config().api_token;
    if (!token.empty() && request.path != "/health") {
      const auto auth = request.header("authorization");
      if (!auth || *auth != "Bearer " + token) {
        throw Error(ErrorCode::unauthorized, "missing or wrong bearer token", "authorization");
      }
    }
    const bool mutating = request.method == "POST" || request.method == "PUT";
    if (const auto key = request.header("idempotency-key"); mutating && key && !key->empty()) {
      return idempotent(request, *key);
    }
    return route(request);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return json_response({{"code", "internal"}, {"message", e.what()}, {"field_path", ""}}, 500);
  }
}

Response Api::idempotent(const Request& request, const std::string& key) {
  std::shared_ptr<Replay> replay;
  {
    std::lock_guard lock(replay_mu_);
    auto& slot = replays_[key];
    if (!slot) slot = std::make_shared<Replay>();
    replay = slot;
  }
  const std::string fingerprint = request.method + ' ' + request.path + '\n' +
                                  dump_canonical(Json(request.query)) + request.body;
  std::lock_guard lock(replay->mu);
  if (replay->response) {
    if (replay->fingerprint != fingerprint) {
      throw Error(ErrorCode::conflict,
                  fmt::format("idempotency key '{}' was already used for a different request", key),
                  "idempotency-key");
    }
    return *replay->response;
  }
  Response out;
  try {
    out = route(request);
  } catch (const Error& e) {
    out = error_response(e);
  }
  // Only settled outcomes are replayed; a 5xx may succeed on retry.
  if (out.status < 500) {
    replay->fingerprint = fingerprint;
    replay->response = out;
  }
  return out;
}

Response Api::route(const Request& req) {
  const auto seg = split_path(req.path);
  const auto& m = req.method;
  const auto n = seg.size();
  const auto is = [&](std::initializer_list<const char*> pattern) {
    if (pattern.size() != n) return false;
    std::size_t i = 0;
    for (const char* p : pattern) {
      if (std::string_view(p) != "*" && seg[i] != p) return false;
      ++i;
    }
    return true;
  };
  const auto method_not_allowed = [&]() {
    return json_response({{"code", "method_not_allowed"},
                          {"message", fmt::format("{} is not supported on {}", m, req.path)},
                          {"field_path", ""}},
                         405);
  };

  // Finds the study holding an assessment.
  const auto study_for = [&](const std::string& assessment_id) {
    auto study = ws_.study_of(assessment_id);
    if (!study) throw Error(ErrorCode::not_found, fmt::format("assessment '{}' not found", assessment_id));
    return *study;
  };
  const auto record_for = [&](const std::string& assessment_id, std::optional<int> version) {
    return ws_.read(study_for(assessment_id), [&](const store::StudyDocument& doc) {
      const auto* r = doc.find(assessment_id, version);
      if (r == nullptr) {
        throw Error(ErrorCode::not_found,
                    fmt::format("assessment '{}' has no version {}", assessment_id, version.value_or(0)),
                    "version");
      }
      return *r;
    });
  };
  const auto table_for = [&](const AssessmentRecord& record) {
    return req.param("weights").value_or(record.meta().weight_table);
  };

  if (is({"health"})) return json_response({{"status", "ok"}});

  // --- frameworks and weights ----------------------------------------------
  if (is({"frameworks"})) {
    if (m != "GET") return method_not_allowed();
    Json list = Json::array();
    for (const auto& id : ws_.framework_ids()) {
      const auto f = ws_.framework(id);
      list.push_back({{"id", id},
                      {"components", f.components().size()},
                      {"criteria", f.criteria().size()},
                      {"validation", to_json(validate_framework(f))}});
    }
    Json tables = Json::array();
    for (const auto& t : ws_.weight_tables()) {
      tables.push_back({{"table_id", t.table_id()}, {"sector", t.sector()}});
    }
    return json_response({{"frameworks", list}, {"weight_tables", tables}});
  }
  if (is({"frameworks", "*"})) {
    if (m != "GET") return method_not_allowed();
    const auto f = ws_.framework(seg[1]);
    Json tables = Json::object();
    for (const auto& t : ws_.weight_tables()) tables[t.table_id()] = to_json(validate_framework(f, &t));
    return json_response(
        {{"framework", to_json(f)}, {"validation", to_json(validate_framework(f))}, {"weight_tables", tables}});
  }
  if (is({"weights", "*"})) {
    if (m == "GET") {
      const auto t = ws_.weight_table(seg[1]);
      const auto f = ws_.framework(canonical::kFrameworkId);
      return json_response({{"weight_table", to_json(t)}, {"validation", to_json(validate_framework(f, &t))}});
    }
    if (m != "PUT") return method_not_allowed();
    auto table = weight_table_from_json(body_json(req));
    if (table.table_id() != seg[1]) {
      throw Error(ErrorCode::validation,
                  fmt::format("body table_id '{}' differs from '{}' in the path", table.table_id(), seg[1]),
                  "table_id");
    }
    ws_.put_weight_table(table);
    const auto f = ws_.framework(canonical::kFrameworkId);
    return json_response({{"weight_table", to_json(table)}, {"validation", to_json(validate_framework(f, &table))}});
  }

  // --- assessments ------------------------------------------------------------
  if (is({"assessments"})) {
    if (m != "POST") return method_not_allowed();
    Json doc = body_json(req);
    const std::string study = doc.contains("study_id") ? string_field(doc, "study_id", "") : store::Workspace::kDefaultStudy;
    doc.erase("study_id");
    if (!doc.contains("temai_schema")) doc["temai_schema"] = kSchemaVersion;
    if (!doc.contains("kind")) doc["kind"] = "assessment";
    if (!doc.contains("framework")) doc["framework"] = canonical::kFrameworkId;
    if (!doc.contains("created_at")) doc["created_at"] = format_timestamp(ws_.now());
    const auto framework = ws_.framework(string_field(doc, "framework", ""));
    const auto table_id = string_field(doc, "weight_table", "");
    const auto table = ws_.weight_table(table_id);
    if (doc.contains("ratings")) resolve_criteria(doc["ratings"], "ratings", framework, table_id);
    auto record = assessment_from_json(doc);
    record.check_complete(framework);
    if (auto owner = ws_.study_of(record.id()); owner && *owner != study) {
      throw Error(ErrorCode::conflict,
                  fmt::format("assessment '{}' belongs to study '{}'", record.id(), *owner), "study_id");
    }
    const Json stored = to_json(record);
    const auto id = record.id();
    const int version =
        ws_.write(study, true, [&](store::StudyDocument& d) { return d.add_assessment(std::move(record)); });
    return json_response({{"assessment_id", id}, {"study_id", study}, {"version", version}, {"assessment", stored}},
                         201);
  }

  if (n >= 2 && seg[0] == "assessments") {
    const std::string& id = seg[1];
    if (n == 2) {
      if (m != "GET") return method_not_allowed();
      const auto study = study_for(id);
      const auto version = version_param(req);
      return ws_.read(study, [&](const store::StudyDocument& doc) {
        const auto* r = doc.find(id, version);
        if (r == nullptr) throw Error(ErrorCode::not_found, fmt::format("assessment '{}' has no such version", id), "version");
        return json_response({{"assessment_id", id},
                              {"study_id", study},
                              {"version", version.value_or(doc.version_count(id))},
                              {"versions", doc.version_count(id)},
                              {"assessment", to_json(*r)}});
      });
    }
    const std::string& action = seg[2];
    if (n != 3) return json_response({{"code", "not_found"}, {"message", "no such route"}, {"field_path", ""}}, 404);

    if (action == "pipeline") {
      if (m != "POST" && m != "GET") return method_not_allowed();
      const Json body = m == "POST" ? body_json(req) : Json::object();
      const auto mode = mode_of(req, body);
      const auto version = version_param(req);
      const auto study = study_for(id);
      const auto record = record_for(id, version);
      const auto table_id = table_for(record);
      const auto pipeline = ws_.pipeline(table_id, weight_mode_of(req));
      const auto result = ws_.read(study, [&](const store::StudyDocument& doc) {
        return doc.pipeline_result(pipeline, id, version, mode);
      });
      Json out = to_json(result);
      out["weight_table"] = table_id;
      out["version"] = version ? *version : ws_.read(study, [&](const store::StudyDocument& d) {
        return d.version_count(id);
      });
      out["converted"] = {{"capability", to_json(pipeline.converted_scores(record, Stage::capability, mode))},
                          {"adoption", to_json(pipeline.converted_scores(record, Stage::adoption, mode))},
                          {"utility", to_json(pipeline.converted_scores(record, Stage::utility, mode))}};
      return json_response(out);
    }

    if (action == "whatif" || action == "plan") {
      if (m != "POST") return method_not_allowed();
      Json body = body_json(req);
      const auto mode = mode_of(req, body);
      const auto study = study_for(id);
      const auto record = record_for(id, version_param(req));
      const auto table_id = table_for(record);
      const auto pipeline = ws_.pipeline(table_id, weight_mode_of(req));
      const char* list_key = action == "whatif" ? "interventions" : "candidates";
      if (!body.contains(list_key)) {
        throw Error(ErrorCode::validation, fmt::format("body needs '{}'", list_key), list_key);
      }
      resolve_criteria(body[list_key], list_key, pipeline.framework(), table_id);
      auto interventions = interventions_from(body[list_key], list_key);
      if (action == "plan") {
        std::map<std::string, double> confidence;
        if (body.contains("confidence")) {
          for (const auto& [k, v] : body["confidence"].items()) {
            if (!v.is_number()) throw Error(ErrorCode::parse, "confidence must be a number", "confidence." + k);
            confidence[pipeline.framework().resolve_alias(k, table_id)] = v.get<double>();
          }
        }
        const auto plan = valuation::progressive_plan(pipeline, record, mode, interventions, confidence);
        return json_response({{"assessment_id", id},
                              {"mode", to_string(mode)},
                              {"pathway", to_json(valuation::PathwayReport(plan))}});
      }
      auto report = valuation::what_if(pipeline, record, mode, interventions);
      Json out = to_json(report);
      if (body.value("apply", false)) {
        std::vector<LevelRating> changes;
        for (const auto& iv : interventions) changes.emplace_back(iv.criterion, iv.new_level);
        auto meta = record.meta();
        meta.created_at = std::max(ws_.now(), meta.created_at);
        auto next = record.with_levels(changes).with_metadata(meta);
        out["applied_version"] =
            ws_.write(study, false, [&](store::StudyDocument& d) { return d.add_assessment(std::move(next)); });
      }
      return json_response(out);
    }

    if (action == "report.csv") {
      if (m != "GET") return method_not_allowed();
      const auto study = study_for(id);
      const auto version = version_param(req);
      const auto record = record_for(id, version);
      const auto pipeline = ws_.pipeline(table_for(record), weight_mode_of(req));
      std::vector<PipelineResult> rows;
      ws_.read(study, [&](const store::StudyDocument& doc) {
        for (auto mode : {ChainMode::reported, ChainMode::appendix}) {
          rows.push_back(doc.pipeline_result(pipeline, id, version, mode));
        }
        return 0;
      });
      return {200, "text/csv", stage_table_csv(rows)};
    }

    if (action == "gap") {
      if (m != "GET") return method_not_allowed();
      const auto record = record_for(id, version_param(req));
      const auto pipeline = ws_.pipeline(table_for(record), weight_mode_of(req));
      const int k = int_param(req, "k", 3);
      if (k < 0) throw Error(ErrorCode::validation, "k must be non-negative", "k");
      const auto gap = valuation::capability_adoption_gap(pipeline, record, static_cast<std::size_t>(k));
      return json_response({{"pathway", to_json(valuation::PathwayReport(gap))}});
    }

    if (action == "trend") {
      if (m != "GET") return method_not_allowed();
      const auto study = study_for(id);
      const auto versions = ws_.read(study, [&](const store::StudyDocument& doc) {
        std::vector<AssessmentRecord> out;
        for (const auto& r : doc.assessments().at(id)) {
          auto meta = r.meta();
          meta.assessment_id = fmt::format("{}@{}", id, out.size() + 1);
          out.push_back(r.with_metadata(meta));
        }
        return out;
      });
      const auto pipeline = ws_.pipeline(table_for(versions.back()), weight_mode_of(req));
      const auto trend = valuation::continuous_value_assessment(pipeline, versions, mode_of(req, Json::object()));
      return json_response({{"pathway", to_json(valuation::PathwayReport(trend))}});
    }
    return json_response({{"code", "not_found"}, {"message", "no such route"}, {"field_path", ""}}, 404);
  }

  // --- pathway and valuation --------------------------------------------------
  if (is({"pathway", "value-density"})) {
    if (m != "POST") return method_not_allowed();
    const Json body = body_json(req);
    const Json& ids = field(body, "assessment_ids", "");
    std::vector<AssessmentRecord> records;
    std::vector<Pipeline> pipelines;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!ids[i].is_string()) throw Error(ErrorCode::parse, "ids must be strings", index_path("assessment_ids", i));
      records.push_back(record_for(ids[i].get<std::string>(), std::nullopt));
    }
    for (const auto& r : records) pipelines.push_back(ws_.pipeline(r.meta().weight_table, weight_mode_of(req)));
    std::vector<valuation::ScoredAssessment> scored;
    for (std::size_t i = 0; i < records.size(); ++i) scored.push_back({records[i], pipelines[i]});
    return json_response({{"pathway", to_json(valuation::PathwayReport(valuation::value_density_mapping(scored)))}});
  }
  if (is({"valuation", "vdc"})) {
    if (m != "POST") return method_not_allowed();
    const Json body = body_json(req);
    const valuation::VdcInputs in{int_field(body, "task_criticality", ""), int_field(body, "knowledge_concentration", ""),
                                  int_field(body, "risk_exposure", "")};
    const auto r = valuation::value_density_coefficient(in);
    return json_response({{"score", round_to(r.score, kScoreDigits)}, {"level", r.level}});
  }
  if (is({"valuation", "man-hours"})) {
    if (m != "POST") return method_not_allowed();
    const Json body = body_json(req);
    const auto id = string_field(body, "assessment_id", "");
    const auto record = record_for(id, std::nullopt);
    const auto pipeline = ws_.pipeline(table_for(record), weight_mode_of(req));
    valuation::ManHourModel model;
    model.base_rate = number_field(body, "base_rate", "");
    model.a = body.value("a", model.a);
    model.b = body.value("b", model.b);
    model.c = body.value("c", model.c);
    model.risk_weight = body.value("risk_weight", model.risk_weight);
    const auto scores = pipeline.run(record, mode_of(req, body)).scores;
    return json_response({{"assessment_id", id},
                          {"ai_efficiency", round_to(valuation::ai_efficiency(model, scores), kRateDigits)},
                          {"man_hour_value", round_to(valuation::man_hour_value(model, scores), kScoreDigits)}});
  }
  if (is({"quadrants"})) {
    if (m != "GET") return method_not_allowed();
    valuation::QuadrantThresholds t{number_param(req, "regulatory_threshold", 50.0),
                                    number_param(req, "support_threshold", 50.0)};
    if (req.param("regulatory") || req.param("support")) {
      const auto p = valuation::classify_quadrant(number_param(req, "regulatory", 0.0),
                                                  number_param(req, "support", 0.0), t);
      return json_response(quadrant_grid(t, &p));
    }
    return json_response(quadrant_grid(t));
  }

  // --- delphi ---------------------------------------------------------------
  if (n >= 2 && seg[0] == "studies") {
    const std::string& study = seg[1];
    if (n == 2) {
      if (m != "GET") return method_not_allowed();
      return ws_.read(study, [](const store::StudyDocument& d) { return json_response(store::to_json(d)); });
    }
    if (n == 3 && seg[2] == "audit") {
      if (m != "GET") return method_not_allowed();
      return ws_.read(study, [](const store::StudyDocument& d) {
        return json_response(store::to_json(d)["audit"]);
      });
    }
    if (n == 3 && seg[2] == "rounds") {
      const auto overview = [&](const store::StudyDocument& d) {
        const auto& rounds = d.delphi().rounds();
        Json list = Json::array();
        for (const auto& r : rounds) list.push_back(to_json(r));
        const auto stab = d.delphi().latest_stability();
        return Json{{"study_id", d.id()},
                    {"consensus_threshold", d.delphi().settings().consensus_threshold},
                    {"rounds", list},
                    {"rounds_completed", rounds.size()},
                    {"concordance", rounds.empty() ? Json(nullptr) : to_json(rounds.back().concordance)},
                    {"consensus_reached", d.delphi().consensus_reached()},
                    {"stability", stab ? to_json(*stab) : Json(nullptr)}};
      };
      if (m == "GET") return ws_.read(study, [&](const store::StudyDocument& d) { return json_response(overview(d)); });
      if (m != "POST") return method_not_allowed();

      return ws_.write(study, true, [&](store::StudyDocument& d) {
        const int next = static_cast<int>(d.delphi().rounds().size()) + 1;
        std::vector<delphi::ExpertSubmission> subs;
        int round = next;
        if (is_csv(req)) {
          round = int_param(req, "round", next);
          const auto kind = req.param("kind").value_or("ratings");
          if (kind != "ratings" && kind != "rankings") {
            throw Error(ErrorCode::validation, "kind must be ratings or rankings", "kind");
          }
          subs = delphi::submissions_from_csv(
              req.body, kind == "ratings" ? delphi::SubmissionKind::ratings : delphi::SubmissionKind::rankings,
              round);
        } else {
          const Json body = body_json(req);
          round = body.contains("round") ? int_field(body, "round", "") : int_param(req, "round", next);
          const Json& list = field(body, "submissions", "");
          if (!list.is_array()) throw Error(ErrorCode::parse, "'submissions' must be an array", "submissions");
          for (std::size_t i = 0; i < list.size(); ++i) {
            subs.push_back(submission_from_json(list[i], round, index_path("submissions", i)));
          }
        }
        const auto summary = d.run_round(round, std::move(subs));
        Json out = overview(d);
        out["round"] = to_json(summary);
        return json_response(out, 201);
      });
    }
    return json_response({{"code", "not_found"}, {"message", "no such route"}, {"field_path", ""}}, 404);
  }

  // --- ahp --------------------------------------------------------------------
  if (is({"ahp", "derive"})) {
    if (m != "POST") return method_not_allowed();
    std::vector<ahp::PairwiseMatrix> matrices;
    auto method = ahp::Method::eigenvector;
    double threshold = ahp::kDefaultCrThreshold;
    if (is_csv(req)) {
      matrices.push_back(ahp::matrix_from_csv(req.body));
      if (auto v = req.param("method")) method = ahp::parse_method(*v);
      threshold = number_param(req, "threshold", threshold);
    } else {
      const Json body = body_json(req);
      if (body.contains("matrix")) matrices.push_back(pairwise_matrix_from_json(body["matrix"], "matrix"));
      if (body.contains("matrices")) {
        const Json& list = body["matrices"];
        if (!list.is_array()) throw Error(ErrorCode::parse, "'matrices' must be an array", "matrices");
        for (std::size_t i = 0; i < list.size(); ++i) {
          matrices.push_back(pairwise_matrix_from_json(list[i], index_path("matrices", i)));
        }
      }
      if (body.contains("method")) method = ahp::parse_method(string_field(body, "method", ""));
      if (body.contains("threshold")) threshold = number_field(body, "threshold", "");
    }
    if (matrices.empty()) throw Error(ErrorCode::validation, "no matrix supplied", "matrices");
    Json experts = Json::array();
    if (matrices.size() > 1) {
      for (const auto& mx : matrices) experts.push_back(to_json(ahp::consistency(mx, threshold)));
    }
    const auto combined = matrices.size() == 1 ? matrices.front() : ahp::aggregate_experts(matrices);
    return json_response({{"method", to_string(method)},
                          {"matrix", to_json(combined)},
                          {"weights", to_json(ahp::derive_weights(combined, method))},
                          {"consistency", to_json(ahp::consistency(combined, threshold))},
                          {"experts", experts}});
  }

  return json_response({{"code", "not_found"}, {"message", fmt::format("no route for {}", req.path)}, {"field_path", ""}},
                       404);
}

}  // namespace temai::api
