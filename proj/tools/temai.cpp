// temai command-line interface.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "temai/ahp.hpp"
#include "temai/canonical.hpp"
#include "temai/delphi.hpp"
#include "temai/error.hpp"
#include "temai/reports.hpp"
#include "temai/reproduce.hpp"
#include "temai/scoring.hpp"
#include "temai/serialization.hpp"
#include "temai/server.hpp"
#include "temai/valuation.hpp"

namespace fs = std::filesystem;
using namespace temai;

namespace {

enum Exit : int {
  kOk = 0,
  kReproductionFailed = 1,
  kValidation = 3,
  kIo = 4,
  kNumerical = 5,
  kSchema = 6,
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return kIo;
    case ErrorCode::numerical: return kNumerical;
    case ErrorCode::schema_version: return kSchema;
    default: return kValidation;
  }
}

bool g_json = false;

void emit(const Json& j, const std::string& text) {
  if (g_json) {
    std::cout << dump_canonical(j);
  } else {
    std::cout << text;
  }
}

Json load_json(const std::string& path) {
  try {
    return parse_json(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()), e.field_path());
  }
}

FrameworkDefinition load_framework(const std::string& path) {
  return path.empty() ? canonical::framework() : framework_from_json(load_json(path));
}

// A weights file, or a built-in table id ("store", "pv") when no such file exists.
WeightTable load_weights(const std::string& spec) {
  if (!fs::exists(spec)) {
    if (spec == canonical::kStoreTable) return canonical::store_weights();
    if (spec == canonical::kPvTable) return canonical::pv_weights();
  }
  return weight_table_from_json(load_json(spec));
}

struct ScoreOptions {
  std::string assessment;
  std::string weights;
  std::string framework;
  std::string mode = "reported";
  std::string weight_mode = "raw";
};

void add_score_options(CLI::App* cmd, ScoreOptions& o) {
  cmd->add_option("assessment", o.assessment, "assessment JSON")->required();
  cmd->add_option("--weights,-w", o.weights, "weight table JSON or built-in id (store, pv)");
  cmd->add_option("--framework", o.framework, "framework JSON (built-in when omitted)");
  cmd->add_option("--mode", o.mode, "chain mode")->check(CLI::IsMember({"reported", "appendix"}));
  cmd->add_option("--weight-mode", o.weight_mode, "weight interpretation")
      ->check(CLI::IsMember({"raw", "normalized"}));
}

struct Scoring {
  AssessmentRecord record;
  Pipeline pipeline;
  ChainMode mode;
};

Scoring prepare(const ScoreOptions& o) {
  auto record = assessment_from_json(load_json(o.assessment));
  auto framework = load_framework(o.framework);
  record.check_complete(framework);
  auto weights = load_weights(o.weights.empty() ? record.meta().weight_table : o.weights);
  return {std::move(record), Pipeline(std::move(framework), std::move(weights), parse_weight_mode(o.weight_mode)),
          parse_chain_mode(o.mode)};
}

int cmd_validate(const std::string& framework_path, const std::string& weights_path) {
  const auto framework = load_framework(framework_path);
  std::optional<WeightTable> weights;
  if (!weights_path.empty()) weights = load_weights(weights_path);
  const auto report = validate_framework(framework, weights ? &*weights : nullptr);

  std::string text = fmt::format("framework {}: {} components, {} criteria\n", framework.id(),
                                 framework.components().size(), framework.criteria().size());
  for (const auto& s : report.dimension_sums) {
    text += fmt::format("  {:<11} sum {:>9}  {}\n", to_string(s.dimension), s.sum.to_string(),
                        s.status == SumStatus::pass ? "pass" : "warn");
  }
  for (const auto& v : report.violations) text += fmt::format("  violation: {}\n", v);
  text += report.valid() ? "valid\n" : "invalid\n";
  emit(to_json(report), text);
  return report.valid() ? kOk : kValidation;
}

int cmd_score(const ScoreOptions& o, bool csv_out) {
  const auto s = prepare(o);
  const auto result = s.pipeline.run(s.record, s.mode);
  if (csv_out) {
    std::cout << stage_table_csv(std::span(&result, 1));
    return kOk;
  }
  Json j = to_json(result);
  j["converted"] = {
      {"capability", to_json(s.pipeline.converted_scores(s.record, Stage::capability, s.mode))},
      {"adoption", to_json(s.pipeline.converted_scores(s.record, Stage::adoption, s.mode))},
      {"utility", to_json(s.pipeline.converted_scores(s.record, Stage::utility, s.mode))}};
  emit(j, format_stage_table(result));
  return kOk;
}

int cmd_whatif(const ScoreOptions& o, const std::vector<std::string>& sets) {
  const auto s = prepare(o);
  std::vector<valuation::Intervention> interventions;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto eq = sets[i].rfind('=');
    const auto path = fmt::format("interventions[{}]", i);
    if (eq == std::string::npos) {
      throw Error(ErrorCode::validation, fmt::format("'{}' is not criterion=level", sets[i]), path);
    }
    std::string criterion;
    try {
      criterion = s.pipeline.framework().resolve_alias(sets[i].substr(0, eq), s.pipeline.weights().table_id());
    } catch (const Error& e) {
      throw Error(ErrorCode::validation, e.what(), path + ".criterion");
    }
    int level = 0;
    try {
      level = std::stoi(sets[i].substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::validation, fmt::format("level in '{}' is not an integer", sets[i]), path + ".level");
    }
    interventions.push_back({criterion, level});
  }
  const auto report = valuation::what_if(s.pipeline, s.record, s.mode, interventions);

  std::string text = fmt::format("{} ({} chain)\n", report.assessment_id, to_string(report.mode));
  text += fmt::format("  final value {:.2f} -> {:.2f} ({:+.4f} combined)\n", report.before.final_value,
                      report.after.final_value, report.after.final_value - report.before.final_value);
  text += "  marginal deltas, each applied alone:\n";
  for (const auto& m : report.marginals) {
    text += fmt::format("    {:<36} L{}->L{}  capability {:+.4f}  adoption {:+.4f}  utility {:+.4f}  final {:+.4f}\n",
                        m.criterion, m.old_level, m.new_level, m.capability_delta, m.adoption_delta,
                        m.utility_delta, m.final_delta);
  }
  emit(to_json(report), text);
  return kOk;
}

int cmd_ahp_derive(const std::vector<std::string>& files, const std::string& method_name, double threshold) {
  std::vector<ahp::PairwiseMatrix> matrices;
  for (const auto& f : files) matrices.push_back(ahp::matrix_from_csv(read_file(f)));
  const auto matrix = matrices.size() == 1 ? matrices.front() : ahp::aggregate_experts(matrices);
  const auto method = ahp::parse_method(method_name);
  const auto weights = ahp::derive_weights(matrix, method);
  const auto cr = ahp::consistency(matrix, threshold);

  std::string text = fmt::format("{} matrix of order {} ({})\n", matrices.size() == 1 ? "single" : "aggregated",
                                 matrix.size(), to_string(method));
  for (std::size_t i = 0; i < weights.items.size(); ++i) {
    text += fmt::format("  {:<24} {:.6f}\n", weights.items[i], weights.weights[i]);
  }
  text += fmt::format("lambda_max {:.6f}  CI {:.4f}  RI {:.2f}  CR {:.4f}  {}\n", cr.lambda_max,
                      cr.consistency_index, cr.random_index, cr.consistency_ratio,
                      cr.acceptable ? "acceptable" : "not acceptable");
  emit({{"method", to_string(method)},
        {"matrix", to_json(matrix)},
        {"weights", to_json(weights)},
        {"consistency", to_json(cr)}},
       text);
  return kOk;
}

int cmd_delphi_round(const std::vector<std::string>& files, double threshold, bool ratings, int stability_bound) {
  delphi::StudySettings settings;
  settings.consensus_threshold = threshold;
  settings.stability_bound = stability_bound;
  delphi::DelphiStudy study("cli", settings);
  const auto kind = ratings ? delphi::SubmissionKind::ratings : delphi::SubmissionKind::rankings;
  for (const auto& f : files) {
    const int round = static_cast<int>(study.rounds().size()) + 1;
    study.run_round(round, delphi::submissions_from_csv(read_file(f), kind, round));
  }

  std::string text;
  Json rounds = Json::array();
  for (const auto& r : study.rounds()) {
    rounds.push_back(to_json(r));
    const auto& c = r.concordance;
    text += fmt::format("round {}: W = {:.4f} ({} experts, {} items{}) -> {}\n", r.round, c.w, c.n_experts,
                        c.n_items, c.tie_corrected ? ", tie-corrected" : "", r.status());
    for (const auto& item : r.ranking) {
      text += fmt::format("  {:>2}. {:<32} mean rank {:.2f}\n", item.position, item.item, item.mean_rank);
    }
    for (const auto& w : r.warnings) text += fmt::format("  warning: {}\n", w);
  }
  Json j = {{"rounds", rounds}, {"consensus_reached", study.consensus_reached()}};
  if (const auto s = study.latest_stability()) {
    j["stability"] = to_json(*s);
    text += fmt::format("stability rounds {}-{}: max shift {} (bound {}) -> {}\n", s->round_a, s->round_b,
                        s->max_rank_shift, s->bound, s->stable ? "stable" : "unstable");
  }
  emit(j, text);
  return kOk;
}

int cmd_reproduce() {
  const auto report = reproduce_case_studies();
  emit(to_json(report), format_report(report));
  return report.all_pass() ? kOk : kReproductionFailed;
}

const char* kConsistent3 =
    "perception,analysis,decision\n"
    "1,2,4\n"
    "1/2,1,2\n"
    "1/4,1/2,1\n";

int cmd_export(const std::string& dir) {
  fs::create_directories(dir);
  const auto put = [&](const std::string& name, const std::string& contents) {
    write_file((fs::path(dir) / name).string(), contents);
    if (!g_json) fmt::print("wrote {}\n", (fs::path(dir) / name).string());
  };
  put("framework.json", dump_canonical(to_json(canonical::framework())));
  put("weights_store.json", dump_canonical(to_json(canonical::store_weights())));
  put("weights_pv.json", dump_canonical(to_json(canonical::pv_weights())));
  put("assessment_retail.json", dump_canonical(to_json(canonical::retail_assessment())));
  put("assessment_pv.json", dump_canonical(to_json(canonical::pv_assessment())));
  put("consistent3.csv", kConsistent3);
  if (g_json) std::cout << dump_canonical({{"directory", dir}, {"written", 6}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TEMAI assessment engine"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "machine-readable JSON output");

  std::string framework_path, weights_path;
  auto* validate = app.add_subcommand("validate", "check a framework and weight table");
  validate->add_option("framework", framework_path, "framework JSON")->required();
  validate->add_option("weights", weights_path, "weight table JSON or built-in id");

  ScoreOptions score_opts;
  bool csv_out = false;
  auto* score = app.add_subcommand("score", "run the scoring pipeline on an assessment");
  add_score_options(score, score_opts);
  score->add_flag("--csv", csv_out, "stage table as CSV");

  ScoreOptions whatif_opts;
  std::vector<std::string> sets;
  auto* whatif = app.add_subcommand("whatif", "marginal deltas for level interventions");
  add_score_options(whatif, whatif_opts);
  whatif->add_option("--set", sets, "criterion=level (repeatable)")->required();

  auto* ahp_cmd = app.add_subcommand("ahp", "pairwise-comparison weights");
  ahp_cmd->require_subcommand(1);
  std::vector<std::string> matrix_files;
  std::string method = "eigenvector";
  double cr_threshold = ahp::kDefaultCrThreshold;
  auto* derive = ahp_cmd->add_subcommand("derive", "weights and consistency from matrix CSVs");
  derive->add_option("matrices", matrix_files, "one CSV per expert; several are aggregated")->required();
  derive->add_option("--method", method, "eigenvector or geometric_mean")
      ->check(CLI::IsMember({"eigenvector", "geometric_mean"}));
  derive->add_option("--cr-threshold", cr_threshold, "acceptable consistency ratio bound");

  auto* delphi_cmd = app.add_subcommand("delphi", "consensus rounds");
  delphi_cmd->require_subcommand(1);
  std::vector<std::string> round_files;
  double threshold = delphi::kDefaultConsensusThreshold;
  bool ratings = false;
  int stability_bound = delphi::kDefaultStabilityBound;
  auto* round = delphi_cmd->add_subcommand("round", "Kendall's W for one or more successive rounds");
  round->add_option("submissions", round_files, "expert_id,item_id,value CSV per round, in order")->required();
  round->add_option("--threshold", threshold, "consensus gate on W");
  round->add_flag("--ratings", ratings, "values are 1..5 ratings rather than rankings");
  round->add_option("--stability-bound", stability_bound, "largest tolerated position shift");

  auto* fixtures = app.add_subcommand("fixtures", "built-in case studies");
  fixtures->require_subcommand(1);
  auto* reproduce = fixtures->add_subcommand("reproduce", "compare both case studies with published values");
  std::string export_dir = "fixtures";
  auto* export_cmd = fixtures->add_subcommand("export", "write the fixture documents");
  export_cmd->add_option("dir", export_dir, "target directory");

  std::string config_path, data_dir;
  int port = -1;
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--port", port, "listen port (overrides config and PORT)");
  serve->add_option("--config", config_path, "JSON config file");
  serve->add_option("--data-dir", data_dir, "persistence directory (overrides config and DATA_DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(framework_path, weights_path);
    if (*score) return cmd_score(score_opts, csv_out);
    if (*whatif) return cmd_whatif(whatif_opts, sets);
    if (*derive) return cmd_ahp_derive(matrix_files, method, cr_threshold);
    if (*round) return cmd_delphi_round(round_files, threshold, ratings, stability_bound);
    if (*reproduce) return cmd_reproduce();
    if (*export_cmd) return cmd_export(export_dir);
    if (*serve) {
      auto config = store::Config::load(config_path);
      if (port >= 0) config.port = port;
      if (!data_dir.empty()) config.data_dir = data_dir;
      return api::run_server(config);
    }
  } catch (const Error& e) {
    if (g_json) {
      std::cout << dump_canonical(
          {{"code", to_string(e.code())}, {"message", e.what()}, {"field_path", e.field_path()}});
    } else {
      std::cerr << "error: " << e.what();
      if (!e.field_path().empty()) std::cerr << " (at " << e.field_path() << ")";
      std::cerr << '\n';
    }
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
