#include "temai/serialization.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "temai/error.hpp"

namespace temai {

namespace json_detail {

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : fmt::format("{}.{}", base, key);
}

std::string index_path(const std::string& base, std::size_t index) {
  return fmt::format("{}[{}]", base, index);
}

const Json& field(const Json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::parse, fmt::format("expected an object at '{}'", path.empty() ? "$" : path),
                path);
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::parse, fmt::format("missing field '{}'", join_path(path, key)),
                join_path(path, key));
  }
  return *it;
}

std::string string_field(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_string()) {
    throw Error(ErrorCode::parse, fmt::format("field '{}' must be a string", join_path(path, key)),
                join_path(path, key));
  }
  return v.get<std::string>();
}

int int_field(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::parse, fmt::format("field '{}' must be an integer", join_path(path, key)),
                join_path(path, key));
  }
  return v.get<int>();
}

double number_field(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = field(obj, key, path);
  if (!v.is_number()) {
    throw Error(ErrorCode::parse, fmt::format("field '{}' must be a number", join_path(path, key)),
                join_path(path, key));
  }
  return v.get<double>();
}

}  // namespace json_detail

using namespace json_detail;

void check_schema(const Json& doc, std::string_view kind) {
  if (!doc.is_object()) throw Error(ErrorCode::parse, "document must be a JSON object");
  auto it = doc.find("temai_schema");
  if (it == doc.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::schema_version, "document has no integer 'temai_schema' field",
                "temai_schema");
  }
  const int version = it->get<int>();
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::schema_version,
                fmt::format("unsupported schema version {} (this build reads version {})", version,
                            kSchemaVersion),
                "temai_schema");
  }
  if (!kind.empty()) {
    const std::string actual = string_field(doc, "kind", "");
    if (actual != kind) {
      throw Error(ErrorCode::parse, fmt::format("expected a '{}' document, got '{}'", kind, actual),
                  "kind");
    }
  }
}

Json to_json(const FrameworkDefinition& framework) {
  Json dims = Json::array();
  for (const auto& d : framework.dimensions()) {
    dims.push_back({{"id", to_string(d.id)}, {"display_name", d.display_name}});
  }
  Json comps = Json::array();
  for (const auto& c : framework.components()) {
    comps.push_back(
        {{"id", c.id}, {"dimension", to_string(c.dimension)}, {"display_name", c.display_name}});
  }
  Json crits = Json::array();
  for (const auto& c : framework.criteria()) {
    Json aliases = Json::array();
    for (const auto& a : c.aliases) aliases.push_back({{"table_id", a.table_id}, {"name", a.name}});
    crits.push_back({{"id", c.id},
                     {"component", c.component},
                     {"display_name", c.display_name},
                     {"aliases", std::move(aliases)}});
  }
  return {{"temai_schema", kSchemaVersion},
          {"kind", "framework"},
          {"id", framework.id()},
          {"dimensions", std::move(dims)},
          {"components", std::move(comps)},
          {"criteria", std::move(crits)}};
}

FrameworkDefinition framework_from_json(const Json& doc) {
  check_schema(doc, "framework");
  const Json& dims = field(doc, "dimensions", "");
  if (!dims.is_array() || dims.size() != 3) {
    throw Error(ErrorCode::validation, "a framework has exactly three dimensions", "dimensions");
  }
  std::array<Dimension, 3> dimensions;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto path = index_path("dimensions", i);
    dimensions[i] = Dimension{parse_dimension(string_field(dims[i], "id", path)),
                              string_field(dims[i], "display_name", path)};
    if (dimensions[i].id != kDimensions[i]) {
      throw Error(ErrorCode::validation,
                  "dimensions must be listed as capability, adoption, utility", path);
    }
  }
  std::vector<Component> components;
  const Json& comps = field(doc, "components", "");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto path = index_path("components", i);
    components.push_back(Component{string_field(comps[i], "id", path),
                                   parse_dimension(string_field(comps[i], "dimension", path)),
                                   string_field(comps[i], "display_name", path)});
  }
  std::vector<Criterion> criteria;
  const Json& crits = field(doc, "criteria", "");
  for (std::size_t i = 0; i < crits.size(); ++i) {
    const auto path = index_path("criteria", i);
    Criterion c{string_field(crits[i], "id", path), string_field(crits[i], "component", path),
                string_field(crits[i], "display_name", path), {}};
    if (auto it = crits[i].find("aliases"); it != crits[i].end()) {
      for (std::size_t k = 0; k < it->size(); ++k) {
        const auto apath = index_path(join_path(path, "aliases"), k);
        c.aliases.push_back(
            Alias{string_field((*it)[k], "table_id", apath), string_field((*it)[k], "name", apath)});
      }
    }
    criteria.push_back(std::move(c));
  }
  return FrameworkDefinition(string_field(doc, "id", ""), std::move(dimensions),
                             std::move(components), std::move(criteria));
}

Json to_json(const WeightTable& table) {
  Json entries = Json::object();
  for (const auto& [criterion, w] : table.entries()) entries[criterion] = w.to_string();
  return {{"temai_schema", kSchemaVersion},
          {"kind", "weight_table"},
          {"table_id", table.table_id()},
          {"sector", table.sector()},
          {"entries", std::move(entries)}};
}

WeightTable weight_table_from_json(const Json& doc) {
  check_schema(doc, "weight_table");
  std::map<std::string, Permyriad> entries;
  const Json& e = field(doc, "entries", "");
  if (!e.is_object()) throw Error(ErrorCode::parse, "'entries' must be an object", "entries");
  for (const auto& [criterion, value] : e.items()) {
    const auto path = join_path("entries", criterion);
    if (!value.is_string()) {
      throw Error(ErrorCode::parse,
                  fmt::format("weight '{}' must be a decimal string such as \"1888.89\"", path), path);
    }
    try {
      entries.emplace(criterion, Permyriad::parse(value.get<std::string>()));
    } catch (const Error& err) {
      throw Error(err.code(), err.what(), path);
    }
  }
  return WeightTable(string_field(doc, "table_id", ""), string_field(doc, "sector", ""),
                     std::move(entries));
}

Json to_json(const AssessmentRecord& record) {
  Json ratings = Json::array();
  for (const auto& r : record.ratings()) {
    ratings.push_back({{"criterion", r.criterion()}, {"level", r.level()}});
  }
  Json provenance = Json::object();
  for (const auto& [criterion, p] : record.provenance()) provenance[criterion] = to_string(p);
  const auto& m = record.meta();
  return {{"temai_schema", kSchemaVersion},
          {"kind", "assessment"},
          {"assessment_id", m.assessment_id},
          {"framework", m.framework_id},
          {"weight_table", m.weight_table},
          {"sector", m.sector},
          {"created_at", format_timestamp(m.created_at)},
          {"ratings", std::move(ratings)},
          {"provenance", std::move(provenance)}};
}

AssessmentRecord assessment_from_json(const Json& doc) {
  check_schema(doc, "assessment");
  AssessmentMetadata meta;
  meta.assessment_id = string_field(doc, "assessment_id", "");
  meta.framework_id = string_field(doc, "framework", "");
  meta.weight_table = string_field(doc, "weight_table", "");
  meta.sector = doc.contains("sector") ? string_field(doc, "sector", "") : std::string{};
  try {
    meta.created_at = parse_timestamp(string_field(doc, "created_at", ""));
  } catch (const Error& err) {
    throw Error(err.code(), err.what(), "created_at");
  }

  std::vector<LevelRating> ratings;
  const Json& rs = field(doc, "ratings", "");
  if (!rs.is_array()) throw Error(ErrorCode::parse, "'ratings' must be an array", "ratings");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto path = index_path("ratings", i);
    const std::string criterion = string_field(rs[i], "criterion", path);
    const int level = int_field(rs[i], "level", path);
    try {
      ratings.emplace_back(criterion, level);
    } catch (const Error& err) {
      throw Error(err.code(), err.what(), join_path(path, "level"));
    }
  }
  std::map<std::string, Provenance> provenance;
  if (auto it = doc.find("provenance"); it != doc.end()) {
    for (const auto& [criterion, value] : it->items()) {
      const auto path = join_path("provenance", criterion);
      if (!value.is_string()) throw Error(ErrorCode::parse, "provenance must be a string", path);
      try {
        provenance.emplace(criterion, parse_provenance(value.get<std::string>()));
      } catch (const Error& err) {
        throw Error(err.code(), err.what(), path);
      }
    }
  }
  return AssessmentRecord(std::move(meta), std::move(ratings), std::move(provenance));
}

std::string dump_canonical(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw Error(ErrorCode::parse, fmt::format("invalid JSON: {}", err.what()));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::not_found, fmt::format("cannot write '{}'", path));
  out << contents;
  if (!out) throw Error(ErrorCode::not_found, fmt::format("failed writing '{}'", path));
}

}  // namespace temai
