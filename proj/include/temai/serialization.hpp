#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "temai/framework.hpp"

namespace temai {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Throws a schema_version error unless doc["temai_schema"] == 1, and a parse
/// error when `kind` is given and doc["kind"] differs.
void check_schema(const Json& doc, std::string_view kind = {});

Json to_json(const FrameworkDefinition& framework);
Json to_json(const WeightTable& table);
Json to_json(const AssessmentRecord& record);

FrameworkDefinition framework_from_json(const Json& doc);
WeightTable weight_table_from_json(const Json& doc);
AssessmentRecord assessment_from_json(const Json& doc);

/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const Json& doc);

Json parse_json(std::string_view text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

namespace json_detail {
// Field accessors that raise parse errors carrying a field path.
const Json& field(const Json& obj, std::string_view key, const std::string& path);
std::string string_field(const Json& obj, std::string_view key, const std::string& path);
int int_field(const Json& obj, std::string_view key, const std::string& path);
double number_field(const Json& obj, std::string_view key, const std::string& path);
std::string join_path(const std::string& base, std::string_view key);
std::string index_path(const std::string& base, std::size_t index);
}  // namespace json_detail

}  // namespace temai
