#pragma once

// Configuration schema (kept identical to schema/config.schema.json) and a
// validator for the subset of JSON Schema it uses: type, enum, properties,
// required, additionalProperties, items, minItems, maxItems, minimum, maximum
// and local "#/definitions/..." references.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace strichartz::schema {

inline const nlohmann::json& config_schema() {
  static const nlohmann::json s = nlohmann::json::parse(R"json({"$schema":"http://json-schema.org/draft-07/schema#","title":"strichartz run configuration","type":"object","additionalProperties":false,"required":["subcommand"],"definitions":{"dyadic_list":{"type":"array","minItems":1,"items":{"type":"integer","minimum":1}},"int_list":{"type":"array","minItems":1,"items":{"type":"integer","minimum":1}},"kinds":{"type":"array","minItems":1,"items":{"type":"string","enum":["flat","random"]}}},"properties":{"subcommand":{"type":"string","enum":["norm","counterexample","mcount","weyl","majorarc","scan","levelset","extremize","scaling","identities"]},"seed":{"type":"integer","minimum":0},"shards":{"type":"integer","minimum":1,"maximum":256},"eps":{"type":"number","minimum":0,"maximum":1},"out":{"type":"string"},"strict":{"type":"boolean"},"timing":{"type":"boolean"},"norm":{"type":"object","additionalProperties":false,"required":["input"],"properties":{"input":{"type":"string"},"p":{"type":"integer","minimum":2,"maximum":16},"mode":{"type":"string","enum":["auto","exact","sampled"]},"t_samples":{"type":"integer","minimum":16},"shifts":{"type":"integer","minimum":8}}},"counterexample":{"type":"object","additionalProperties":false,"properties":{"N":{"$ref":"#/definitions/dyadic_list"}}},"mcount":{"type":"object","additionalProperties":false,"properties":{"N":{"$ref":"#/definitions/dyadic_list"},"fixture":{"type":"string"}}},"weyl":{"type":"object","additionalProperties":false,"properties":{"p":{"$ref":"#/definitions/int_list"},"Q":{"type":"integer","minimum":2},"draws":{"type":"integer","minimum":1,"maximum":64}}},"majorarc":{"type":"object","additionalProperties":false,"properties":{"Q":{"$ref":"#/definitions/dyadic_list"},"gamma_factor":{"type":"integer","minimum":1},"kernel_cells":{"type":"array","items":{"type":"array","minItems":2,"maxItems":2,"items":{"type":"integer","minimum":1}}},"kernel_lambda":{"$ref":"#/definitions/int_list"}}},"scan":{"type":"object","additionalProperties":false,"properties":{"L":{"$ref":"#/definitions/dyadic_list"},"N":{"$ref":"#/definitions/dyadic_list"},"lambda":{"$ref":"#/definitions/int_list"},"data":{"$ref":"#/definitions/kinds"},"draws":{"type":"integer","minimum":1},"t_samples":{"type":"integer","minimum":16},"shifts":{"type":"integer","minimum":8}}},"levelset":{"type":"object","additionalProperties":false,"properties":{"L":{"$ref":"#/definitions/dyadic_list"},"N":{"$ref":"#/definitions/dyadic_list"},"lambda":{"$ref":"#/definitions/int_list"},"data":{"$ref":"#/definitions/kinds"},"T":{"type":"integer","minimum":64},"X":{"type":"integer","minimum":64}}},"extremize":{"type":"object","additionalProperties":false,"properties":{"N":{"$ref":"#/definitions/int_list"},"p":{"type":"integer","enum":[4,6,8,10,12,14,16]},"restarts":{"type":"integer","minimum":1},"max_iters":{"type":"integer","minimum":0},"tolerance":{"type":"number","minimum":0},"ascent_max_N":{"type":"integer","minimum":0},"dump":{"type":"string"}}},"scaling":{"type":"object","additionalProperties":false,"properties":{"lambda":{"$ref":"#/definitions/int_list"},"s":{"type":"number","minimum":0.5,"maximum":1},"input":{"type":"string"}}},"identities":{"type":"object","additionalProperties":false,"properties":{"samples":{"type":"integer","minimum":1},"N1":{"type":"number","minimum":1},"N":{"type":"number","minimum":1}}}}})json");
  return s;
}

namespace detail {

inline bool has_type(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  return false;
}

inline const nlohmann::json& resolve(const nlohmann::json& root, const nlohmann::json& node) {
  if (!node.is_object() || !node.contains("$ref")) return node;
  const auto ref = node.at("$ref").get<std::string>();
  return root.at(nlohmann::json::json_pointer(ref.substr(1)));
}

inline std::optional<std::string> check(const nlohmann::json& root, const nlohmann::json& raw, const nlohmann::json& v, const std::string& path) {
  const auto& s = resolve(root, raw);
  const std::string where = path.empty() ? "/" : path;
  if (s.contains("type") && !has_type(v, s.at("type").get<std::string>()))
    return where + ": expected " + s.at("type").get<std::string>();
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s.at("enum")) found = found || e == v;
    if (!found) return where + ": value " + v.dump() + " is not one of " + s.at("enum").dump();
  }
  if (v.is_number()) {
    if (s.contains("minimum") && v.get<double>() < s.at("minimum").get<double>()) return where + ": below minimum " + s.at("minimum").dump();
    if (s.contains("maximum") && v.get<double>() > s.at("maximum").get<double>()) return where + ": above maximum " + s.at("maximum").dump();
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s.at("minItems").get<std::size_t>()) return where + ": fewer than " + s.at("minItems").dump() + " items";
    if (s.contains("maxItems") && v.size() > s.at("maxItems").get<std::size_t>()) return where + ": more than " + s.at("maxItems").dump() + " items";
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        if (auto e = check(root, s.at("items"), v[i], path + "/" + std::to_string(i))) return e;
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s.at("required"))
        if (!v.contains(r.get<std::string>())) return where + ": missing required property '" + r.get<std::string>() + "'";
    const auto props = s.value("properties", nlohmann::json::object());
    for (const auto& [key, val] : v.items()) {
      if (props.contains(key)) {
        if (auto e = check(root, props.at(key), val, path + "/" + key)) return e;
      } else if (s.contains("additionalProperties") && s.at("additionalProperties") == false) {
        return where + ": unknown property '" + key + "'";
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// First violation as "<json pointer>: <reason>", or nullopt when valid.
inline std::optional<std::string> validate(const nlohmann::json& doc, const nlohmann::json& schema = config_schema()) {
  return detail::check(schema, schema, doc, "");
}

}  // namespace strichartz::schema
