// Copyright 2026 The plim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plim/policy.hpp"

#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace plim::policy {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw SchemaError(where + " must be a JSON object");
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (known.count(item.key()) == 0) {
      throw SchemaError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

double require_number(const json& j, const std::string& where) {
  // Booleans are arithmetic in nlohmann's type model; exclude them explicitly.
  if (!j.is_number() || j.is_boolean()) {
    throw SchemaError(where + " must be a number");
  }
  return j.get<double>();
}

double parse_category_param(const json& j, const std::string& where) {
  double value = require_number(j, where);
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParamError(where + " must be strictly positive, got " + j.dump());
  }
  return value;
}

NoiseSpec parse_noise_spec(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(j, {"mechanism", "epsilon", "delta", "sensitivity"}, where);

  NoiseSpec spec;
  if (!j.contains("mechanism") || !j.at("mechanism").is_string()) {
    throw SchemaError(where + " requires a string 'mechanism'");
  }
  const std::string mechanism = j.at("mechanism").get<std::string>();
  if (mechanism == "laplace") {
    spec.mechanism = NoiseMechanism::kLaplace;
  } else if (mechanism == "gaussian") {
    spec.mechanism = NoiseMechanism::kGaussian;
  } else {
    throw SchemaError(where + " mechanism must be 'laplace' or 'gaussian', got '" +
                      mechanism + "'");
  }

  if (!j.contains("epsilon")) {
    throw SchemaError(where + " requires 'epsilon'");
  }
  spec.epsilon = require_number(j.at("epsilon"), where + ".epsilon");
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) {
    throw ParamError(where + ".epsilon must be strictly positive");
  }

  if (spec.mechanism == NoiseMechanism::kGaussian) {
    if (!j.contains("delta")) {
      throw ParamError(where + " requires 'delta' for the gaussian mechanism");
    }
  } else if (j.contains("delta")) {
    throw ParamError(where + ".delta is only valid for the gaussian mechanism");
  }
  if (j.contains("delta")) {
    double delta = require_number(j.at("delta"), where + ".delta");
    if (!(delta > 0.0 && delta < 1.0)) {
      throw ParamError(where + ".delta must lie in (0,1)");
    }
    spec.delta = delta;
  }

  if (j.contains("sensitivity")) {
    spec.sensitivity = require_number(j.at("sensitivity"), where + ".sensitivity");
    if (!(spec.sensitivity > 0.0) || !std::isfinite(spec.sensitivity)) {
      throw ParamError(where + ".sensitivity must be strictly positive");
    }
  }
  return spec;
}

void check_single_category(const PurposeRule& rule, const std::string& where) {
  std::unordered_map<std::string, int> seen;
  for (const auto& f : rule.allowed) seen[f]++;
  for (const auto& [f, _] : rule.generalized) seen[f]++;
  for (const auto& [f, _] : rule.noised) seen[f]++;
  for (const auto& [f, _] : rule.reduced) seen[f]++;
  for (const auto& [field, count] : seen) {
    if (count > 1) {
      throw ConflictError("field '" + field + "' appears in " +
                          std::to_string(count) + " categories of " + where);
    }
  }
}

PurposeRule parse_rule_categories(const json& j, std::string purpose,
                                  const std::string& where) {
  PurposeRule rule;
  rule.purpose = std::move(purpose);

  if (j.contains("allowed")) {
    const json& allowed = j.at("allowed");
    if (!allowed.is_array()) {
      throw SchemaError(where + ".allowed must be an array of field names");
    }
    for (const auto& entry : allowed) {
      if (!entry.is_string()) {
        throw SchemaError(where + ".allowed entries must be strings");
      }
      rule.allowed.insert(entry.get<std::string>());
    }
  }
  for (const char* category : {"generalized", "reduced"}) {
    if (!j.contains(category)) continue;
    const json& cat = j.at(category);
    require_object(cat, where + "." + category);
    for (const auto& item : cat.items()) {
      double param = parse_category_param(
          item.value(), where + "." + category + "." + item.key());
      if (std::string(category) == "generalized") {
        rule.generalized[item.key()] = param;
      } else {
        rule.reduced[item.key()] = param;
      }
    }
  }
  if (j.contains("noised")) {
    const json& noised = j.at("noised");
    require_object(noised, where + ".noised");
    for (const auto& item : noised.items()) {
      rule.noised[item.key()] =
          parse_noise_spec(item.value(), where + ".noised." + item.key());
    }
  }

  check_single_category(rule, where);
  return rule;
}

PurposeRule parse_purpose(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(j, {"name", "allowed", "generalized", "noised", "reduced"},
                      where);
  if (!j.contains("name") || !j.at("name").is_string()) {
    throw SchemaError(where + " requires a string 'name'");
  }
  return parse_rule_categories(j, j.at("name").get<std::string>(), where);
}

ordered_json noise_spec_to_json(const NoiseSpec& spec) {
  ordered_json j;
  j["mechanism"] = spec.mechanism == NoiseMechanism::kLaplace ? "laplace" : "gaussian";
  j["epsilon"] = spec.epsilon;
  if (spec.delta) j["delta"] = *spec.delta;
  j["sensitivity"] = spec.sensitivity;
  return j;
}

}  // namespace

PolicyDocument parse_policy(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("malformed JSON: ") + e.what());
  }

  require_object(root, "policy document");
  reject_unknown_keys(root, {"services"}, "policy document");
  if (!root.contains("services") || !root.at("services").is_array()) {
    throw SchemaError("policy document requires a 'services' array");
  }
  const json& services = root.at("services");
  if (services.empty()) {
    throw SchemaError("policy document must list at least one service");
  }

  PolicyDocument doc;
  std::unordered_set<std::string> service_names;
  for (const json& js : services) {
    require_object(js, "service");
    reject_unknown_keys(js, {"name", "purposes"}, "service");
    if (!js.contains("name") || !js.at("name").is_string()) {
      throw SchemaError("service requires a string 'name'");
    }
    ServicePolicy service;
    service.name = js.at("name").get<std::string>();
    if (!service_names.insert(service.name).second) {
      throw SchemaError("duplicate service name '" + service.name + "'");
    }
    if (!js.contains("purposes") || !js.at("purposes").is_array()) {
      throw SchemaError("service '" + service.name + "' requires a 'purposes' array");
    }
    std::unordered_set<std::string> purpose_names;
    for (const json& jp : js.at("purposes")) {
      PurposeRule rule = parse_purpose(jp, "service '" + service.name + "' purpose");
      if (!purpose_names.insert(rule.purpose).second) {
        throw SchemaError("duplicate purpose '" + rule.purpose + "' in service '" +
                          service.name + "'");
      }
      service.purposes.push_back(std::move(rule));
    }
    doc.services.push_back(std::move(service));
  }
  return doc;
}

nlohmann::ordered_json rule_to_json(const PurposeRule& rule) {
  ordered_json j = ordered_json::object();
  if (!rule.allowed.empty()) {
    j["allowed"] = rule.allowed;
  }
  if (!rule.generalized.empty()) {
    j["generalized"] = rule.generalized;
  }
  if (!rule.noised.empty()) {
    ordered_json noised = ordered_json::object();
    for (const auto& [field, spec] : rule.noised) {
      noised[field] = noise_spec_to_json(spec);
    }
    j["noised"] = std::move(noised);
  }
  if (!rule.reduced.empty()) {
    j["reduced"] = rule.reduced;
  }
  return j;
}

PurposeRule rule_from_json(const nlohmann::json& categories, std::string purpose) {
  require_object(categories, "rule");
  reject_unknown_keys(categories, {"allowed", "generalized", "noised", "reduced"},
                      "rule");
  return parse_rule_categories(categories, std::move(purpose), "rule");
}

std::string serialize_policy(const PolicyDocument& doc) {
  ordered_json root;
  root["services"] = ordered_json::array();
  for (const ServicePolicy& service : doc.services) {
    ordered_json js;
    js["name"] = service.name;
    js["purposes"] = ordered_json::array();
    for (const PurposeRule& rule : service.purposes) {
      ordered_json jp;
      jp["name"] = rule.purpose;
      ordered_json categories = rule_to_json(rule);
      for (auto& item : categories.items()) {
        jp[item.key()] = std::move(item.value());
      }
      js["purposes"].push_back(std::move(jp));
    }
    root["services"].push_back(std::move(js));
  }
  return root.dump(2) + "\n";
}

const PurposeRule& lookup_rule(const PolicyDocument& doc, const std::string& service,
                               const std::string& purpose) {
  for (const ServicePolicy& s : doc.services) {
    if (s.name != service) continue;
    for (const PurposeRule& rule : s.purposes) {
      if (rule.purpose == purpose) return rule;
    }
    throw NotFoundError("purpose not found: '" + purpose + "' in service '" +
                        service + "'");
  }
  throw NotFoundError("service not found: '" + service + "'");
}

const char* field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::kInteger: return "integer";
    case FieldKind::kUnsignedInteger: return "unsigned-integer";
    case FieldKind::kFloat: return "float";
    case FieldKind::kString: return "string";
    case FieldKind::kBool: return "bool";
    case FieldKind::kBytes: return "bytes";
    case FieldKind::kNested: return "nested";
    case FieldKind::kRepeated: return "repeated";
  }
  return "unknown";
}

std::optional<FieldKind> field_kind_from_name(std::string_view name) {
  static const std::map<std::string_view, FieldKind> kNames = {
      {"integer", FieldKind::kInteger},
      {"unsigned-integer", FieldKind::kUnsignedInteger},
      {"float", FieldKind::kFloat},
      {"string", FieldKind::kString},
      {"bool", FieldKind::kBool},
      {"bytes", FieldKind::kBytes},
      {"nested", FieldKind::kNested},
      {"repeated", FieldKind::kRepeated},
  };
  auto it = kNames.find(name);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

namespace {

bool minimizable(FieldKind kind) {
  return kind == FieldKind::kInteger || kind == FieldKind::kUnsignedInteger ||
         kind == FieldKind::kFloat || kind == FieldKind::kString;
}

}  // namespace

std::vector<Warning> validate_against_schema(const PurposeRule& rule,
                                             const std::vector<FieldSpec>& field_catalog) {
  std::vector<Warning> warnings;
  std::map<std::string, FieldKind> catalog;
  for (const FieldSpec& spec : field_catalog) {
    catalog[spec.name] = spec.kind;
  }

  auto check_field = [&](const std::string& field, const char* category,
                         bool is_noise) {
    auto it = catalog.find(field);
    if (it == catalog.end()) {
      warnings.push_back({WarningKind::kUnknownField, field,
                          "field '" + field + "' (" + category +
                              ") is not part of the message schema"});
      return;
    }
    FieldKind kind = it->second;
    if (!minimizable(kind)) {
      warnings.push_back({WarningKind::kUntransformable, field,
                          std::string("cannot ") + category + " field '" + field +
                              "' of kind " + field_kind_name(kind) +
                              "; it will be suppressed"});
    } else if (is_noise && kind == FieldKind::kString) {
      warnings.push_back({WarningKind::kStringNoise, field,
                          "noising string field '" + field +
                              "' suppresses it to an empty string"});
    }
  };

  for (const auto& field : rule.allowed) {
    if (catalog.find(field) == catalog.end()) {
      warnings.push_back({WarningKind::kUnknownField, field,
                          "field '" + field +
                              "' (allowed) is not part of the message schema"});
    }
  }
  for (const auto& [field, _] : rule.generalized) check_field(field, "generalize", false);
  for (const auto& [field, _] : rule.noised) check_field(field, "noise", true);
  for (const auto& [field, _] : rule.reduced) check_field(field, "reduce", false);

  for (const FieldSpec& spec : field_catalog) {
    if (!rule.mentions(spec.name)) {
      warnings.push_back({WarningKind::kDefaultSuppressed, spec.name,
                          "field '" + spec.name +
                              "' is not documented in any category and will be "
                              "suppressed by default"});
    }
  }
  return warnings;
}

}  // namespace plim::policy
