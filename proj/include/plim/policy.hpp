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

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "plim/errors.hpp"

namespace plim::policy {

enum class NoiseMechanism { kLaplace, kGaussian };

// Calibration for a noised field. delta is meaningful (and required) only for
// the Gaussian mechanism. sensitivity defaults to 1.0.
struct NoiseSpec {
  NoiseMechanism mechanism = NoiseMechanism::kLaplace;
  double epsilon = 1.0;
  std::optional<double> delta;
  double sensitivity = 1.0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// The effective field rules for one (service, purpose) pair. A field name may
// appear in at most one of the four categories; anything unlisted is
// suppressed by the enforcement point.
struct PurposeRule {
  std::string purpose;
  std::set<std::string> allowed;
  std::map<std::string, double> generalized;  // field -> bucket width / prefix length
  std::map<std::string, NoiseSpec> noised;
  std::map<std::string, double> reduced;      // field -> divisor / prefix length

  bool mentions(const std::string& field) const {
    return allowed.count(field) > 0 || generalized.count(field) > 0 ||
           noised.count(field) > 0 || reduced.count(field) > 0;
  }

  friend bool operator==(const PurposeRule&, const PurposeRule&) = default;
};

struct ServicePolicy {
  std::string name;
  std::vector<PurposeRule> purposes;

  friend bool operator==(const ServicePolicy&, const ServicePolicy&) = default;
};

// The system-wide machine-readable policy (the PAP artifact). Immutable after
// construction; safe to share across request handlers.
struct PolicyDocument {
  std::vector<ServicePolicy> services;

  friend bool operator==(const PolicyDocument&, const PolicyDocument&) = default;
};

// Parses and validates a UTF-8 JSON policy. Unknown keys are rejected.
// Throws SyntaxError, SchemaError, ConflictError or ParamError.
PolicyDocument parse_policy(std::string_view text);

// Canonical JSON serialization; parse(serialize(doc)) == doc.
std::string serialize_policy(const PolicyDocument& doc);

// Resolves the unique rule for (service, purpose). Throws NotFoundError.
const PurposeRule& lookup_rule(const PolicyDocument& doc,
                               const std::string& service,
                               const std::string& purpose);

// The four-category object used both inside policy files and as the "policy"
// token claim. Empty categories are omitted on output and default to empty on
// input.
nlohmann::ordered_json rule_to_json(const PurposeRule& rule);
PurposeRule rule_from_json(const nlohmann::json& categories, std::string purpose);

// ---- schema linting ---------------------------------------------------------

enum class FieldKind {
  kInteger,
  kUnsignedInteger,
  kFloat,
  kString,
  kBool,
  kBytes,
  kNested,
  kRepeated,
};

const char* field_kind_name(FieldKind kind);
std::optional<FieldKind> field_kind_from_name(std::string_view name);

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::kString;
};

enum class WarningKind {
  kUnknownField,        // rule names a field absent from the catalog
  kUntransformable,     // minimizer applied to a kind it cannot transform
  kStringNoise,         // noising a string value suppresses it
  kDefaultSuppressed,   // catalog field unmentioned; suppressed by default
};

struct Warning {
  WarningKind kind;
  std::string field;
  std::string message;
};

// Lints a rule against the top-level fields of a message schema. Never throws;
// every finding is a warning.
std::vector<Warning> validate_against_schema(const PurposeRule& rule,
                                             const std::vector<FieldSpec>& field_catalog);

}  // namespace plim::policy
