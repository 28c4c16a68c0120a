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

// plim: key generation, token minting/verification, policy validation and
// offline minimization preview.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "plim/enforce.hpp"
#include "plim/errors.hpp"
#include "plim/policy.hpp"
#include "plim/preview.hpp"
#include "plim/token.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw plim::IoError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw plim::IoError("cannot write '" + path + "'");
  out << content;
  if (!out.good()) throw plim::IoError("cannot write '" + path + "'");
}

int64_t now_or(std::optional<int64_t> now) {
  return now ? *now : static_cast<int64_t>(std::time(nullptr));
}

plim::token::SignAlgorithm parse_algorithm(const std::string& name) {
  if (name == "rsa") return plim::token::SignAlgorithm::kRS256;
  if (name == "ecdsa") return plim::token::SignAlgorithm::kES256;
  throw plim::ParamError("unknown algorithm '" + name + "'; expected rsa or ecdsa");
}

int cmd_keygen(const std::string& algorithm, const std::string& out_dir, bool as_json) {
  plim::token::GeneratedKeyPair pair =
      plim::token::generate_key_pair(parse_algorithm(algorithm));
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::string private_path = (std::filesystem::path(out_dir) / "private.pem").string();
  std::string public_path = (std::filesystem::path(out_dir) / "public.pem").string();
  write_file(private_path, pair.private_pem);
  write_file(public_path, pair.public_pem);
  if (as_json) {
    ordered_json out;
    out["private_key"] = private_path;
    out["public_key"] = public_path;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "wrote " << private_path << " and " << public_path << "\n";
  }
  return 0;
}

int cmd_mint(const std::string& policy_path, const std::string& service,
             const std::string& purpose, const std::string& key_path,
             double expiration_hours, std::optional<int64_t> now, bool as_json) {
  plim::policy::PolicyDocument doc = plim::policy::parse_policy(read_file(policy_path));
  plim::token::SigningKey key = plim::token::SigningKey::from_pem_file(key_path);
  std::string compact =
      plim::token::mint_token(doc, service, purpose, key, expiration_hours, now_or(now));
  if (as_json) {
    ordered_json out;
    out["token"] = compact;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << compact << "\n";
  }
  return 0;
}

ordered_json claims_to_json(const plim::token::PolicyClaims& claims) {
  ordered_json out;
  out["service"] = claims.service;
  out["purpose"] = claims.purpose;
  out["issued_at"] = claims.issued_at;
  out["expires_at"] = claims.expires_at;
  out["policy"] = plim::policy::rule_to_json(claims.rule);
  return out;
}

int cmd_verify(const std::string& token_arg, const std::string& token_file,
               const std::string& key_path, std::optional<int64_t> now, bool as_json) {
  std::string compact = token_arg;
  if (compact.empty() && !token_file.empty()) {
    compact = read_file(token_file);
    while (!compact.empty() && (compact.back() == '\n' || compact.back() == '\r')) {
      compact.pop_back();
    }
  }
  if (compact.empty()) {
    throw plim::ParamError("provide the token via --token or --token-file");
  }
  plim::token::VerifyKey key = plim::token::VerifyKey::from_pem_file(key_path);
  plim::token::PolicyClaims claims = plim::token::verify_token(compact, key, now_or(now));
  if (as_json) {
    std::cout << claims_to_json(claims).dump(2) << "\n";
  } else {
    std::cout << "valid token for service '" << claims.service << "', purpose '"
              << claims.purpose << "', expires at " << claims.expires_at << "\n";
  }
  return 0;
}

std::vector<plim::policy::FieldSpec> load_catalog(const std::string& path) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw plim::SyntaxError("malformed schema catalog: " + std::string(e.what()));
  }
  if (!root.is_object() || !root.contains("fields") || !root.at("fields").is_object()) {
    throw plim::SchemaError("schema catalog requires a 'fields' object");
  }
  std::vector<plim::policy::FieldSpec> catalog;
  for (const auto& item : root.at("fields").items()) {
    if (!item.value().is_string()) {
      throw plim::SchemaError("schema catalog kinds must be strings");
    }
    auto kind = plim::policy::field_kind_from_name(item.value().get<std::string>());
    if (!kind) {
      throw plim::SchemaError("unknown field kind '" +
                              item.value().get<std::string>() + "' for field '" +
                              item.key() + "'");
    }
    catalog.push_back({item.key(), *kind});
  }
  return catalog;
}

int cmd_validate(const std::string& policy_path, const std::string& schema_path,
                 bool as_json) {
  std::string text = read_file(policy_path);
  plim::policy::PolicyDocument doc;
  try {
    doc = plim::policy::parse_policy(text);
  } catch (const plim::Error& e) {
    if (as_json) {
      ordered_json out;
      out["errors"] = json::array({std::string(e.kind()) + ": " + e.what()});
      out["warnings"] = json::array();
      std::cout << out.dump(2) << "\n";
      return 1;
    }
    throw;
  }

  std::vector<std::string> warnings;
  if (!schema_path.empty()) {
    std::vector<plim::policy::FieldSpec> catalog = load_catalog(schema_path);
    for (const auto& service : doc.services) {
      for (const auto& rule : service.purposes) {
        for (const auto& warning :
             plim::policy::validate_against_schema(rule, catalog)) {
          warnings.push_back(service.name + "/" + rule.purpose + ": " + warning.message);
        }
      }
    }
  }

  if (as_json) {
    ordered_json out;
    out["errors"] = json::array();
    out["warnings"] = warnings;
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& warning : warnings) std::cout << "warning: " << warning << "\n";
    std::cout << "OK: " << policy_path << " (" << doc.services.size() << " service"
              << (doc.services.size() == 1 ? "" : "s") << ")\n";
  }
  return 0;
}

int cmd_preview(const std::string& policy_path, const std::string& service,
                const std::string& purpose, const std::string& message_path,
                uint64_t seed) {
  plim::policy::PolicyDocument doc = plim::policy::parse_policy(read_file(policy_path));
  const plim::policy::PurposeRule& rule = plim::policy::lookup_rule(doc, service, purpose);
  plim::enforce::CompiledRule compiled = plim::enforce::CompiledRule::from_rule(rule);

  ordered_json message;
  try {
    message = ordered_json::parse(read_file(message_path));
  } catch (const json::parse_error& e) {
    throw plim::SyntaxError("malformed message JSON: " + std::string(e.what()));
  }
  ordered_json minimized = plim::preview::minimize_flat_json(message, compiled, seed);
  std::cout << minimized.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Purpose limitation and data minimization toolkit"};
  app.require_subcommand(1);

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Generate a dev-only PEM key pair");
  std::string algorithm = "rsa";
  std::string out_dir = ".";
  bool keygen_json = false;
  keygen->add_option("--algorithm", algorithm, "rsa or ecdsa")
      ->check(CLI::IsMember({"rsa", "ecdsa"}));
  keygen->add_option("--out-dir", out_dir, "Output directory")->required();
  keygen->add_flag("--json", keygen_json, "JSON output");

  // mint
  auto* mint = app.add_subcommand("mint", "Mint a signed policy token");
  std::string policy_path, service, purpose, key_path;
  double expiration_hours = 1.0;
  std::optional<int64_t> mint_now;
  bool mint_json = false;
  mint->add_option("--policy", policy_path, "Policy JSON file")->required();
  mint->add_option("--service", service, "Service name")->required();
  mint->add_option("--purpose", purpose, "Purpose name")->required();
  mint->add_option("--key", key_path, "PEM private key")->required();
  mint->add_option("--expiration-hours", expiration_hours, "Token lifetime in hours")
      ->required();
  mint->add_option("--now", mint_now, "Override issuance time (unix seconds)");
  mint->add_flag("--json", mint_json, "JSON output");

  // verify
  auto* verify = app.add_subcommand("verify", "Verify a policy token");
  std::string token_arg, token_file, verify_key_path;
  std::optional<int64_t> verify_now;
  bool verify_json = false;
  verify->add_option("--token", token_arg, "Compact token");
  verify->add_option("--token-file", token_file, "File holding the compact token");
  verify->add_option("--key", verify_key_path, "PEM public key")->required();
  verify->add_option("--now", verify_now, "Override verification time (unix seconds)");
  verify->add_flag("--json", verify_json, "JSON output");

  // validate
  auto* validate = app.add_subcommand("validate", "Parse and lint a policy");
  std::string validate_policy, schema_path;
  bool validate_json = false;
  validate->add_option("--policy", validate_policy, "Policy JSON file")->required();
  validate->add_option("--schema", schema_path,
                       "Field catalog JSON ({\"fields\": {name: kind}})");
  validate->add_flag("--json", validate_json, "JSON output");

  // preview
  auto* preview = app.add_subcommand(
      "preview", "Minimize a flat JSON message offline, exactly as the interceptor would");
  std::string preview_policy, preview_service, preview_purpose, message_path;
  uint64_t seed = 0;
  preview->add_option("--policy", preview_policy, "Policy JSON file")->required();
  preview->add_option("--service", preview_service, "Service name")->required();
  preview->add_option("--purpose", preview_purpose, "Purpose name")->required();
  preview->add_option("--message", message_path, "Flat JSON object of scalars")
      ->required();
  preview->add_option("--seed", seed, "Noise seed (deterministic output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (keygen->parsed()) return cmd_keygen(algorithm, out_dir, keygen_json);
    if (mint->parsed()) {
      return cmd_mint(policy_path, service, purpose, key_path, expiration_hours,
                      mint_now, mint_json);
    }
    if (verify->parsed()) {
      return cmd_verify(token_arg, token_file, verify_key_path, verify_now, verify_json);
    }
    if (validate->parsed()) return cmd_validate(validate_policy, schema_path, validate_json);
    if (preview->parsed()) {
      return cmd_preview(preview_policy, preview_service, preview_purpose, message_path,
                         seed);
    }
  } catch (const plim::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
