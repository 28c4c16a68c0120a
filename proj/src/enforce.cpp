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

#include "plim/enforce.hpp"

#include <cctype>
#include <ctime>
#include <limits>
#include <random>

#include <google/protobuf/descriptor.h>

namespace plim::enforce {

namespace {

using google::protobuf::FieldDescriptor;
using google::protobuf::Message;
using google::protobuf::Reflection;
using minimize::FieldAction;
using minimize::ScalarValue;
using rpc::RpcStatus;

const FieldAction kSuppressDefault = minimize::SuppressAction{};

bool is_lowercase_ascii(const std::string& key) {
  if (key.empty()) return false;
  for (unsigned char c : key) {
    if (c > 0x7F || std::isupper(c)) return false;
  }
  return true;
}

void validate_config(const InterceptorConfig& config) {
  if (!config.verify_key) {
    throw ParamError("interceptor config lacks a verify key");
  }
  if (!is_lowercase_ascii(config.metadata_key)) {
    throw ParamError("metadata key must be non-empty lowercase ASCII, got '" +
                     config.metadata_key + "'");
  }
}

int64_t config_now(const InterceptorConfig& config) {
  return config.clock ? config.clock() : static_cast<int64_t>(std::time(nullptr));
}

uint64_t pick_seed(const InterceptorConfig& config) {
  if (config.rng_seed) return *config.rng_seed;
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) | rd();
}

// True for the kinds apply_action can transform in place.
bool is_minimizable_scalar(const FieldDescriptor* field) {
  if (field->is_repeated()) return false;
  switch (field->cpp_type()) {
    case FieldDescriptor::CPPTYPE_INT32:
    case FieldDescriptor::CPPTYPE_INT64:
    case FieldDescriptor::CPPTYPE_UINT32:
    case FieldDescriptor::CPPTYPE_UINT64:
    case FieldDescriptor::CPPTYPE_FLOAT:
    case FieldDescriptor::CPPTYPE_DOUBLE:
      return true;
    case FieldDescriptor::CPPTYPE_STRING:
      return field->type() == FieldDescriptor::TYPE_STRING;
    default:
      return false;
  }
}

ScalarValue get_scalar(const Message& message, const Reflection* reflection,
                       const FieldDescriptor* field) {
  switch (field->cpp_type()) {
    case FieldDescriptor::CPPTYPE_INT32:
      return static_cast<int64_t>(reflection->GetInt32(message, field));
    case FieldDescriptor::CPPTYPE_INT64:
      return static_cast<int64_t>(reflection->GetInt64(message, field));
    case FieldDescriptor::CPPTYPE_UINT32:
      return static_cast<uint64_t>(reflection->GetUInt32(message, field));
    case FieldDescriptor::CPPTYPE_UINT64:
      return static_cast<uint64_t>(reflection->GetUInt64(message, field));
    case FieldDescriptor::CPPTYPE_FLOAT:
      return static_cast<double>(reflection->GetFloat(message, field));
    case FieldDescriptor::CPPTYPE_DOUBLE:
      return reflection->GetDouble(message, field);
    default:
      return reflection->GetString(message, field);
  }
}

template <typename T>
T clamp_to(int64_t value) {
  if (value < static_cast<int64_t>(std::numeric_limits<T>::min())) {
    return std::numeric_limits<T>::min();
  }
  if (value > static_cast<int64_t>(std::numeric_limits<T>::max())) {
    return std::numeric_limits<T>::max();
  }
  return static_cast<T>(value);
}

void set_scalar(Message* message, const Reflection* reflection,
                const FieldDescriptor* field, const ScalarValue& value) {
  switch (field->cpp_type()) {
    case FieldDescriptor::CPPTYPE_INT32:
      reflection->SetInt32(message, field, clamp_to<int32_t>(std::get<int64_t>(value)));
      break;
    case FieldDescriptor::CPPTYPE_INT64:
      reflection->SetInt64(message, field, std::get<int64_t>(value));
      break;
    case FieldDescriptor::CPPTYPE_UINT32: {
      uint64_t v = std::get<uint64_t>(value);
      reflection->SetUInt32(message, field,
                            v > std::numeric_limits<uint32_t>::max()
                                ? std::numeric_limits<uint32_t>::max()
                                : static_cast<uint32_t>(v));
      break;
    }
    case FieldDescriptor::CPPTYPE_UINT64:
      reflection->SetUInt64(message, field, std::get<uint64_t>(value));
      break;
    case FieldDescriptor::CPPTYPE_FLOAT:
      reflection->SetFloat(message, field, static_cast<float>(std::get<double>(value)));
      break;
    case FieldDescriptor::CPPTYPE_DOUBLE:
      reflection->SetDouble(message, field, std::get<double>(value));
      break;
    default:
      reflection->SetString(message, field, std::get<std::string>(value));
      break;
  }
}

RpcStatus map_token_failure(const Error& e) {
  if (dynamic_cast<const ExpiredError*>(&e) != nullptr) {
    return RpcStatus::PermissionDenied(std::string("policy token rejected: ") + e.what());
  }
  return RpcStatus::Unauthenticated(std::string("policy token rejected: ") + e.what());
}

RpcStatus verify_from_metadata(const rpc::Metadata& metadata,
                               const InterceptorConfig& config,
                               token::PolicyClaims* claims) {
  auto it = metadata.find(config.metadata_key);
  if (it == metadata.end()) {
    return RpcStatus::Unauthenticated("request metadata lacks policy token key '" +
                                      config.metadata_key + "'");
  }
  try {
    *claims = token::verify_token(it->second, *config.verify_key, config_now(config));
  } catch (const Error& e) {
    return map_token_failure(e);
  }
  return RpcStatus::Ok();
}

}  // namespace

CompiledRule CompiledRule::from_rule(const policy::PurposeRule& rule) {
  CompiledRule compiled;
  for (const auto& field : rule.allowed) {
    compiled.actions_.emplace(field, minimize::PassAction{});
  }
  for (const auto& [field, param] : rule.generalized) {
    compiled.actions_.emplace(field, minimize::GeneralizeAction{param});
  }
  for (const auto& [field, spec] : rule.noised) {
    compiled.actions_.emplace(field, minimize::NoiseAction{spec});
  }
  for (const auto& [field, param] : rule.reduced) {
    compiled.actions_.emplace(field, minimize::ReduceAction{param});
  }
  return compiled;
}

const FieldAction& CompiledRule::lookup(const std::string& field) const {
  auto it = actions_.find(field);
  return it == actions_.end() ? kSuppressDefault : it->second;
}

CompiledRule compile_rule(const token::PolicyClaims& claims) {
  return CompiledRule::from_rule(claims.rule);
}

rpc::RpcStatus minimize_message(Message& message, const CompiledRule& rule,
                                uint64_t noise_seed) {
  const google::protobuf::Descriptor* descriptor = message.GetDescriptor();
  const Reflection* reflection = message.GetReflection();
  if (descriptor == nullptr || reflection == nullptr) {
    return RpcStatus::Internal("message does not support reflection");
  }

  for (int i = 0; i < descriptor->field_count(); ++i) {
    const FieldDescriptor* field = descriptor->field(i);
    const FieldAction& action = rule.lookup(field->name());

    if (!is_minimizable_scalar(field)) {
      // Non-scalar fields pass only when explicitly allowed; any minimizer
      // parameter on them enforces as suppression.
      if (!std::holds_alternative<minimize::PassAction>(action)) {
        reflection->ClearField(&message, field);
      }
      continue;
    }

    if (std::holds_alternative<minimize::PassAction>(action)) continue;

    try {
      ScalarValue value = get_scalar(message, reflection, field);
      minimize::NoiseRng rng = minimize::make_field_rng(noise_seed, field->name());
      set_scalar(&message, reflection, field,
                 minimize::apply_action(value, action, rng));
    } catch (const Error& e) {
      return RpcStatus::Internal("cannot minimize field '" + field->name() +
                                 "': " + e.what());
    }
  }
  return RpcStatus::Ok();
}

rpc::RpcStatus intercept_response(const rpc::Metadata& request_metadata,
                                  Message& response, const InterceptorConfig& config) {
  validate_config(config);
  token::PolicyClaims claims;
  RpcStatus status = verify_from_metadata(request_metadata, config, &claims);
  if (!status.ok()) return status;
  return minimize_message(response, compile_rule(claims), pick_seed(config));
}

rpc::Metadata attach_token(rpc::Metadata metadata, const std::string& compact_token,
                           const InterceptorConfig& config) {
  if (!is_lowercase_ascii(config.metadata_key)) {
    throw ParamError("metadata key must be non-empty lowercase ASCII, got '" +
                     config.metadata_key + "'");
  }
  metadata[config.metadata_key] = compact_token;
  return metadata;
}

rpc::ServerInterceptor make_privacy_interceptor(InterceptorConfig config) {
  validate_config(config);
  auto shared = std::make_shared<const InterceptorConfig>(std::move(config));
  return [shared](const rpc::Metadata& metadata, const Message& request,
                  Message& response, const rpc::UnaryHandler& next) -> RpcStatus {
    token::PolicyClaims claims;
    RpcStatus status = verify_from_metadata(metadata, *shared, &claims);
    if (!status.ok()) return status;  // downstream never runs

    status = next(metadata, request, response);
    if (!status.ok()) return status;

    return minimize_message(response, compile_rule(claims), pick_seed(*shared));
  };
}

rpc::ServerInterceptor make_noop_interceptor() {
  return [](const rpc::Metadata& metadata, const Message& request, Message& response,
            const rpc::UnaryHandler& next) { return next(metadata, request, response); };
}

rpc::ServerInterceptor chain(rpc::ServerInterceptor inner, rpc::ServerInterceptor outer) {
  return [inner = std::move(inner), outer = std::move(outer)](
             const rpc::Metadata& metadata, const Message& request, Message& response,
             const rpc::UnaryHandler& next) {
    rpc::UnaryHandler bridge = [&inner, &next](const rpc::Metadata& m, const Message& rq,
                                               Message& rs) {
      return inner(m, rq, rs, next);
    };
    return outer(metadata, request, response, bridge);
  };
}

}  // namespace plim::enforce
