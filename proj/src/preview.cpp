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

#include "plim/preview.hpp"

#include <limits>

#include <google/protobuf/descriptor.h>

namespace plim::preview {

using google::protobuf::FieldDescriptor;

minimize::ScalarValue scalar_from_json(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_float()) return value.get<double>();
  if (value.is_number_unsigned()) {
    uint64_t v = value.get<uint64_t>();
    if (v <= static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
      return static_cast<int64_t>(v);
    }
    return v;
  }
  if (value.is_number_integer()) return value.get<int64_t>();
  throw SchemaError("message fields must be scalars (string or number), got " +
                    value.dump());
}

nlohmann::ordered_json scalar_to_json(const minimize::ScalarValue& value) {
  struct Visitor {
    nlohmann::ordered_json operator()(int64_t v) const { return v; }
    nlohmann::ordered_json operator()(uint64_t v) const { return v; }
    nlohmann::ordered_json operator()(double v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, value);
}

nlohmann::ordered_json minimize_flat_json(const nlohmann::ordered_json& message,
                                          const enforce::CompiledRule& rule,
                                          uint64_t noise_seed) {
  if (!message.is_object()) {
    throw SchemaError("message must be a flat JSON object of scalars");
  }
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& item : message.items()) {
    minimize::ScalarValue value = scalar_from_json(item.value());
    minimize::NoiseRng rng = minimize::make_field_rng(noise_seed, item.key());
    out[item.key()] =
        scalar_to_json(minimize::apply_action(value, rule.lookup(item.key()), rng));
  }
  return out;
}

nlohmann::ordered_json message_to_flat_json(const google::protobuf::Message& message) {
  const google::protobuf::Descriptor* descriptor = message.GetDescriptor();
  const google::protobuf::Reflection* reflection = message.GetReflection();
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (int i = 0; i < descriptor->field_count(); ++i) {
    const FieldDescriptor* field = descriptor->field(i);
    if (field->is_repeated()) continue;
    switch (field->cpp_type()) {
      case FieldDescriptor::CPPTYPE_INT32:
        out[field->name()] = reflection->GetInt32(message, field);
        break;
      case FieldDescriptor::CPPTYPE_INT64:
        out[field->name()] = reflection->GetInt64(message, field);
        break;
      case FieldDescriptor::CPPTYPE_UINT32:
        out[field->name()] = reflection->GetUInt32(message, field);
        break;
      case FieldDescriptor::CPPTYPE_UINT64:
        out[field->name()] = reflection->GetUInt64(message, field);
        break;
      case FieldDescriptor::CPPTYPE_FLOAT:
        out[field->name()] = static_cast<double>(reflection->GetFloat(message, field));
        break;
      case FieldDescriptor::CPPTYPE_DOUBLE:
        out[field->name()] = reflection->GetDouble(message, field);
        break;
      case FieldDescriptor::CPPTYPE_STRING:
        if (field->type() == FieldDescriptor::TYPE_STRING) {
          out[field->name()] = reflection->GetString(message, field);
        }
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace plim::preview
