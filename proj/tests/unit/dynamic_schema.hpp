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

#include <google/protobuf/descriptor.h>
#include <google/protobuf/descriptor.pb.h>
#include <google/protobuf/dynamic_message.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace plim::testing {

// Builds randomized single-message schemas at runtime so enforcement
// properties can be checked against arbitrary response shapes.
class DynamicSchemaFactory {
 public:
  using Field = google::protobuf::FieldDescriptorProto;

  static constexpr Field::Type kScalarTypes[] = {
      Field::TYPE_INT32,  Field::TYPE_INT64,  Field::TYPE_UINT32,
      Field::TYPE_UINT64, Field::TYPE_FLOAT,  Field::TYPE_DOUBLE,
      Field::TYPE_STRING,
  };
  static constexpr Field::Type kOtherTypes[] = {
      Field::TYPE_BOOL,
      Field::TYPE_BYTES,
  };

  // Creates a message type with the given (name, type, repeated) triples.
  const google::protobuf::Descriptor* build(
      const std::vector<std::tuple<std::string, Field::Type, bool>>& fields) {
    google::protobuf::FileDescriptorProto file;
    file.set_name("dyn/file_" + std::to_string(counter_) + ".proto");
    file.set_package("dyn");
    file.set_syntax("proto3");

    google::protobuf::DescriptorProto* message = file.add_message_type();
    message->set_name("M" + std::to_string(counter_));
    ++counter_;

    int number = 1;
    for (const auto& [name, type, repeated] : fields) {
      Field* field = message->add_field();
      field->set_name(name);
      field->set_number(number++);
      field->set_type(type);
      field->set_label(repeated ? Field::LABEL_REPEATED : Field::LABEL_OPTIONAL);
    }

    const google::protobuf::FileDescriptor* built = pool_.BuildFile(file);
    REQUIRE(built != nullptr);
    return built->message_type(0);
  }

  std::unique_ptr<google::protobuf::Message> instance(
      const google::protobuf::Descriptor* descriptor) {
    return std::unique_ptr<google::protobuf::Message>(
        factory_.GetPrototype(descriptor)->New());
  }

 private:
  google::protobuf::DescriptorPool pool_;
  google::protobuf::DynamicMessageFactory factory_;
  int counter_ = 0;
};

// Fills every field with a non-default value drawn from rng.
inline void fill_random(google::protobuf::Message* message, std::mt19937_64& rng) {
  using google::protobuf::FieldDescriptor;
  const google::protobuf::Descriptor* descriptor = message->GetDescriptor();
  const google::protobuf::Reflection* reflection = message->GetReflection();
  for (int i = 0; i < descriptor->field_count(); ++i) {
    const FieldDescriptor* field = descriptor->field(i);
    int64_t v = static_cast<int64_t>(rng() % 100000) + 1;
    if (field->is_repeated()) {
      for (int k = 0; k < 3; ++k) {
        switch (field->cpp_type()) {
          case FieldDescriptor::CPPTYPE_INT32:
            reflection->AddInt32(message, field, static_cast<int32_t>(v + k));
            break;
          case FieldDescriptor::CPPTYPE_STRING:
            reflection->AddString(message, field, "r" + std::to_string(v + k));
            break;
          default:
            reflection->AddDouble(message, field, static_cast<double>(v + k));
            break;
        }
      }
      continue;
    }
    switch (field->cpp_type()) {
      case FieldDescriptor::CPPTYPE_INT32:
        reflection->SetInt32(message, field, static_cast<int32_t>(v % 100000));
        break;
      case FieldDescriptor::CPPTYPE_INT64:
        reflection->SetInt64(message, field, v);
        break;
      case FieldDescriptor::CPPTYPE_UINT32:
        reflection->SetUInt32(message, field, static_cast<uint32_t>(v % 100000));
        break;
      case FieldDescriptor::CPPTYPE_UINT64:
        reflection->SetUInt64(message, field, static_cast<uint64_t>(v));
        break;
      case FieldDescriptor::CPPTYPE_FLOAT:
        reflection->SetFloat(message, field, static_cast<float>(v) / 4.0f);
        break;
      case FieldDescriptor::CPPTYPE_DOUBLE:
        reflection->SetDouble(message, field, static_cast<double>(v) / 4.0);
        break;
      case FieldDescriptor::CPPTYPE_BOOL:
        reflection->SetBool(message, field, true);
        break;
      case FieldDescriptor::CPPTYPE_STRING:
        reflection->SetString(message, field, "value-" + std::to_string(v));
        break;
      default:
        break;
    }
  }
}

// True when the field holds its suppression sentinel (scalar kinds) or its
// empty default (everything else).
inline bool is_suppressed(const google::protobuf::Message& message,
                          const google::protobuf::FieldDescriptor* field) {
  using google::protobuf::FieldDescriptor;
  const google::protobuf::Reflection* reflection = message.GetReflection();
  if (field->is_repeated()) return reflection->FieldSize(message, field) == 0;
  switch (field->cpp_type()) {
    case FieldDescriptor::CPPTYPE_INT32:
      return reflection->GetInt32(message, field) == -1;
    case FieldDescriptor::CPPTYPE_INT64:
      return reflection->GetInt64(message, field) == -1;
    case FieldDescriptor::CPPTYPE_UINT32:
      return reflection->GetUInt32(message, field) == 0;
    case FieldDescriptor::CPPTYPE_UINT64:
      return reflection->GetUInt64(message, field) == 0;
    case FieldDescriptor::CPPTYPE_FLOAT:
      return reflection->GetFloat(message, field) == -1.0f;
    case FieldDescriptor::CPPTYPE_DOUBLE:
      return reflection->GetDouble(message, field) == -1.0;
    case FieldDescriptor::CPPTYPE_BOOL:
      return reflection->GetBool(message, field) == false;
    case FieldDescriptor::CPPTYPE_STRING:
      return reflection->GetString(message, field).empty();
    default:
      return !reflection->HasField(message, field);
  }
}

}  // namespace plim::testing
