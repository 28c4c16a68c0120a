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

#include <google/protobuf/descriptor.h>

#include "plim/demo.hpp"
#include "tracking.pb.h"

namespace plim::demo {

namespace {

using google::protobuf::FieldDescriptor;
using google::protobuf::Message;

void fill_base13(tracking::v1::TrackingInfo13* info) {
  info->set_name("Alice");
  info->set_street("Hardenbergstrasse 135");
  info->set_zip("10623");
  info->set_city("Berlin");
  info->set_phone("+49 30 314 22000");
  info->set_email("alice@example.com");
  info->set_latitude(52.5125);
  info->set_longitude(13.3269);
  info->set_age(25);
  info->set_account_balance(2300.0);
  info->set_device_id("dev-8f3a-module7");
  info->set_order_total(42.5);
  info->set_courier_id(135);
}

template <typename T>
void fill_extension26(T* info) {
  info->set_restaurant_name("Pasta Palace");
  info->set_restaurant_street("Marchstrasse 23");
  info->set_restaurant_zip("10587");
  info->set_rider_name("Bob");
  info->set_rider_phone("+49 30 314 22001");
  info->set_delivery_eta_minutes(17);
  info->set_order_count(48);
  info->set_loyalty_points(1250);
  info->set_tip_amount(3.5);
  info->set_distance_km(4.2);
  info->set_payment_method("card");
  info->set_app_version("2.14.0");
  info->set_session_id("sess-51c2a7");
}

// The three variants share field numbers and names for the common prefix, so
// the 13-field filler can be applied through serialization.
template <typename T>
void copy_base13(T* target) {
  tracking::v1::TrackingInfo13 base;
  fill_base13(&base);
  target->ParseFromString(base.SerializeAsString());
}

std::unique_ptr<Message> make_info13() {
  auto info = std::make_unique<tracking::v1::TrackingInfo13>();
  fill_base13(info.get());
  return info;
}

std::unique_ptr<Message> make_info26() {
  auto info = std::make_unique<tracking::v1::TrackingInfo26>();
  copy_base13(info.get());
  fill_extension26(info.get());
  return info;
}

std::unique_ptr<Message> make_info52() {
  auto info = std::make_unique<tracking::v1::TrackingInfo52>();
  copy_base13(info.get());
  fill_extension26(info.get());
  const google::protobuf::Descriptor* descriptor = info->GetDescriptor();
  const google::protobuf::Reflection* reflection = info->GetReflection();
  for (int i = 26; i < descriptor->field_count(); ++i) {
    const FieldDescriptor* field = descriptor->field(i);
    switch (field->cpp_type()) {
      case FieldDescriptor::CPPTYPE_STRING:
        reflection->SetString(info.get(), field, "pad-" + field->name());
        break;
      case FieldDescriptor::CPPTYPE_INT64:
        reflection->SetInt64(info.get(), field, 1000 + i);
        break;
      default:
        reflection->SetDouble(info.get(), field, 10.0 + i);
        break;
    }
  }
  return info;
}

policy::FieldKind kind_of_field(const FieldDescriptor* field) {
  if (field->is_repeated()) return policy::FieldKind::kRepeated;
  switch (field->cpp_type()) {
    case FieldDescriptor::CPPTYPE_INT32:
    case FieldDescriptor::CPPTYPE_INT64:
      return policy::FieldKind::kInteger;
    case FieldDescriptor::CPPTYPE_UINT32:
    case FieldDescriptor::CPPTYPE_UINT64:
      return policy::FieldKind::kUnsignedInteger;
    case FieldDescriptor::CPPTYPE_FLOAT:
    case FieldDescriptor::CPPTYPE_DOUBLE:
      return policy::FieldKind::kFloat;
    case FieldDescriptor::CPPTYPE_BOOL:
      return policy::FieldKind::kBool;
    case FieldDescriptor::CPPTYPE_STRING:
      return field->type() == FieldDescriptor::TYPE_BYTES ? policy::FieldKind::kBytes
                                                          : policy::FieldKind::kString;
    default:
      return policy::FieldKind::kNested;
  }
}

}  // namespace

std::string method_path(int variant) {
  return "/plim.tracking.v1.TrackingService/GetTracking" + std::to_string(variant);
}

const Message& tracking_prototype(int variant) {
  switch (variant) {
    case 13:
      return tracking::v1::TrackingInfo13::default_instance();
    case 26:
      return tracking::v1::TrackingInfo26::default_instance();
    case 52:
      return tracking::v1::TrackingInfo52::default_instance();
    default:
      throw ParamError("unknown tracking variant " + std::to_string(variant) +
                       "; expected 13, 26 or 52");
  }
}

std::unique_ptr<Message> make_tracking_response(int variant) {
  switch (variant) {
    case 13:
      return make_info13();
    case 26:
      return make_info26();
    case 52:
      return make_info52();
    default:
      throw ParamError("unknown tracking variant " + std::to_string(variant) +
                       "; expected 13, 26 or 52");
  }
}

std::vector<policy::FieldSpec> tracking_field_catalog(int variant) {
  const google::protobuf::Descriptor* descriptor = tracking_prototype(variant).GetDescriptor();
  std::vector<policy::FieldSpec> catalog;
  catalog.reserve(descriptor->field_count());
  for (int i = 0; i < descriptor->field_count(); ++i) {
    const FieldDescriptor* field = descriptor->field(i);
    catalog.push_back({field->name(), kind_of_field(field)});
  }
  return catalog;
}

void register_tracking_methods(rpc::RpcServer& server) {
  for (int variant : kVariants) {
    const Message& prototype = tracking_prototype(variant);
    std::shared_ptr<const Message> fixture = make_tracking_response(variant);
    server.register_unary(
        method_path(variant), &tracking::v1::TrackingRequest::default_instance(),
        &prototype,
        [fixture](const rpc::Metadata&, const Message&, Message& response) {
          response.CopyFrom(*fixture);
          return rpc::RpcStatus::Ok();
        });
  }
}

rpc::RpcStatus fetch_tracking(rpc::RpcChannel& channel, const ClientOptions& options,
                              int variant, Message* response) {
  tracking::v1::TrackingRequest request;
  request.set_order_id("order-1007");

  rpc::Metadata metadata;
  if (!options.token.empty()) {
    enforce::InterceptorConfig config;
    config.metadata_key = options.metadata_key;
    metadata = enforce::attach_token(std::move(metadata), options.token, config);
  }
  return channel.call(method_path(variant), metadata, request, response);
}

}  // namespace plim::demo
