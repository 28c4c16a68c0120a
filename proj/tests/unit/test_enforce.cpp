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

#include <random>

#include "doctest.h"
#include "dynamic_schema.hpp"
#include "helpers.hpp"
#include "plim/enforce.hpp"

using namespace plim;
using testing::DynamicSchemaFactory;
using Field = google::protobuf::FieldDescriptorProto;

namespace {

constexpr int64_t kNow = 1700000000;

enforce::InterceptorConfig test_config(std::optional<uint64_t> seed = 42) {
  enforce::InterceptorConfig config;
  config.verify_key = testing::test_keys().ec_public;
  config.clock = [] { return kNow; };
  config.rng_seed = seed;
  return config;
}

std::string mint_for_rule(const policy::PurposeRule& rule) {
  return token::mint_token(rule, "svc", testing::test_keys().ec_private, 1.0, kNow);
}

}  // namespace

TEST_CASE("compile_rule maps categories to actions with a suppress default") {
  policy::PurposeRule rule;
  rule.purpose = "p";
  rule.allowed.insert("name");
  rule.generalized["age"] = 10;
  rule.noised["balance"] = {};
  rule.reduced["zip"] = 4;

  enforce::CompiledRule compiled = enforce::CompiledRule::from_rule(rule);
  CHECK(compiled.size() == 4);
  CHECK(std::holds_alternative<minimize::PassAction>(compiled.lookup("name")));
  CHECK(std::get<minimize::GeneralizeAction>(compiled.lookup("age")).param == 10);
  CHECK(std::holds_alternative<minimize::NoiseAction>(compiled.lookup("balance")));
  CHECK(std::get<minimize::ReduceAction>(compiled.lookup("zip")).param == 4);
  CHECK(std::holds_alternative<minimize::SuppressAction>(compiled.lookup("anything_else")));

  SUBCASE("an empty rule denies everything") {
    enforce::CompiledRule empty = enforce::CompiledRule::from_rule(policy::PurposeRule{});
    CHECK(empty.size() == 0);
    CHECK(std::holds_alternative<minimize::SuppressAction>(empty.lookup("name")));
  }
}

TEST_CASE("attach_token stores the token and preserves other entries") {
  enforce::InterceptorConfig config = test_config();

  rpc::Metadata empty = enforce::attach_token({}, "tok-1", config);
  CHECK(empty == rpc::Metadata{{"x-purpose-jwt", "tok-1"}});

  rpc::Metadata with_auth = enforce::attach_token({{"authorization", "Bearer b"}},
                                                  "tok-1", config);
  CHECK(with_auth.size() == 2);
  CHECK(with_auth.at("authorization") == "Bearer b");
  CHECK(with_auth.at("x-purpose-jwt") == "tok-1");

  SUBCASE("attaching twice replaces the previous token") {
    rpc::Metadata twice = enforce::attach_token(with_auth, "tok-2", config);
    CHECK(twice.size() == 2);
    CHECK(twice.at("x-purpose-jwt") == "tok-2");
  }

  SUBCASE("metadata key must be lowercase ASCII") {
    enforce::InterceptorConfig bad = test_config();
    bad.metadata_key = "X-Purpose-JWT";
    CHECK_THROWS_AS(enforce::attach_token({}, "t", bad), ParamError);
  }
}

TEST_CASE("intercept_response rewrites fields per the token's rule") {
  DynamicSchemaFactory schemas;
  const auto* descriptor = schemas.build({
      {"name", Field::TYPE_STRING, false},
      {"age", Field::TYPE_INT32, false},
      {"zip", Field::TYPE_STRING, false},
  });
  auto message = schemas.instance(descriptor);
  auto* reflection = message->GetReflection();
  reflection->SetString(message.get(), descriptor->field(0), "Alice");
  reflection->SetInt32(message.get(), descriptor->field(1), 25);
  reflection->SetString(message.get(), descriptor->field(2), "10623");

  policy::PurposeRule rule;
  rule.purpose = "delivery";
  rule.allowed.insert("name");
  rule.generalized["age"] = 10;

  rpc::Metadata metadata =
      enforce::attach_token({}, mint_for_rule(rule), test_config());
  rpc::RpcStatus status = enforce::intercept_response(metadata, *message, test_config());

  REQUIRE(status.ok());
  CHECK(reflection->GetString(*message, descriptor->field(0)) == "Alice");
  CHECK(reflection->GetInt32(*message, descriptor->field(1)) == 21);
  CHECK(reflection->GetString(*message, descriptor->field(2)) == "");
}

TEST_CASE("intercept_response fails closed on token problems") {
  DynamicSchemaFactory schemas;
  const auto* descriptor = schemas.build({{"name", Field::TYPE_STRING, false}});
  auto message = schemas.instance(descriptor);

  enforce::InterceptorConfig config = test_config();

  SUBCASE("missing metadata key") {
    rpc::RpcStatus status = enforce::intercept_response({}, *message, config);
    CHECK(status.code == rpc::code::kUnauthenticated);
  }
  SUBCASE("garbage token") {
    rpc::RpcStatus status = enforce::intercept_response({{"x-purpose-jwt", "nope"}},
                                                        *message, config);
    CHECK(status.code == rpc::code::kUnauthenticated);
  }
  SUBCASE("tampered token") {
    std::string tok = mint_for_rule(policy::PurposeRule{});
    tok[tok.find('.') + 3] = tok[tok.find('.') + 3] == 'A' ? 'B' : 'A';
    rpc::RpcStatus status =
        enforce::intercept_response({{"x-purpose-jwt", tok}}, *message, config);
    CHECK(status.code == rpc::code::kUnauthenticated);
  }
  SUBCASE("expired token maps to PermissionDenied") {
    std::string tok = mint_for_rule(policy::PurposeRule{});
    enforce::InterceptorConfig late = test_config();
    late.clock = [] { return kNow + 3600; };
    rpc::RpcStatus status =
        enforce::intercept_response({{"x-purpose-jwt", tok}}, *message, late);
    CHECK(status.code == rpc::code::kPermissionDenied);
  }
}

TEST_CASE("default-deny property over randomized schemas and rules") {
  // 1000 randomized (schema, rule) pairs; every field not named in the rule
  // must come out suppressed, whatever its type.
  DynamicSchemaFactory schemas;
  std::mt19937_64 rng(0xDEFDEF);
  enforce::InterceptorConfig config = test_config();

  for (int iteration = 0; iteration < 1000; ++iteration) {
    std::vector<std::tuple<std::string, Field::Type, bool>> fields;
    int field_count = 1 + static_cast<int>(rng() % 12);
    for (int f = 0; f < field_count; ++f) {
      std::string name = "f" + std::to_string(f) + "_" + std::to_string(rng() % 1000);
      int pick = static_cast<int>(rng() % 10);
      if (pick < 7) {
        fields.emplace_back(
            name, DynamicSchemaFactory::kScalarTypes[rng() % std::size(
                      DynamicSchemaFactory::kScalarTypes)], false);
      } else if (pick < 9) {
        fields.emplace_back(
            name, DynamicSchemaFactory::kOtherTypes[rng() % std::size(
                      DynamicSchemaFactory::kOtherTypes)], false);
      } else {
        fields.emplace_back(name, Field::TYPE_STRING, true);  // repeated
      }
    }

    const auto* descriptor = schemas.build(fields);
    auto message = schemas.instance(descriptor);
    testing::fill_random(message.get(), rng);

    policy::PurposeRule rule;
    rule.purpose = "p";
    std::vector<std::string> mentioned;
    for (const auto& [name, type, repeated] : fields) {
      (void)type;
      (void)repeated;
      if (rng() % 2 == 0) continue;  // unlisted -> must be suppressed
      mentioned.push_back(name);
      switch (rng() % 4) {
        case 0: rule.allowed.insert(name); break;
        case 1: rule.generalized[name] = 1.0 + static_cast<double>(rng() % 20); break;
        case 2: rule.noised[name] = policy::NoiseSpec{}; break;
        default: rule.reduced[name] = 1.0 + static_cast<double>(rng() % 20); break;
      }
    }

    rpc::Metadata metadata = enforce::attach_token({}, mint_for_rule(rule), config);
    rpc::RpcStatus status = enforce::intercept_response(metadata, *message, config);
    REQUIRE(status.ok());

    for (int i = 0; i < descriptor->field_count(); ++i) {
      const auto* field = descriptor->field(i);
      if (!rule.mentions(field->name())) {
        CAPTURE(iteration);
        CAPTURE(field->name());
        REQUIRE(testing::is_suppressed(*message, field));
      }
    }
  }
}

TEST_CASE("enforcement is idempotent for deterministic actions") {
  DynamicSchemaFactory schemas;
  std::mt19937_64 rng(777);

  for (int iteration = 0; iteration < 100; ++iteration) {
    std::vector<std::tuple<std::string, Field::Type, bool>> fields;
    int field_count = 1 + static_cast<int>(rng() % 8);
    for (int f = 0; f < field_count; ++f) {
      fields.emplace_back("f" + std::to_string(f),
                          DynamicSchemaFactory::kScalarTypes[rng() % std::size(
                              DynamicSchemaFactory::kScalarTypes)],
                          false);
    }
    const auto* descriptor = schemas.build(fields);
    auto message = schemas.instance(descriptor);
    testing::fill_random(message.get(), rng);

    // Pass / Suppress / Generalize / string-Reduce only: numeric reduce is a
    // division and noise is probabilistic, neither can be idempotent.
    policy::PurposeRule rule;
    rule.purpose = "p";
    for (const auto& [name, type, repeated] : fields) {
      (void)repeated;
      switch (rng() % 4) {
        case 0: rule.allowed.insert(name); break;
        case 1: rule.generalized[name] = 1.0 + static_cast<double>(rng() % 20); break;
        case 2:
          if (type == Field::TYPE_STRING) {
            rule.reduced[name] = static_cast<double>(rng() % 6);
          }
          break;
        default: break;  // unlisted -> suppress
      }
    }

    enforce::CompiledRule compiled = enforce::CompiledRule::from_rule(rule);
    REQUIRE(enforce::minimize_message(*message, compiled, 1).ok());
    std::string once = message->SerializeAsString();
    REQUIRE(enforce::minimize_message(*message, compiled, 1).ok());
    CHECK(message->SerializeAsString() == once);
  }
}

TEST_CASE("noised integer fields saturate at the field type's bounds") {
  DynamicSchemaFactory schemas;
  const auto* descriptor = schemas.build({
      {"small", Field::TYPE_INT32, false},
      {"tiny", Field::TYPE_UINT32, false},
  });
  auto message = schemas.instance(descriptor);
  auto* reflection = message->GetReflection();
  reflection->SetInt32(message.get(), descriptor->field(0), 100);
  reflection->SetUInt32(message.get(), descriptor->field(1), 100);

  policy::NoiseSpec extreme;
  extreme.sensitivity = 1e30;
  policy::PurposeRule rule;
  rule.purpose = "p";
  rule.noised["small"] = extreme;
  rule.noised["tiny"] = extreme;

  for (uint64_t seed = 0; seed < 32; ++seed) {
    REQUIRE(enforce::minimize_message(*message, enforce::CompiledRule::from_rule(rule),
                                      seed)
                .ok());
    int32_t small = reflection->GetInt32(*message, descriptor->field(0));
    uint32_t tiny = reflection->GetUInt32(*message, descriptor->field(1));
    CHECK((small == std::numeric_limits<int32_t>::max() ||
           small == std::numeric_limits<int32_t>::min()));
    CHECK((tiny == std::numeric_limits<uint32_t>::max() || tiny == 0));
    reflection->SetInt32(message.get(), descriptor->field(0), 100);
    reflection->SetUInt32(message.get(), descriptor->field(1), 100);
  }
}

TEST_CASE("non-scalar fields pass only when allowed") {
  DynamicSchemaFactory schemas;
  const auto* descriptor = schemas.build({
      {"flag", Field::TYPE_BOOL, false},
      {"blob", Field::TYPE_BYTES, false},
      {"tags", Field::TYPE_STRING, true},
  });
  auto message = schemas.instance(descriptor);
  auto* reflection = message->GetReflection();
  reflection->SetBool(message.get(), descriptor->field(0), true);
  reflection->SetString(message.get(), descriptor->field(1), "\x01\x02");
  reflection->AddString(message.get(), descriptor->field(2), "a");
  reflection->AddString(message.get(), descriptor->field(2), "b");

  SUBCASE("allowed: untouched") {
    policy::PurposeRule rule;
    rule.purpose = "p";
    rule.allowed = {"flag", "blob", "tags"};
    REQUIRE(
        enforce::minimize_message(*message, enforce::CompiledRule::from_rule(rule), 1)
            .ok());
    CHECK(reflection->GetBool(*message, descriptor->field(0)) == true);
    CHECK(reflection->GetString(*message, descriptor->field(1)) == "\x01\x02");
    CHECK(reflection->FieldSize(*message, descriptor->field(2)) == 2);
  }

  SUBCASE("minimizer parameters on them enforce as suppression") {
    policy::PurposeRule rule;
    rule.purpose = "p";
    rule.generalized["flag"] = 2;
    rule.reduced["blob"] = 2;
    rule.noised["tags"] = {};
    REQUIRE(
        enforce::minimize_message(*message, enforce::CompiledRule::from_rule(rule), 1)
            .ok());
    CHECK(reflection->GetBool(*message, descriptor->field(0)) == false);
    CHECK(reflection->GetString(*message, descriptor->field(1)).empty());
    CHECK(reflection->FieldSize(*message, descriptor->field(2)) == 0);
  }
}

TEST_CASE("interceptor composition and ordering") {
  // The interceptor contract is exercised without a live server: handlers and
  // interceptors are plain callables over messages.
  DynamicSchemaFactory schemas;
  const auto* descriptor = schemas.build({
      {"name", Field::TYPE_STRING, false},
      {"age", Field::TYPE_INT32, false},
  });
  auto request = schemas.instance(descriptor);
  auto response = schemas.instance(descriptor);
  auto* reflection = response->GetReflection();

  policy::PurposeRule rule;
  rule.purpose = "p";
  rule.allowed.insert("name");
  rule.generalized["age"] = 10;
  std::string tok = mint_for_rule(rule);
  enforce::InterceptorConfig config = test_config();
  rpc::Metadata metadata = enforce::attach_token({}, tok, config);

  rpc::UnaryHandler handler = [&](const rpc::Metadata&, const google::protobuf::Message&,
                                  google::protobuf::Message& out) {
    auto* r = out.GetReflection();
    r->SetString(&out, out.GetDescriptor()->field(0), "Alice");
    r->SetInt32(&out, out.GetDescriptor()->field(1), 25);
    return rpc::RpcStatus::Ok();
  };

  rpc::ServerInterceptor privacy = enforce::make_privacy_interceptor(config);

  SUBCASE("chain(no-op, privacy) behaves exactly like privacy alone") {
    rpc::ServerInterceptor chained =
        enforce::chain(enforce::make_noop_interceptor(), privacy);

    auto direct = schemas.instance(descriptor);
    REQUIRE(privacy(metadata, *request, *direct, handler).ok());
    REQUIRE(chained(metadata, *request, *response, handler).ok());
    CHECK(response->SerializeAsString() == direct->SerializeAsString());
    CHECK(reflection->GetInt32(*response, descriptor->field(1)) == 21);
  }

  SUBCASE("counting interceptor sees exactly one invocation per response") {
    int invocations = 0;
    rpc::ServerInterceptor counting =
        [&invocations](const rpc::Metadata& md, const google::protobuf::Message& rq,
                       google::protobuf::Message& rs, const rpc::UnaryHandler& next) {
          ++invocations;
          return next(md, rq, rs);
        };
    rpc::ServerInterceptor chained = enforce::chain(privacy, counting);
    REQUIRE(chained(metadata, *request, *response, handler).ok());
    CHECK(invocations == 1);
    REQUIRE(chained(metadata, *request, *response, handler).ok());
    CHECK(invocations == 2);
  }

  SUBCASE("privacy failure short-circuits everything downstream of it") {
    int downstream_calls = 0;
    rpc::ServerInterceptor counting =
        [&downstream_calls](const rpc::Metadata& md, const google::protobuf::Message& rq,
                            google::protobuf::Message& rs, const rpc::UnaryHandler& next) {
          ++downstream_calls;
          return next(md, rq, rs);
        };
    int handler_calls = 0;
    rpc::UnaryHandler counting_handler =
        [&handler_calls](const rpc::Metadata&, const google::protobuf::Message&,
                         google::protobuf::Message&) {
          ++handler_calls;
          return rpc::RpcStatus::Ok();
        };

    // privacy outermost, counting inner.
    rpc::ServerInterceptor chained = enforce::chain(counting, privacy);
    rpc::RpcStatus status = chained({}, *request, *response, counting_handler);
    CHECK(status.code == rpc::code::kUnauthenticated);
    CHECK(downstream_calls == 0);
    CHECK(handler_calls == 0);
  }

  SUBCASE("privacy interceptor equals intercept_response on the same seed") {
    auto via_interceptor = schemas.instance(descriptor);
    REQUIRE(privacy(metadata, *request, *via_interceptor, handler).ok());

    auto via_core = schemas.instance(descriptor);
    REQUIRE(handler(metadata, *request, *via_core).ok());
    REQUIRE(enforce::intercept_response(metadata, *via_core, config).ok());

    CHECK(via_interceptor->SerializeAsString() == via_core->SerializeAsString());
  }
}

TEST_CASE("config validation") {
  enforce::InterceptorConfig config;  // no key
  CHECK_THROWS_AS(enforce::make_privacy_interceptor(config), ParamError);

  config.verify_key = testing::test_keys().ec_public;
  config.metadata_key = "Not-Lower";
  CHECK_THROWS_AS(enforce::make_privacy_interceptor(config), ParamError);

  config.metadata_key = "";
  CHECK_THROWS_AS(enforce::make_privacy_interceptor(config), ParamError);

  config.metadata_key = "x-ok";
  CHECK_NOTHROW(enforce::make_privacy_interceptor(config));
}
