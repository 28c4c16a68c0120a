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

#include <atomic>

#include "doctest.h"
#include "helpers.hpp"
#include "plim/demo.hpp"
#include "plim/enforce.hpp"
#include "plim/rpc.hpp"

using namespace plim;

namespace {

constexpr int64_t kNow = 1700000000;

demo::ServerOptions enforcing_options() {
  demo::ServerOptions options;
  options.verify_key = testing::test_keys().ec_public;
  options.rng_seed = 42;
  options.clock = [] { return kNow; };
  return options;
}

std::string delivery_token() {
  policy::PolicyDocument doc = testing::fixture_policy();
  return token::mint_token(doc, "trackingservice", "delivery",
                           testing::test_keys().ec_private, 1.0, kNow);
}

}  // namespace

TEST_CASE("live server round trip with enforcement") {
  auto server = demo::run_server(demo::Wiring::kEnforcing, enforcing_options());
  rpc::RpcChannel channel("127.0.0.1", server->port());

  demo::ClientOptions client;
  client.token = delivery_token();

  std::unique_ptr<google::protobuf::Message> response(demo::tracking_prototype(13).New());
  rpc::RpcStatus status = demo::fetch_tracking(channel, client, 13, response.get());
  REQUIRE(status.ok());

  const auto* descriptor = response->GetDescriptor();
  const auto* reflection = response->GetReflection();
  CHECK(reflection->GetString(*response, descriptor->FindFieldByName("name")) == "Alice");
  CHECK(reflection->GetInt32(*response, descriptor->FindFieldByName("age")) == 21);
  CHECK(reflection->GetString(*response, descriptor->FindFieldByName("zip")) == "");
  CHECK(reflection->GetDouble(*response, descriptor->FindFieldByName("order_total")) ==
        -1.0);
  server->stop();
}

TEST_CASE("fail-closed on the wire: error status and empty body") {
  auto server = demo::run_server(demo::Wiring::kEnforcing, enforcing_options());
  rpc::RpcChannel channel("127.0.0.1", server->port());

  SUBCASE("missing token") {
    std::string body = "sentinel";
    rpc::RpcStatus status = channel.call_raw(demo::method_path(13), {}, "", &body);
    CHECK(status.code == rpc::code::kUnauthenticated);
    CHECK(body.empty());
  }

  SUBCASE("tampered token") {
    std::string tok = delivery_token();
    tok[tok.find('.') + 2] = tok[tok.find('.') + 2] == 'A' ? 'B' : 'A';
    enforce::InterceptorConfig key_only;
    key_only.metadata_key = enforce::kDefaultMetadataKey;
    std::string body = "sentinel";
    rpc::RpcStatus status = channel.call_raw(
        demo::method_path(13), {{enforce::kDefaultMetadataKey, tok}}, "", &body);
    CHECK(status.code == rpc::code::kUnauthenticated);
    CHECK(body.empty());
  }

  SUBCASE("expired token") {
    policy::PolicyDocument doc = testing::fixture_policy();
    std::string tok = token::mint_token(doc, "trackingservice", "delivery",
                                        testing::test_keys().ec_private, 1.0,
                                        kNow - 7200);  // expired an hour before kNow
    std::string body = "sentinel";
    rpc::RpcStatus status = channel.call_raw(
        demo::method_path(13), {{enforce::kDefaultMetadataKey, tok}}, "", &body);
    CHECK(status.code == rpc::code::kPermissionDenied);
    CHECK(body.empty());
  }

  server->stop();
}

TEST_CASE("baseline and noop wirings forward the fixture unchanged") {
  for (demo::Wiring wiring : {demo::Wiring::kBaseline, demo::Wiring::kNoOp}) {
    CAPTURE(demo::wiring_name(wiring));
    demo::ServerOptions options;  // no key needed
    auto server = demo::run_server(wiring, options);
    rpc::RpcChannel channel("127.0.0.1", server->port());

    std::unique_ptr<google::protobuf::Message> response(
        demo::tracking_prototype(26).New());
    rpc::RpcStatus status = demo::fetch_tracking(channel, {}, 26, response.get());
    REQUIRE(status.ok());
    CHECK(response->SerializeAsString() ==
          demo::make_tracking_response(26)->SerializeAsString());
    server->stop();
  }
}

TEST_CASE("interceptor chaining on a live server") {
  std::atomic<int> observed{0};
  rpc::ServerInterceptor counting =
      [&observed](const rpc::Metadata& md, const google::protobuf::Message& rq,
                  google::protobuf::Message& rs, const rpc::UnaryHandler& next) {
        rpc::RpcStatus status = next(md, rq, rs);
        if (status.ok()) observed.fetch_add(1);
        return status;
      };

  rpc::RpcServer server;
  server.add_interceptor(counting);  // outermost: observes privacy's verdict
  server.add_interceptor(
      enforce::make_privacy_interceptor(enforcing_options().interceptor_config()));
  demo::register_tracking_methods(server);
  server.start();

  rpc::RpcChannel channel("127.0.0.1", server.port());
  demo::ClientOptions client;
  client.token = delivery_token();
  std::unique_ptr<google::protobuf::Message> response(demo::tracking_prototype(13).New());

  REQUIRE(demo::fetch_tracking(channel, client, 13, response.get()).ok());
  CHECK(observed.load() == 1);

  // Privacy failure propagates through the outer interceptor untouched.
  demo::ClientOptions no_token;
  rpc::RpcStatus status = demo::fetch_tracking(channel, no_token, 13, response.get());
  CHECK(status.code == rpc::code::kUnauthenticated);
  CHECK(observed.load() == 1);

  server.stop();
}

TEST_CASE("streaming registration is rejected") {
  rpc::RpcServer server;
  CHECK_THROWS_AS(server.register_server_streaming("/svc/Watch"), UnsupportedError);
}

TEST_CASE("unknown method and transport errors surface as statuses") {
  demo::ServerOptions options;
  auto server = demo::run_server(demo::Wiring::kBaseline, options);
  rpc::RpcChannel channel("127.0.0.1", server->port());

  std::string body;
  rpc::RpcStatus status = channel.call_raw("/no/such/Method", {}, "", &body);
  CHECK_FALSE(status.ok());
  server->stop();

  rpc::RpcChannel dead("127.0.0.1", 1);  // nothing listens there
  status = dead.call_raw(demo::method_path(13), {}, "", &body);
  CHECK(status.code == rpc::code::kUnavailable);
}

TEST_CASE("concurrent enforced calls do not interfere") {
  auto server = demo::run_server(demo::Wiring::kEnforcing, enforcing_options());
  std::string tok = delivery_token();

  std::atomic<int> failures{0};
  std::vector<std::thread> threads;
  std::string expected;
  {
    rpc::RpcChannel channel("127.0.0.1", server->port());
    demo::ClientOptions client;
    client.token = tok;
    std::unique_ptr<google::protobuf::Message> response(
        demo::tracking_prototype(13).New());
    REQUIRE(demo::fetch_tracking(channel, client, 13, response.get()).ok());
    expected = response->SerializeAsString();
  }

  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      rpc::RpcChannel channel("127.0.0.1", server->port());
      demo::ClientOptions client;
      client.token = tok;
      std::unique_ptr<google::protobuf::Message> response(
          demo::tracking_prototype(13).New());
      for (int i = 0; i < 25; ++i) {
        rpc::RpcStatus status = demo::fetch_tracking(channel, client, 13, response.get());
        // Fixed server seed: every response must be byte-identical.
        if (!status.ok() || response->SerializeAsString() != expected) {
          failures.fetch_add(1);
        }
      }
      (void)t;
    });
  }
  for (auto& thread : threads) thread.join();
  CHECK(failures.load() == 0);
  server->stop();
}
