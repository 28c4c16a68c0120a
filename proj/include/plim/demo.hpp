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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plim/enforce.hpp"
#include "plim/policy.hpp"
#include "plim/rpc.hpp"

namespace plim::demo {

// The food-delivery demo pair: a "trackingservice" server returning customer
// and order data in three response sizes, and a client that fetches it with a
// policy token attached.

inline constexpr char kServiceName[] = "trackingservice";
inline constexpr int kVariants[] = {13, 26, 52};

// RPC method path for a response-size variant (13, 26 or 52 fields).
std::string method_path(int variant);

// Prototype of the response message for a variant. Throws ParamError on an
// unknown variant.
const google::protobuf::Message& tracking_prototype(int variant);

// The demo's deterministic sample payload: the same values on every call.
std::unique_ptr<google::protobuf::Message> make_tracking_response(int variant);

// Top-level fields of a variant as a policy-lint catalog.
std::vector<policy::FieldSpec> tracking_field_catalog(int variant);

// Registers the three unary GetTracking methods.
void register_tracking_methods(rpc::RpcServer& server);

// ---- server wirings ----------------------------------------------------------

// Interceptor arrangements measured by the bench: no interceptor at all, an
// interceptor that forwards unchanged, and the full enforcement point.
enum class Wiring { kBaseline, kNoOp, kEnforcing };

const char* wiring_name(Wiring wiring);
std::optional<Wiring> wiring_from_name(std::string_view name);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port

  // Enforcing wiring only: public key, either preloaded or as a PEM path.
  std::shared_ptr<const token::VerifyKey> verify_key;
  std::string verify_key_path;

  std::string metadata_key = enforce::kDefaultMetadataKey;
  std::optional<uint64_t> rng_seed;
  std::function<int64_t()> clock;

  // Builds the PEP configuration, loading the key from disk when needed.
  enforce::InterceptorConfig interceptor_config() const;
};

std::unique_ptr<rpc::RpcServer> build_tracking_server_baseline(const ServerOptions& options);
std::unique_ptr<rpc::RpcServer> build_tracking_server_noop(const ServerOptions& options);
std::unique_ptr<rpc::RpcServer> build_tracking_server_enforcing(const ServerOptions& options);

// Builds and starts the wiring; the returned server is already serving.
std::unique_ptr<rpc::RpcServer> run_server(Wiring wiring, const ServerOptions& options);

// ---- client -------------------------------------------------------------------

struct ClientOptions {
  std::string token;  // empty: no token attached
  std::string metadata_key = enforce::kDefaultMetadataKey;
};

// Attaches the token and issues the unary call for a variant. `response` must
// be an instance of the variant's message type.
rpc::RpcStatus fetch_tracking(rpc::RpcChannel& channel, const ClientOptions& options,
                              int variant, google::protobuf::Message* response);

}  // namespace plim::demo
