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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "plim/minimize.hpp"
#include "plim/rpc.hpp"
#include "plim/token.hpp"

namespace plim::enforce {

inline constexpr char kDefaultMetadataKey[] = "x-purpose-jwt";

// Configuration of the enforcement point. Immutable once the interceptor is
// built; shared across concurrent request handlers.
struct InterceptorConfig {
  std::shared_ptr<const token::VerifyKey> verify_key;

  // Request-metadata key carrying the compact policy token.
  std::string metadata_key = kDefaultMetadataKey;

  // Unix-seconds time source; defaults to the system clock. Injected so
  // expiry behavior is deterministic under test.
  std::function<int64_t()> clock;

  // When set, noised fields are deterministic (keyed per field name). When
  // unset, every request draws a fresh seed.
  std::optional<uint64_t> rng_seed;
};

// Per-field verdicts compiled from a verified token's rule. Lookup of any
// unlisted field yields Suppress (default deny).
class CompiledRule {
 public:
  CompiledRule() = default;

  static CompiledRule from_rule(const policy::PurposeRule& rule);

  const minimize::FieldAction& lookup(const std::string& field) const;
  size_t size() const { return actions_.size(); }

 private:
  std::unordered_map<std::string, minimize::FieldAction> actions_;
};

CompiledRule compile_rule(const token::PolicyClaims& claims);

// Rewrites every top-level field of `message` under `rule`:
//  - scalar fields (ints, floats, strings) get apply_action;
//  - everything else (bool, bytes, enum, nested, repeated, map) passes only
//    when explicitly allowed and is otherwise cleared to its default.
// Only field values change; names, order and schema never do.
rpc::RpcStatus minimize_message(google::protobuf::Message& message,
                                const CompiledRule& rule, uint64_t noise_seed);

// The enforcement core: verifies the token found in the request metadata and
// rewrites the response in place. On any token failure the response must be
// discarded by the caller; the returned status is Unauthenticated (missing/
// malformed token, bad signature), PermissionDenied (expired) or Internal.
rpc::RpcStatus intercept_response(const rpc::Metadata& request_metadata,
                                  google::protobuf::Message& response,
                                  const InterceptorConfig& config);

// Client-side helper: returns metadata with the token stored under
// config.metadata_key. Existing entries are preserved; attaching twice
// replaces the previous token.
rpc::Metadata attach_token(rpc::Metadata metadata, const std::string& compact_token,
                           const InterceptorConfig& config);

// Builds the response interceptor. Token verification happens before the
// handler runs, so an invalid token short-circuits everything downstream and
// no response payload is ever produced. Throws ParamError on an invalid
// config (missing key, non-lowercase metadata key).
rpc::ServerInterceptor make_privacy_interceptor(InterceptorConfig config);

// Forwards unchanged; used to measure bare interceptor overhead.
rpc::ServerInterceptor make_noop_interceptor();

// Composition: the returned interceptor applies `outer` around `inner`.
rpc::ServerInterceptor chain(rpc::ServerInterceptor inner, rpc::ServerInterceptor outer);

}  // namespace plim::enforce
