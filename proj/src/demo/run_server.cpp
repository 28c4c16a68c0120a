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

#include "plim/demo.hpp"

namespace plim::demo {

const char* wiring_name(Wiring wiring) {
  switch (wiring) {
    case Wiring::kBaseline: return "baseline";
    case Wiring::kNoOp: return "noop";
    case Wiring::kEnforcing: return "enforcing";
  }
  return "unknown";
}

std::optional<Wiring> wiring_from_name(std::string_view name) {
  if (name == "baseline") return Wiring::kBaseline;
  if (name == "noop" || name == "no-op") return Wiring::kNoOp;
  if (name == "enforcing") return Wiring::kEnforcing;
  return std::nullopt;
}

enforce::InterceptorConfig ServerOptions::interceptor_config() const {
  enforce::InterceptorConfig config;
  if (verify_key) {
    config.verify_key = verify_key;
  } else if (!verify_key_path.empty()) {
    config.verify_key = std::make_shared<const token::VerifyKey>(
        token::VerifyKey::from_pem_file(verify_key_path));
  }
  config.metadata_key = metadata_key;
  config.rng_seed = rng_seed;
  config.clock = clock;
  return config;
}

std::unique_ptr<rpc::RpcServer> run_server(Wiring wiring, const ServerOptions& options) {
  switch (wiring) {
    case Wiring::kBaseline:
      return build_tracking_server_baseline(options);
    case Wiring::kNoOp:
      return build_tracking_server_noop(options);
    case Wiring::kEnforcing:
      return build_tracking_server_enforcing(options);
  }
  throw ParamError("unknown server wiring");
}

}  // namespace plim::demo
