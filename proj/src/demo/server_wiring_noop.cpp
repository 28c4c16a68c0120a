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

std::unique_ptr<rpc::RpcServer> build_tracking_server_noop(const ServerOptions& options) {
  auto server = std::make_unique<rpc::RpcServer>();
  server->add_interceptor(enforce::make_noop_interceptor());
  register_tracking_methods(*server);
  server->start(options.host, options.port);
  return server;
}

}  // namespace plim::demo
