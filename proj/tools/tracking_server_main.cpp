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

// The demo trackingservice. Wiring selects how responses are intercepted:
// baseline (none), noop (forwarding interceptor) or enforcing (the PEP).

#include <csignal>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "plim/demo.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void handle_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Food-delivery tracking demo server"};

  std::string host = "127.0.0.1";
  int port = 50061;
  std::string wiring_name = "enforcing";
  std::string public_key_path;
  std::string metadata_key = plim::enforce::kDefaultMetadataKey;
  std::optional<uint64_t> seed;

  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port (0 picks a free one)");
  app.add_option("--wiring", wiring_name, "baseline, noop or enforcing")
      ->check(CLI::IsMember({"baseline", "noop", "enforcing"}));
  app.add_option("--public-key", public_key_path,
                 "PEM public key for token verification (enforcing wiring)");
  app.add_option("--metadata-key", metadata_key, "Metadata key carrying the token");
  app.add_option("--seed", seed, "Fixed noise seed (deterministic responses)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    plim::demo::ServerOptions options;
    options.host = host;
    options.port = port;
    options.verify_key_path = public_key_path;
    options.metadata_key = metadata_key;
    options.rng_seed = seed;

    auto wiring = plim::demo::wiring_from_name(wiring_name);
    auto server = plim::demo::run_server(*wiring, options);
    std::cout << "trackingservice (" << wiring_name << ") listening on " << host << ":"
              << server->port() << "\n";
    for (int variant : plim::demo::kVariants) {
      std::cout << "  " << plim::demo::method_path(variant) << "\n";
    }

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
    }
    server->stop();
  } catch (const plim::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
