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

// The demo frontend: fetches tracking data with a policy token attached and
// prints the (already minimized) response as flat JSON.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "plim/demo.hpp"
#include "plim/preview.hpp"

namespace {

std::string parse_host(const std::string& target) {
  auto colon = target.rfind(':');
  return colon == std::string::npos ? target : target.substr(0, colon);
}

int parse_port(const std::string& target) {
  auto colon = target.rfind(':');
  if (colon == std::string::npos) return 50061;
  return std::stoi(target.substr(colon + 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Food-delivery tracking demo client"};

  std::string target = "127.0.0.1:50061";
  int variant = 13;
  std::string token;
  std::string token_file;
  std::string metadata_key = plim::enforce::kDefaultMetadataKey;

  app.add_option("--target", target, "host:port of the trackingservice");
  app.add_option("--variant", variant, "Response size: 13, 26 or 52 fields")
      ->check(CLI::IsMember({13, 26, 52}));
  app.add_option("--token", token, "Compact policy token");
  app.add_option("--token-file", token_file, "File holding the compact token");
  app.add_option("--metadata-key", metadata_key, "Metadata key carrying the token");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (token.empty() && !token_file.empty()) {
      std::ifstream in(token_file, std::ios::binary);
      if (!in) throw plim::IoError("cannot read '" + token_file + "'");
      std::ostringstream buffer;
      buffer << in.rdbuf();
      token = buffer.str();
      while (!token.empty() && (token.back() == '\n' || token.back() == '\r')) {
        token.pop_back();
      }
    }

    plim::rpc::RpcChannel channel(parse_host(target), parse_port(target));
    plim::demo::ClientOptions options;
    options.token = token;
    options.metadata_key = metadata_key;

    std::unique_ptr<google::protobuf::Message> response(
        plim::demo::tracking_prototype(variant).New());
    plim::rpc::RpcStatus status =
        plim::demo::fetch_tracking(channel, options, variant, response.get());
    if (!status.ok()) {
      std::cerr << "error[Rpc]: code " << status.code << ": " << status.message << "\n";
      return 1;
    }
    std::cout << plim::preview::message_to_flat_json(*response).dump(2) << "\n";
  } catch (const plim::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
