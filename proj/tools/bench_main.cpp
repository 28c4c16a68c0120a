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

// Closed-loop load harness against a running trackingservice. The server must
// be wired to match the requested scenarios: baseline/no-op scenarios expect
// the same-named wiring, every other scenario expects the enforcing wiring.

#include <ctime>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "plim/bench.hpp"

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
  CLI::App app{"Latency/throughput harness for the tracking demo"};

  std::string target = "127.0.0.1:50061";
  std::vector<std::string> scenario_names;
  std::vector<int> fields = {13, 26, 52};
  int concurrency = 10;
  double duration_s = 60.0;
  double warmup_s = 10.0;
  int runs = 3;
  std::string format = "csv";
  std::string out_path;
  std::string signing_key_path;
  std::string metadata_key = plim::enforce::kDefaultMetadataKey;
  uint64_t seed = 1;

  app.add_option("--target", target, "host:port of the running server");
  app.add_option("--scenario", scenario_names,
                 "baseline, no-op, all-denied, all-allowed, mixed, maximized "
                 "(repeatable; default: all six)");
  app.add_option("--fields", fields, "Field-count variants (repeatable)")
      ->check(CLI::IsMember({13, 26, 52}));
  app.add_option("--concurrency", concurrency, "Closed-loop virtual users");
  app.add_option("--duration-s", duration_s, "Measured seconds per run");
  app.add_option("--warmup-s", warmup_s, "Unrecorded warmup seconds per run");
  app.add_option("--runs", runs, "Runs averaged per cell");
  app.add_option("--format", format, "csv, json or markdown")
      ->check(CLI::IsMember({"csv", "json", "markdown"}));
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--signing-key", signing_key_path,
                 "PEM private key for minting scenario tokens (needed for "
                 "all-denied/all-allowed/mixed/maximized)");
  app.add_option("--metadata-key", metadata_key, "Metadata key carrying the token");
  app.add_option("--seed", seed, "Recorded run seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::vector<plim::bench::Scenario> scenarios;
    if (scenario_names.empty()) {
      scenarios.assign(std::begin(plim::bench::kAllScenarios),
                       std::end(plim::bench::kAllScenarios));
    } else {
      for (const auto& name : scenario_names) {
        auto scenario = plim::bench::scenario_from_name(name);
        if (!scenario) throw plim::BenchError("unknown scenario '" + name + "'");
        scenarios.push_back(*scenario);
      }
    }

    std::optional<plim::token::SigningKey> signing_key;
    for (auto scenario : scenarios) {
      if (plim::bench::scenario_needs_token(scenario) && !signing_key) {
        if (signing_key_path.empty()) {
          throw plim::BenchError(
              "--signing-key is required for scenarios that mint tokens");
        }
        signing_key = plim::token::SigningKey::from_pem_file(signing_key_path);
      }
    }

    plim::bench::RunOptions options;
    options.concurrency = concurrency;
    options.duration_s = duration_s;
    options.warmup_s = warmup_s;
    options.runs = runs;
    options.seed = seed;
    options.metadata_key = metadata_key;

    const std::string host = parse_host(target);
    const int port = parse_port(target);
    const int64_t now = static_cast<int64_t>(std::time(nullptr));

    plim::bench::BenchReport report;
    for (auto scenario : scenarios) {
      for (int variant : fields) {
        std::string tok = plim::bench::scenario_needs_token(scenario)
                              ? plim::bench::scenario_token(scenario, variant,
                                                            *signing_key, now)
                              : std::string();
        std::cerr << "running " << plim::bench::scenario_name(scenario) << " / "
                  << variant << " fields (" << runs << "x" << duration_s << "s)...\n";
        report.rows.push_back(
            plim::bench::run_cell(host, port, scenario, variant, tok, options));
      }
    }

    std::string rendered;
    if (format == "csv") {
      rendered = plim::bench::to_csv(report);
    } else if (format == "json") {
      rendered = plim::bench::to_json(report).dump(2) + "\n";
    } else {
      rendered = plim::bench::to_markdown(report);
    }

    if (out_path.empty()) {
      std::cout << rendered;
    } else {
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw plim::IoError("cannot write '" + out_path + "'");
      out << rendered;
    }
  } catch (const plim::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
