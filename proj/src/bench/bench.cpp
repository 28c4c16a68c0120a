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

#include "plim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace plim::bench {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kGeneralizeWidth = 10.0;
constexpr double kReduceDivisor = 10.0;
constexpr double kStringGeneralizePrefix = 3.0;
constexpr double kStringReducePrefix = 4.0;

bool is_string_kind(policy::FieldKind kind) { return kind == policy::FieldKind::kString; }

void assign_minimizer(policy::PurposeRule& rule, const policy::FieldSpec& field,
                      int slot) {
  switch (slot % 3) {
    case 0:
      rule.generalized[field.name] =
          is_string_kind(field.kind) ? kStringGeneralizePrefix : kGeneralizeWidth;
      break;
    case 1:
      rule.noised[field.name] = policy::NoiseSpec{};  // Laplace, epsilon 1, sens 1
      break;
    default:
      rule.reduced[field.name] =
          is_string_kind(field.kind) ? kStringReducePrefix : kReduceDivisor;
      break;
  }
}

}  // namespace

const char* scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::kBaseline: return "baseline";
    case Scenario::kNoOp: return "no-op";
    case Scenario::kAllDenied: return "all-denied";
    case Scenario::kAllAllowed: return "all-allowed";
    case Scenario::kMixed: return "mixed";
    case Scenario::kMaximized: return "maximized";
  }
  return "unknown";
}

std::optional<Scenario> scenario_from_name(std::string_view name) {
  for (Scenario s : kAllScenarios) {
    if (name == scenario_name(s)) return s;
  }
  if (name == "noop") return Scenario::kNoOp;
  return std::nullopt;
}

demo::Wiring wiring_for(Scenario scenario) {
  switch (scenario) {
    case Scenario::kBaseline: return demo::Wiring::kBaseline;
    case Scenario::kNoOp: return demo::Wiring::kNoOp;
    default: return demo::Wiring::kEnforcing;
  }
}

bool scenario_needs_token(Scenario scenario) {
  return wiring_for(scenario) == demo::Wiring::kEnforcing;
}

policy::PolicyDocument scenario_policy(Scenario scenario,
                                       const std::vector<policy::FieldSpec>& catalog) {
  policy::PurposeRule rule;
  rule.purpose = scenario_name(scenario);

  switch (scenario) {
    case Scenario::kAllDenied:
      break;
    case Scenario::kAllAllowed:
      for (const auto& field : catalog) rule.allowed.insert(field.name);
      break;
    case Scenario::kMixed: {
      int minimizer_slot = 0;
      for (size_t i = 0; i < catalog.size(); ++i) {
        if (i % 2 == 0) {
          rule.allowed.insert(catalog[i].name);
        } else {
          assign_minimizer(rule, catalog[i], minimizer_slot++);
        }
      }
      break;
    }
    case Scenario::kMaximized:
      for (size_t i = 0; i < catalog.size(); ++i) {
        assign_minimizer(rule, catalog[i], static_cast<int>(i));
      }
      break;
    default:
      throw BenchError(std::string(scenario_name(scenario)) +
                       " runs without a policy decision");
  }

  policy::ServicePolicy service;
  service.name = demo::kServiceName;
  service.purposes.push_back(std::move(rule));
  policy::PolicyDocument doc;
  doc.services.push_back(std::move(service));
  return doc;
}

std::string scenario_token(Scenario scenario, int variant, const token::SigningKey& key,
                           int64_t now) {
  policy::PolicyDocument doc =
      scenario_policy(scenario, demo::tracking_field_catalog(variant));
  return token::mint_token(doc, demo::kServiceName, scenario_name(scenario), key,
                           /*expiration_hours=*/24.0, now);
}

double percentile(const std::vector<double>& sorted_samples, double q) {
  if (sorted_samples.empty()) return 0.0;
  double rank = std::ceil(q / 100.0 * static_cast<double>(sorted_samples.size()));
  size_t index = rank <= 1.0 ? 0 : static_cast<size_t>(rank) - 1;
  if (index >= sorted_samples.size()) index = sorted_samples.size() - 1;
  return sorted_samples[index];
}

BenchRow run_bench(const std::string& host, int port, Scenario scenario, int fields,
                   const std::string& compact_token, const RunOptions& options) {
  if (options.concurrency < 1) throw BenchError("concurrency must be at least 1");

  demo::ClientOptions client_options;
  client_options.token = compact_token;
  client_options.metadata_key = options.metadata_key;

  const auto warmup_window = std::chrono::duration<double>(options.warmup_s);
  const auto measure_window = std::chrono::duration<double>(options.duration_s);

  std::vector<std::vector<double>> samples(options.concurrency);
  std::vector<Clock::time_point> last_finish(options.concurrency);
  std::atomic<uint64_t> errors{0};
  std::mutex diagnostic_mutex;
  std::string first_error;

  const Clock::time_point start = Clock::now();
  const Clock::time_point measure_start = start + std::chrono::duration_cast<Clock::duration>(warmup_window);
  const Clock::time_point deadline = measure_start + std::chrono::duration_cast<Clock::duration>(measure_window);

  auto user = [&](int index) {
    rpc::RpcChannel channel(host, port);
    std::unique_ptr<google::protobuf::Message> response(
        demo::tracking_prototype(fields).New());
    std::vector<double>& mine = samples[index];
    mine.reserve(4096);

    while (true) {
      Clock::time_point t0 = Clock::now();
      if (t0 >= deadline) break;
      rpc::RpcStatus status = demo::fetch_tracking(channel, client_options, fields,
                                                   response.get());
      Clock::time_point t1 = Clock::now();
      if (t0 < measure_start) continue;  // warmup, unrecorded
      if (status.ok()) {
        mine.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        last_finish[index] = t1;
      } else {
        errors.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(diagnostic_mutex);
        if (first_error.empty()) {
          first_error = "code " + std::to_string(status.code) + ": " + status.message;
        }
      }
    }
  };

  std::vector<std::thread> users;
  users.reserve(options.concurrency);
  for (int i = 0; i < options.concurrency; ++i) users.emplace_back(user, i);
  for (auto& t : users) t.join();

  std::vector<double> merged;
  Clock::time_point latest = measure_start;
  for (int i = 0; i < options.concurrency; ++i) {
    merged.insert(merged.end(), samples[i].begin(), samples[i].end());
    if (!samples[i].empty() && last_finish[i] > latest) latest = last_finish[i];
  }

  uint64_t error_count = errors.load();
  uint64_t total = merged.size() + error_count;
  if (total == 0) {
    throw BenchError("no requests completed against " + host + ":" +
                     std::to_string(port) + " (" + scenario_name(scenario) + ")");
  }
  if (static_cast<double>(error_count) > options.max_error_rate * static_cast<double>(total)) {
    throw BenchError("error rate " + std::to_string(error_count) + "/" +
                     std::to_string(total) + " exceeds the budget; first error: " +
                     first_error);
  }

  std::sort(merged.begin(), merged.end());
  double elapsed_s = std::chrono::duration<double>(latest - measure_start).count();
  if (elapsed_s <= 0.0) elapsed_s = options.duration_s;

  BenchRow row;
  row.scenario = scenario_name(scenario);
  row.fields = fields;
  row.requests = merged.size();
  row.mean_ms = std::accumulate(merged.begin(), merged.end(), 0.0) /
                static_cast<double>(merged.size());
  row.p50_ms = percentile(merged, 50.0);
  row.p95_ms = percentile(merged, 95.0);
  row.p99_ms = percentile(merged, 99.0);
  row.rps = static_cast<double>(merged.size()) / elapsed_s;
  row.errors = error_count;
  row.duration_s = options.duration_s;
  row.concurrency = options.concurrency;
  row.seed = options.seed;
  row.runs = 1;
  return row;
}

BenchRow run_cell(const std::string& host, int port, Scenario scenario, int fields,
                  const std::string& compact_token, const RunOptions& options) {
  if (options.runs < 1) throw BenchError("runs must be at least 1");
  std::vector<BenchRow> rows;
  rows.reserve(options.runs);
  for (int i = 0; i < options.runs; ++i) {
    rows.push_back(run_bench(host, port, scenario, fields, compact_token, options));
  }

  BenchRow cell = rows.front();
  cell.runs = options.runs;
  cell.requests = 0;
  cell.errors = 0;
  cell.mean_ms = cell.p50_ms = cell.p95_ms = cell.p99_ms = cell.rps = 0.0;
  for (const BenchRow& row : rows) {
    cell.requests += row.requests;
    cell.errors += row.errors;
    cell.mean_ms += row.mean_ms;
    cell.p50_ms += row.p50_ms;
    cell.p95_ms += row.p95_ms;
    cell.p99_ms += row.p99_ms;
    cell.rps += row.rps;
  }
  double n = static_cast<double>(options.runs);
  cell.mean_ms /= n;
  cell.p50_ms /= n;
  cell.p95_ms /= n;
  cell.p99_ms /= n;
  cell.rps /= n;
  return cell;
}

BenchReport run_local_matrix(const std::vector<Scenario>& scenarios,
                             const std::vector<int>& field_variants,
                             const token::SigningKey& signing_key,
                             std::shared_ptr<const token::VerifyKey> verify_key,
                             const RunOptions& options) {
  BenchReport report;
  int64_t now = static_cast<int64_t>(std::time(nullptr));

  for (Scenario scenario : scenarios) {
    demo::ServerOptions server_options;
    server_options.verify_key = verify_key;
    server_options.metadata_key = options.metadata_key;
    std::unique_ptr<rpc::RpcServer> server =
        demo::run_server(wiring_for(scenario), server_options);

    for (int fields : field_variants) {
      std::string tok = scenario_needs_token(scenario)
                            ? scenario_token(scenario, fields, signing_key, now)
                            : std::string();
      report.rows.push_back(run_cell(server_options.host, server->port(), scenario,
                                     fields, tok, options));
    }
    server->stop();
  }
  return report;
}

}  // namespace plim::bench
