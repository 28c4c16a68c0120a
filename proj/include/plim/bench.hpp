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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "plim/demo.hpp"
#include "plim/policy.hpp"
#include "plim/token.hpp"

namespace plim::bench {

// The six measured degrees of operational complexity. Baseline runs without
// an interceptor, NoOp with a forwarding interceptor; the remaining four run
// the enforcement point with different rules.
enum class Scenario { kBaseline, kNoOp, kAllDenied, kAllAllowed, kMixed, kMaximized };

inline constexpr Scenario kAllScenarios[] = {
    Scenario::kBaseline, Scenario::kNoOp,  Scenario::kAllDenied,
    Scenario::kAllAllowed, Scenario::kMixed, Scenario::kMaximized,
};

const char* scenario_name(Scenario scenario);
std::optional<Scenario> scenario_from_name(std::string_view name);

demo::Wiring wiring_for(Scenario scenario);
bool scenario_needs_token(Scenario scenario);

// The policy for a scenario over a message's field catalog.
//   all-denied:  empty rule (everything suppressed)
//   all-allowed: every field allowed
//   mixed:       fields at even positions allowed; the rest cycle through
//                generalize / noise / reduce
//   maximized:   every field cycles through generalize / noise / reduce
// Parameters: numerics generalize with width 10, reduce with divisor 10,
// Laplace noise (epsilon 1, sensitivity 1); strings generalize to a 3-char
// and reduce to a 4-char prefix.
policy::PolicyDocument scenario_policy(Scenario scenario,
                                       const std::vector<policy::FieldSpec>& catalog);

// Mints the token a client presents for (scenario, variant), 24h lifetime.
std::string scenario_token(Scenario scenario, int variant,
                           const token::SigningKey& key, int64_t now);

struct RunOptions {
  int concurrency = 10;       // closed-loop virtual users
  double duration_s = 60.0;   // measured window per run
  double warmup_s = 10.0;     // unrecorded ramp-up per run
  int runs = 3;               // repetitions averaged per cell
  uint64_t seed = 1;          // recorded in the report
  double max_error_rate = 0.01;
  std::string metadata_key = enforce::kDefaultMetadataKey;
};

// One (scenario, fields) cell. Latencies are client-side, send to full
// decode, in milliseconds.
struct BenchRow {
  std::string scenario;
  int fields = 0;
  uint64_t requests = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
  double rps = 0.0;
  uint64_t errors = 0;
  double duration_s = 0.0;
  int concurrency = 0;
  uint64_t seed = 0;
  int runs = 1;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

// Nearest-rank percentile of an ascending-sorted sample vector.
double percentile(const std::vector<double>& sorted_samples, double q);

// One measured run against a live server. The server must be wired to match
// the scenario (baseline/noop wiring for those scenarios, enforcing for the
// rest). Throws BenchError when the error rate exceeds max_error_rate.
BenchRow run_bench(const std::string& host, int port, Scenario scenario, int fields,
                   const std::string& compact_token, const RunOptions& options);

// options.runs repetitions of run_bench, averaged into one row.
BenchRow run_cell(const std::string& host, int port, Scenario scenario, int fields,
                  const std::string& compact_token, const RunOptions& options);

// Full local matrix: builds the matching in-process server per scenario,
// mints tokens with `signing_key`, and measures every (scenario, fields)
// cell. verify_key must match signing_key.
BenchReport run_local_matrix(const std::vector<Scenario>& scenarios,
                             const std::vector<int>& field_variants,
                             const token::SigningKey& signing_key,
                             std::shared_ptr<const token::VerifyKey> verify_key,
                             const RunOptions& options);

// ---- report emission ----------------------------------------------------------
// Column order is fixed: scenario, fields, requests, mean_ms, p50_ms, p95_ms,
// p99_ms, rps, errors.

std::string to_csv(const BenchReport& report);
std::string to_markdown(const BenchReport& report);
nlohmann::ordered_json to_json(const BenchReport& report);
BenchReport report_from_json(const nlohmann::json& j);

}  // namespace plim::bench
