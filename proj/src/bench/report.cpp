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

#include <cstdio>

#include "plim/bench.hpp"

namespace plim::bench {

namespace {

constexpr const char* kColumns[] = {"scenario", "fields", "requests", "mean_ms",
                                    "p50_ms",   "p95_ms", "p99_ms",   "rps",
                                    "errors"};

std::string format_ms(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::string format_rps(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::vector<std::string> row_cells(const BenchRow& row) {
  return {row.scenario,
          std::to_string(row.fields),
          std::to_string(row.requests),
          format_ms(row.mean_ms),
          format_ms(row.p50_ms),
          format_ms(row.p95_ms),
          format_ms(row.p99_ms),
          format_rps(row.rps),
          std::to_string(row.errors)};
}

}  // namespace

std::string to_csv(const BenchReport& report) {
  std::string out;
  for (size_t i = 0; i < std::size(kColumns); ++i) {
    if (i > 0) out.push_back(',');
    out += kColumns[i];
  }
  out.push_back('\n');
  for (const BenchRow& row : report.rows) {
    std::vector<std::string> cells = row_cells(row);
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  }
  return out;
}

std::string to_markdown(const BenchReport& report) {
  std::string out = "|";
  for (const char* column : kColumns) {
    out += " ";
    out += column;
    out += " |";
  }
  out += "\n|";
  for (size_t i = 0; i < std::size(kColumns); ++i) out += " --- |";
  out += "\n";
  for (const BenchRow& row : report.rows) {
    out += "|";
    for (const std::string& cell : row_cells(row)) {
      out += " " + cell + " |";
    }
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const BenchReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const BenchRow& row : report.rows) {
    nlohmann::ordered_json j;
    j["scenario"] = row.scenario;
    j["fields"] = row.fields;
    j["requests"] = row.requests;
    j["mean_ms"] = row.mean_ms;
    j["p50_ms"] = row.p50_ms;
    j["p95_ms"] = row.p95_ms;
    j["p99_ms"] = row.p99_ms;
    j["rps"] = row.rps;
    j["errors"] = row.errors;
    j["duration_s"] = row.duration_s;
    j["concurrency"] = row.concurrency;
    j["seed"] = row.seed;
    j["runs"] = row.runs;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["rows"] = std::move(rows);
  return out;
}

BenchReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.at("rows").is_array()) {
    throw SchemaError("bench report JSON requires a 'rows' array");
  }
  BenchReport report;
  for (const auto& row_json : j.at("rows")) {
    BenchRow row;
    row.scenario = row_json.at("scenario").get<std::string>();
    row.fields = row_json.at("fields").get<int>();
    row.requests = row_json.at("requests").get<uint64_t>();
    row.mean_ms = row_json.at("mean_ms").get<double>();
    row.p50_ms = row_json.at("p50_ms").get<double>();
    row.p95_ms = row_json.at("p95_ms").get<double>();
    row.p99_ms = row_json.at("p99_ms").get<double>();
    row.rps = row_json.at("rps").get<double>();
    row.errors = row_json.at("errors").get<uint64_t>();
    row.duration_s = row_json.at("duration_s").get<double>();
    row.concurrency = row_json.at("concurrency").get<int>();
    row.seed = row_json.at("seed").get<uint64_t>();
    row.runs = row_json.at("runs").get<int>();
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace plim::bench
