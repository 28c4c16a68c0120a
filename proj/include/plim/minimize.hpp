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
#include <string>
#include <string_view>
#include <variant>

#include "plim/errors.hpp"
#include "plim/policy.hpp"

namespace plim::minimize {

// A field value of one of the four supported scalar kinds. Every transform
// preserves the alternative that goes in (type preservation).
using ScalarValue = std::variant<int64_t, uint64_t, double, std::string>;

enum class ScalarKind { kInt, kUint, kFloat, kString };

ScalarKind kind_of(const ScalarValue& value);

// splitmix64. Sampling is implemented in-repo on top of this engine so a
// seeded run produces identical values on every standard library.
class NoiseRng {
 public:
  using result_type = uint64_t;

  explicit NoiseRng(uint64_t seed) : state_(seed) {}

  uint64_t operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double next_unit_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ULL; }

 private:
  uint64_t state_;
};

// Derives the noise stream for one field from (seed, field name). Keyed by
// name so offline preview and online enforcement agree regardless of the
// order in which fields are visited.
NoiseRng make_field_rng(uint64_t seed, std::string_view field_name);

// ---- per-field verdicts -----------------------------------------------------

struct PassAction {
  friend bool operator==(const PassAction&, const PassAction&) = default;
};
struct SuppressAction {
  friend bool operator==(const SuppressAction&, const SuppressAction&) = default;
};
struct GeneralizeAction {
  double param = 1.0;
  friend bool operator==(const GeneralizeAction&, const GeneralizeAction&) = default;
};
struct NoiseAction {
  policy::NoiseSpec spec;
  friend bool operator==(const NoiseAction&, const NoiseAction&) = default;
};
struct ReduceAction {
  double param = 1.0;
  friend bool operator==(const ReduceAction&, const ReduceAction&) = default;
};

using FieldAction =
    std::variant<PassAction, SuppressAction, GeneralizeAction, NoiseAction, ReduceAction>;

// ---- transforms -------------------------------------------------------------

// Type-preserving sentinel: signed -> -1, float -> -1.0, unsigned -> 0 (the
// sentinel -1 is unrepresentable, and 0 may also be a legal value; callers
// should be aware), string -> "".
ScalarValue suppress(const ScalarValue& value);

// Numerics map to the anchor of their bucket: floor((v - 1) / param) * param + 1
// with floor division toward negative infinity; strings keep their first
// `param` characters (Unicode scalar values). For integer values a fractional
// param is rounded half-away-from-zero to a width >= 1.
ScalarValue generalize(const ScalarValue& value, double param);

// Adds calibrated Laplace or Gaussian noise to numerics; integers are computed
// in double, rounded half-away-from-zero and saturated. Strings are suppressed.
ScalarValue noise(const ScalarValue& value, const policy::NoiseSpec& spec, NoiseRng& rng);

// Numerics are divided by param (truncating for integers); strings keep their
// first `param` characters, same mechanism as string generalization.
ScalarValue reduce(const ScalarValue& value, double param);

ScalarValue apply_action(const ScalarValue& value, const FieldAction& action,
                         NoiseRng& rng);

// ---- sampling ---------------------------------------------------------------

// Zero-mean Laplace with the given scale; variance 2*scale^2.
double laplace_sample(NoiseRng& rng, double scale);

// Zero-mean Gaussian with the given standard deviation.
double gaussian_sample(NoiseRng& rng, double sigma);

// Classic Gaussian-mechanism calibration:
// sigma = sensitivity * sqrt(2 * ln(1.25 / delta)) / epsilon.
// Throws ParamError when delta is missing.
double gaussian_sigma(const policy::NoiseSpec& spec);

// One sample of the mechanism described by spec.
double noise_sample(const policy::NoiseSpec& spec, NoiseRng& rng);

// First `count` Unicode scalar values of a UTF-8 string (whole string if shorter).
std::string utf8_prefix(const std::string& text, uint64_t count);

}  // namespace plim::minimize
