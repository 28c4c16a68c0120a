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

#include "plim/minimize.hpp"

#include <cmath>
#include <limits>

namespace plim::minimize {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

uint64_t fnv1a64(std::string_view text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// Width/divisor for integer inputs: round half-away-from-zero, floor at 1.
int64_t integer_param(double param, const char* what) {
  if (!(param > 0.0) || !std::isfinite(param)) {
    throw ParamError(std::string(what) + " parameter must be strictly positive");
  }
  double rounded = std::round(param);
  if (rounded < 1.0) rounded = 1.0;
  if (rounded > 9.2e18) {
    throw ParamError(std::string(what) + " parameter is out of integer range");
  }
  return static_cast<int64_t>(rounded);
}

// Prefix length for string inputs: must be a non-negative integer.
uint64_t prefix_param(double param, const char* what) {
  if (param < 0.0 || !std::isfinite(param) || std::floor(param) != param) {
    throw ParamError(std::string(what) +
                     " parameter for strings must be a non-negative integer");
  }
  return static_cast<uint64_t>(param);
}

int64_t saturate_to_int64(double value) {
  // 2^63 is exactly representable; anything >= it overflows.
  if (value >= 9223372036854775808.0) return std::numeric_limits<int64_t>::max();
  if (value <= -9223372036854775808.0) return std::numeric_limits<int64_t>::min();
  return static_cast<int64_t>(value);
}

uint64_t saturate_to_uint64(double value) {
  if (value <= 0.0) return 0;
  if (value >= 18446744073709551616.0) return std::numeric_limits<uint64_t>::max();
  return static_cast<uint64_t>(value);
}

int64_t generalize_int(int64_t value, int64_t width) {
  // floor((v - 1) / width) * width + 1 with floor toward negative infinity;
  // evaluated in 128 bits so v-1 and the anchor cannot overflow.
  __int128 shifted = static_cast<__int128>(value) - 1;
  __int128 q = shifted / width;
  if (shifted % width != 0 && shifted < 0) --q;
  __int128 anchor = q * static_cast<__int128>(width) + 1;
  if (anchor < std::numeric_limits<int64_t>::min()) {
    return std::numeric_limits<int64_t>::min();
  }
  return static_cast<int64_t>(anchor);
}

uint64_t generalize_uint(uint64_t value, uint64_t width) {
  if (value == 0) return 0;  // the real anchor is negative; clamp to the type
  return (value - 1) / width * width + 1;
}

double generalize_real(double value, double param) {
  return std::floor((value - 1.0) / param) * param + 1.0;
}

}  // namespace

ScalarKind kind_of(const ScalarValue& value) {
  return static_cast<ScalarKind>(value.index());
}

NoiseRng make_field_rng(uint64_t seed, std::string_view field_name) {
  NoiseRng mixer(seed ^ fnv1a64(field_name));
  return NoiseRng(mixer());
}

ScalarValue suppress(const ScalarValue& value) {
  struct Visitor {
    ScalarValue operator()(int64_t) const { return int64_t{-1}; }
    ScalarValue operator()(uint64_t) const { return uint64_t{0}; }
    ScalarValue operator()(double) const { return -1.0; }
    ScalarValue operator()(const std::string&) const { return std::string(); }
  };
  return std::visit(Visitor{}, value);
}

ScalarValue generalize(const ScalarValue& value, double param) {
  struct Visitor {
    double param;
    ScalarValue operator()(int64_t v) const {
      return generalize_int(v, integer_param(param, "generalize"));
    }
    ScalarValue operator()(uint64_t v) const {
      return generalize_uint(v, static_cast<uint64_t>(integer_param(param, "generalize")));
    }
    ScalarValue operator()(double v) const {
      if (!(param > 0.0) || !std::isfinite(param)) {
        throw ParamError("generalize parameter must be strictly positive");
      }
      return generalize_real(v, param);
    }
    ScalarValue operator()(const std::string& v) const {
      return utf8_prefix(v, prefix_param(param, "generalize"));
    }
  };
  return std::visit(Visitor{param}, value);
}

ScalarValue noise(const ScalarValue& value, const policy::NoiseSpec& spec,
                  NoiseRng& rng) {
  struct Visitor {
    const policy::NoiseSpec& spec;
    NoiseRng& rng;
    ScalarValue operator()(int64_t v) const {
      double noised = std::round(static_cast<double>(v) + noise_sample(spec, rng));
      return saturate_to_int64(noised);
    }
    ScalarValue operator()(uint64_t v) const {
      double noised = std::round(static_cast<double>(v) + noise_sample(spec, rng));
      return saturate_to_uint64(noised);
    }
    ScalarValue operator()(double v) const { return v + noise_sample(spec, rng); }
    ScalarValue operator()(const std::string& v) const {
      // Noise is undefined for text; fall back to suppression.
      return suppress(ScalarValue(v));
    }
  };
  return std::visit(Visitor{spec, rng}, value);
}

ScalarValue reduce(const ScalarValue& value, double param) {
  struct Visitor {
    double param;
    ScalarValue operator()(int64_t v) const {
      return v / integer_param(param, "reduce");
    }
    ScalarValue operator()(uint64_t v) const {
      return v / static_cast<uint64_t>(integer_param(param, "reduce"));
    }
    ScalarValue operator()(double v) const {
      if (!(param > 0.0) || !std::isfinite(param)) {
        throw ParamError("reduce parameter must be strictly positive");
      }
      return v / param;
    }
    ScalarValue operator()(const std::string& v) const {
      return utf8_prefix(v, prefix_param(param, "reduce"));
    }
  };
  return std::visit(Visitor{param}, value);
}

ScalarValue apply_action(const ScalarValue& value, const FieldAction& action,
                         NoiseRng& rng) {
  struct Visitor {
    const ScalarValue& value;
    NoiseRng& rng;
    ScalarValue operator()(const PassAction&) const { return value; }
    ScalarValue operator()(const SuppressAction&) const { return suppress(value); }
    ScalarValue operator()(const GeneralizeAction& a) const {
      return generalize(value, a.param);
    }
    ScalarValue operator()(const NoiseAction& a) const {
      return noise(value, a.spec, rng);
    }
    ScalarValue operator()(const ReduceAction& a) const {
      return reduce(value, a.param);
    }
  };
  return std::visit(Visitor{value, rng}, action);
}

double laplace_sample(NoiseRng& rng, double scale) {
  double u = rng.next_unit_open();
  return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

double gaussian_sample(NoiseRng& rng, double sigma) {
  double u1 = rng.next_unit_open();
  double u2 = rng.next_unit_open();
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double gaussian_sigma(const policy::NoiseSpec& spec) {
  if (!spec.delta) {
    throw ParamError("gaussian mechanism requires delta");
  }
  return spec.sensitivity * std::sqrt(2.0 * std::log(1.25 / *spec.delta)) / spec.epsilon;
}

double noise_sample(const policy::NoiseSpec& spec, NoiseRng& rng) {
  if (spec.mechanism == policy::NoiseMechanism::kLaplace) {
    return laplace_sample(rng, spec.sensitivity / spec.epsilon);
  }
  return gaussian_sample(rng, gaussian_sigma(spec));
}

std::string utf8_prefix(const std::string& text, uint64_t count) {
  if (count == 0) return std::string();
  uint64_t seen = 0;
  size_t i = 0;
  while (i < text.size()) {
    // A new scalar value starts at every non-continuation byte.
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (seen == count) break;
      ++seen;
    }
    ++i;
  }
  return text.substr(0, i);
}

}  // namespace plim::minimize
