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

#include "json.hpp"

#include "plim/enforce.hpp"
#include "plim/minimize.hpp"

namespace plim::preview {

// Offline simulation of the enforcement point on a flat JSON object of
// scalars. Shares the transform and per-field RNG derivation with the online
// path, so seeded outputs match the wire bit for bit.

// JSON value -> scalar. Numbers with a fractional part become floats, other
// numbers signed integers (unsigned when they exceed the signed range);
// strings stay strings. Anything else is rejected with SchemaError.
minimize::ScalarValue scalar_from_json(const nlohmann::json& value);

nlohmann::ordered_json scalar_to_json(const minimize::ScalarValue& value);

// Applies the rule to every member of `message`, preserving member order.
nlohmann::ordered_json minimize_flat_json(const nlohmann::ordered_json& message,
                                          const enforce::CompiledRule& rule,
                                          uint64_t noise_seed);

// The top-level scalar fields of a protobuf message as a flat JSON object in
// descriptor order. Non-scalar fields (and bytes/bool) are skipped.
nlohmann::ordered_json message_to_flat_json(const google::protobuf::Message& message);

}  // namespace plim::preview
