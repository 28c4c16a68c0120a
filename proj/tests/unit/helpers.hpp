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

#include <memory>
#include <string>

#include "plim/policy.hpp"
#include "plim/token.hpp"

namespace plim::testing {

// Key pairs are expensive to generate (RSA especially); share one set per
// test binary.
struct TestKeys {
  token::SigningKey rsa_private;
  std::shared_ptr<const token::VerifyKey> rsa_public;
  token::SigningKey ec_private;
  std::shared_ptr<const token::VerifyKey> ec_public;
};

inline const TestKeys& test_keys() {
  static const TestKeys keys = [] {
    token::GeneratedKeyPair rsa = token::generate_key_pair(token::SignAlgorithm::kRS256);
    token::GeneratedKeyPair ec = token::generate_key_pair(token::SignAlgorithm::kES256);
    return TestKeys{
        token::SigningKey::from_pem(rsa.private_pem),
        std::make_shared<const token::VerifyKey>(token::VerifyKey::from_pem(rsa.public_pem)),
        token::SigningKey::from_pem(ec.private_pem),
        std::make_shared<const token::VerifyKey>(token::VerifyKey::from_pem(ec.public_pem)),
    };
  }();
  return keys;
}

inline const char* fixture_policy_text() {
  return R"({
  "services": [
    {
      "name": "trackingservice",
      "purposes": [
        {
          "name": "delivery",
          "allowed": ["name"],
          "generalized": {"age": 10}
        },
        {
          "name": "research",
          "noised": {
            "age": {"mechanism": "laplace", "epsilon": 1.0},
            "latitude": {"mechanism": "gaussian", "epsilon": 1.0, "delta": 1e-5}
          },
          "reduced": {"zip": 4}
        }
      ]
    }
  ]
})";
}

inline policy::PolicyDocument fixture_policy() {
  return policy::parse_policy(fixture_policy_text());
}

}  // namespace plim::testing
