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

#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "plim/token.hpp"

using namespace plim;

namespace {

constexpr int64_t kNow = 1700000000;

}  // namespace

TEST_CASE("mint then verify round-trips for RS256 and ES256") {
  policy::PolicyDocument doc = testing::fixture_policy();
  const policy::PurposeRule& expected =
      policy::lookup_rule(doc, "trackingservice", "delivery");
  const auto& keys = testing::test_keys();

  struct Pair {
    const token::SigningKey& sign;
    const token::VerifyKey& verify;
    token::SignAlgorithm algorithm;
  };
  for (const Pair& pair :
       {Pair{keys.rsa_private, *keys.rsa_public, token::SignAlgorithm::kRS256},
        Pair{keys.ec_private, *keys.ec_public, token::SignAlgorithm::kES256}}) {
    CAPTURE(token::algorithm_name(pair.algorithm));
    CHECK(pair.sign.algorithm() == pair.algorithm);

    std::string compact =
        token::mint_token(doc, "trackingservice", "delivery", pair.sign, 1.0, kNow);
    CHECK(std::count(compact.begin(), compact.end(), '.') == 2);

    token::PolicyClaims claims = token::verify_token(compact, pair.verify, kNow);
    CHECK(claims.service == "trackingservice");
    CHECK(claims.purpose == "delivery");
    CHECK(claims.issued_at == kNow);
    CHECK(claims.expires_at == kNow + 3600);
    CHECK(claims.rule == expected);
  }
}

TEST_CASE("minting rejects bad inputs") {
  policy::PolicyDocument doc = testing::fixture_policy();
  const auto& keys = testing::test_keys();

  CHECK_THROWS_AS(
      token::mint_token(doc, "trackingservice", "delivery", keys.rsa_private, 0.0, kNow),
      ParamError);
  CHECK_THROWS_AS(
      token::mint_token(doc, "trackingservice", "delivery", keys.rsa_private, -2.0, kNow),
      ParamError);
  CHECK_THROWS_AS(
      token::mint_token(doc, "trackingservice", "nope", keys.rsa_private, 1.0, kNow),
      NotFoundError);
}

TEST_CASE("verification failures map to distinct errors") {
  policy::PolicyDocument doc = testing::fixture_policy();
  const auto& keys = testing::test_keys();
  std::string compact =
      token::mint_token(doc, "trackingservice", "delivery", keys.ec_private, 1.0, kNow);

  SUBCASE("payload tampering breaks the signature") {
    size_t dot1 = compact.find('.');
    size_t target = dot1 + 5;  // inside the payload segment
    std::string tampered = compact;
    tampered[target] = tampered[target] == 'A' ? 'B' : 'A';
    CHECK_THROWS_AS(token::verify_token(tampered, *keys.ec_public, kNow), SignatureError);
  }

  SUBCASE("expiry is strict: invalid at exactly expires_at") {
    CHECK_NOTHROW(token::verify_token(compact, *keys.ec_public, kNow + 3599));
    CHECK_THROWS_AS(token::verify_token(compact, *keys.ec_public, kNow + 3600),
                    ExpiredError);
    CHECK_THROWS_AS(token::verify_token(compact, *keys.ec_public, kNow + 3601),
                    ExpiredError);
  }

  SUBCASE("wrong key family") {
    CHECK_THROWS_AS(token::verify_token(compact, *keys.rsa_public, kNow), SignatureError);
  }

  SUBCASE("independently generated key pair never verifies") {
    token::GeneratedKeyPair other = token::generate_key_pair(token::SignAlgorithm::kES256);
    token::VerifyKey other_public = token::VerifyKey::from_pem(other.public_pem);
    CHECK_THROWS_AS(token::verify_token(compact, other_public, kNow), SignatureError);
  }

  SUBCASE("malformed tokens") {
    CHECK_THROWS_AS(token::verify_token("", *keys.ec_public, kNow), MalformedError);
    CHECK_THROWS_AS(token::verify_token("a.b", *keys.ec_public, kNow), MalformedError);
    CHECK_THROWS_AS(token::verify_token("a.b.c.d", *keys.ec_public, kNow), MalformedError);
    CHECK_THROWS_AS(token::verify_token("!!!.???.###", *keys.ec_public, kNow),
                    MalformedError);
  }

  SUBCASE("truncated signature") {
    std::string truncated = compact.substr(0, compact.rfind('.') + 5);
    CHECK_THROWS_AS(token::verify_token(truncated, *keys.ec_public, kNow), SignatureError);
  }
}

TEST_CASE("verification is deterministic given (token, key, now)") {
  policy::PolicyDocument doc = testing::fixture_policy();
  const auto& keys = testing::test_keys();
  std::string compact =
      token::mint_token(doc, "trackingservice", "research", keys.rsa_private, 2.5, kNow);

  token::PolicyClaims first = token::verify_token(compact, *keys.rsa_public, kNow + 10);
  token::PolicyClaims second = token::verify_token(compact, *keys.rsa_public, kNow + 10);
  CHECK(first == second);
  CHECK(first.expires_at == kNow + 9000);
}

TEST_CASE("round-trip property over randomized rules and both algorithms") {
  const auto& keys = testing::test_keys();
  std::mt19937_64 rng(31337);

  for (int iteration = 0; iteration < 25; ++iteration) {
    policy::PurposeRule rule;
    rule.purpose = "p" + std::to_string(iteration);
    int fields = static_cast<int>(rng() % 8);
    for (int f = 0; f < fields; ++f) {
      std::string name = "f" + std::to_string(f);
      switch (rng() % 4) {
        case 0: rule.allowed.insert(name); break;
        case 1: rule.generalized[name] = 1.0 + static_cast<double>(rng() % 100); break;
        case 2: {
          policy::NoiseSpec spec;
          spec.epsilon = 0.25 * (1 + static_cast<double>(rng() % 8));
          if (rng() % 2 == 0) {
            spec.mechanism = policy::NoiseMechanism::kGaussian;
            spec.delta = 1e-7;
          }
          rule.noised[name] = spec;
          break;
        }
        default: rule.reduced[name] = 1.0 + static_cast<double>(rng() % 100); break;
      }
    }

    const bool use_ec = rng() % 2 == 0;
    const token::SigningKey& sign = use_ec ? keys.ec_private : keys.rsa_private;
    const token::VerifyKey& verify = use_ec ? *keys.ec_public : *keys.rsa_public;
    double hours = 0.5 + static_cast<double>(rng() % 48);

    std::string compact = token::mint_token(rule, "svc", sign, hours, kNow);
    token::PolicyClaims claims = token::verify_token(compact, verify, kNow);
    CHECK(claims.rule == rule);
    CHECK(claims.service == "svc");
    CHECK(claims.expires_at > claims.issued_at);
  }
}
