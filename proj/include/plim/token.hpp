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
#include <memory>
#include <string>

#include "plim/errors.hpp"
#include "plim/policy.hpp"

typedef struct evp_pkey_st EVP_PKEY;

namespace plim::token {

// RFC 7518 algorithm names. RS256 pairs with an RSA key, ES256 with a P-256
// elliptic-curve key.
enum class SignAlgorithm { kRS256, kES256 };

const char* algorithm_name(SignAlgorithm algorithm);

// An asymmetric private key (PKCS#8 PEM). The algorithm is inferred from the
// key type. Immutable and safe to share across threads.
class SigningKey {
 public:
  static SigningKey from_pem(const std::string& pem);
  static SigningKey from_pem_file(const std::string& path);

  SignAlgorithm algorithm() const { return algorithm_; }

  // Raw JWS signature (PKCS#1 v1.5 for RS256, 64-byte R||S for ES256) over
  // the ASCII signing input. Throws KeyError on failure.
  std::string sign(const std::string& signing_input) const;

 private:
  SigningKey(std::shared_ptr<EVP_PKEY> key, SignAlgorithm algorithm)
      : key_(std::move(key)), algorithm_(algorithm) {}

  std::shared_ptr<EVP_PKEY> key_;
  SignAlgorithm algorithm_;
};

// The matching public key (SPKI PEM).
class VerifyKey {
 public:
  static VerifyKey from_pem(const std::string& pem);
  static VerifyKey from_pem_file(const std::string& path);

  SignAlgorithm algorithm() const { return algorithm_; }

  bool verify(const std::string& signing_input, const std::string& signature) const;

 private:
  VerifyKey(std::shared_ptr<EVP_PKEY> key, SignAlgorithm algorithm)
      : key_(std::move(key)), algorithm_(algorithm) {}

  std::shared_ptr<EVP_PKEY> key_;
  SignAlgorithm algorithm_;
};

// Claims carried by a policy token: "sub" (service), "purpose", "policy" (the
// four-category rule in the policy-file JSON shape), "iat" and "exp".
struct PolicyClaims {
  std::string service;
  std::string purpose;
  policy::PurposeRule rule;
  int64_t issued_at = 0;
  int64_t expires_at = 0;

  friend bool operator==(const PolicyClaims&, const PolicyClaims&) = default;
};

// Mints a compact token for the rule resolved via lookup_rule. expires_at is
// now + expiration_hours * 3600 (rounded to whole seconds) and must exceed
// issued_at. Throws NotFoundError, ParamError or KeyError.
std::string mint_token(const policy::PolicyDocument& doc, const std::string& service,
                       const std::string& purpose, const SigningKey& key,
                       double expiration_hours, int64_t now);

// Same, for an already-resolved rule.
std::string mint_token(const policy::PurposeRule& rule, const std::string& service,
                       const SigningKey& key, double expiration_hours, int64_t now);

// Verifies structure, signature, freshness (strict: a token is invalid at
// exactly expires_at) and the embedded rule's invariants. Throws
// MalformedError, SignatureError or ExpiredError.
PolicyClaims verify_token(const std::string& compact_token, const VerifyKey& key,
                          int64_t now);

// Dev-only key generation (RSA-2048 or EC P-256); production deployments are
// expected to bring their own managed keys.
struct GeneratedKeyPair {
  std::string private_pem;
  std::string public_pem;
};

GeneratedKeyPair generate_key_pair(SignAlgorithm algorithm);

}  // namespace plim::token
