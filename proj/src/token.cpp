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

#include "plim/token.hpp"

#include <openssl/bn.h>
#include <openssl/ecdsa.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/pem.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace plim::token {

namespace {

using nlohmann::json;

constexpr size_t kEcCoordBytes = 32;  // P-256

std::string openssl_error() {
  unsigned long code = ERR_get_error();
  if (code == 0) return "unknown OpenSSL error";
  char buf[256];
  ERR_error_string_n(code, buf, sizeof(buf));
  ERR_clear_error();
  return buf;
}

struct BioDeleter {
  void operator()(BIO* bio) const { BIO_free(bio); }
};
using BioPtr = std::unique_ptr<BIO, BioDeleter>;

std::shared_ptr<EVP_PKEY> wrap_pkey(EVP_PKEY* raw) {
  return std::shared_ptr<EVP_PKEY>(raw, [](EVP_PKEY* p) { EVP_PKEY_free(p); });
}

SignAlgorithm algorithm_for_key(EVP_PKEY* key) {
  int base = EVP_PKEY_base_id(key);
  if (base == EVP_PKEY_RSA) return SignAlgorithm::kRS256;
  if (base == EVP_PKEY_EC) {
    char group[64] = {0};
    size_t len = 0;
    if (EVP_PKEY_get_utf8_string_param(key, "group", group, sizeof(group), &len) != 1) {
      throw KeyError("cannot determine elliptic curve of key");
    }
    std::string name(group, len);
    if (name != "prime256v1" && name != "P-256" && name != "secp256r1") {
      throw KeyError("ES256 requires a P-256 key, got curve '" + name + "'");
    }
    return SignAlgorithm::kES256;
  }
  throw KeyError("unsupported key type; expected RSA or EC P-256");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KeyError("cannot read key file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---- base64url (RFC 4648 section 5, unpadded) -------------------------------

const char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string base64url_encode(const std::string& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  size_t i = 0;
  while (i + 3 <= data.size()) {
    uint32_t n = (static_cast<unsigned char>(data[i]) << 16) |
                 (static_cast<unsigned char>(data[i + 1]) << 8) |
                 static_cast<unsigned char>(data[i + 2]);
    out.push_back(kB64Chars[(n >> 18) & 63]);
    out.push_back(kB64Chars[(n >> 12) & 63]);
    out.push_back(kB64Chars[(n >> 6) & 63]);
    out.push_back(kB64Chars[n & 63]);
    i += 3;
  }
  size_t rest = data.size() - i;
  if (rest == 1) {
    uint32_t n = static_cast<unsigned char>(data[i]) << 16;
    out.push_back(kB64Chars[(n >> 18) & 63]);
    out.push_back(kB64Chars[(n >> 12) & 63]);
  } else if (rest == 2) {
    uint32_t n = (static_cast<unsigned char>(data[i]) << 16) |
                 (static_cast<unsigned char>(data[i + 1]) << 8);
    out.push_back(kB64Chars[(n >> 18) & 63]);
    out.push_back(kB64Chars[(n >> 12) & 63]);
    out.push_back(kB64Chars[(n >> 6) & 63]);
  }
  return out;
}

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '-') return 62;
  if (c == '_') return 63;
  return -1;
}

std::string base64url_decode(const std::string& text) {
  if (text.size() % 4 == 1) {
    throw MalformedError("invalid base64url length");
  }
  std::string out;
  out.reserve(text.size() / 4 * 3 + 2);
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    int v = b64_value(c);
    if (v < 0) throw MalformedError("invalid base64url character");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

// ---- ES256 signature format conversion ---------------------------------------

std::string ecdsa_der_to_raw(const unsigned char* der, size_t der_len) {
  const unsigned char* p = der;
  ECDSA_SIG* sig = d2i_ECDSA_SIG(nullptr, &p, static_cast<long>(der_len));
  if (sig == nullptr) throw KeyError("cannot decode ECDSA signature: " + openssl_error());
  const BIGNUM* r = nullptr;
  const BIGNUM* s = nullptr;
  ECDSA_SIG_get0(sig, &r, &s);
  std::string raw(2 * kEcCoordBytes, '\0');
  int ok_r = BN_bn2binpad(r, reinterpret_cast<unsigned char*>(raw.data()), kEcCoordBytes);
  int ok_s = BN_bn2binpad(s, reinterpret_cast<unsigned char*>(raw.data()) + kEcCoordBytes,
                          kEcCoordBytes);
  ECDSA_SIG_free(sig);
  if (ok_r < 0 || ok_s < 0) throw KeyError("ECDSA coordinates out of range");
  return raw;
}

// Returns empty on malformed input (treated as a bad signature by callers).
std::string ecdsa_raw_to_der(const std::string& raw) {
  if (raw.size() != 2 * kEcCoordBytes) return {};
  ECDSA_SIG* sig = ECDSA_SIG_new();
  if (sig == nullptr) return {};
  BIGNUM* r = BN_bin2bn(reinterpret_cast<const unsigned char*>(raw.data()),
                        kEcCoordBytes, nullptr);
  BIGNUM* s = BN_bin2bn(reinterpret_cast<const unsigned char*>(raw.data()) + kEcCoordBytes,
                        kEcCoordBytes, nullptr);
  if (r == nullptr || s == nullptr || ECDSA_SIG_set0(sig, r, s) != 1) {
    BN_free(r);
    BN_free(s);
    ECDSA_SIG_free(sig);
    return {};
  }
  unsigned char* der = nullptr;
  int der_len = i2d_ECDSA_SIG(sig, &der);
  ECDSA_SIG_free(sig);
  if (der_len <= 0) return {};
  std::string out(reinterpret_cast<char*>(der), static_cast<size_t>(der_len));
  OPENSSL_free(der);
  return out;
}

}  // namespace

const char* algorithm_name(SignAlgorithm algorithm) {
  return algorithm == SignAlgorithm::kRS256 ? "RS256" : "ES256";
}

SigningKey SigningKey::from_pem(const std::string& pem) {
  BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
  if (!bio) throw KeyError("cannot allocate key buffer");
  EVP_PKEY* raw = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
  if (raw == nullptr) throw KeyError("cannot parse PEM private key: " + openssl_error());
  auto key = wrap_pkey(raw);
  return SigningKey(key, algorithm_for_key(raw));
}

SigningKey SigningKey::from_pem_file(const std::string& path) {
  return from_pem(read_file(path));
}

std::string SigningKey::sign(const std::string& signing_input) const {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw KeyError("cannot allocate digest context");
  std::string signature;
  try {
    if (EVP_DigestSignInit(ctx, nullptr, EVP_sha256(), nullptr, key_.get()) != 1) {
      throw KeyError("cannot initialize signing: " + openssl_error());
    }
    size_t sig_len = 0;
    if (EVP_DigestSign(ctx, nullptr, &sig_len,
                       reinterpret_cast<const unsigned char*>(signing_input.data()),
                       signing_input.size()) != 1) {
      throw KeyError("cannot size signature: " + openssl_error());
    }
    std::string buf(sig_len, '\0');
    if (EVP_DigestSign(ctx, reinterpret_cast<unsigned char*>(buf.data()), &sig_len,
                       reinterpret_cast<const unsigned char*>(signing_input.data()),
                       signing_input.size()) != 1) {
      throw KeyError("signing failed: " + openssl_error());
    }
    buf.resize(sig_len);
    signature = algorithm_ == SignAlgorithm::kES256
                    ? ecdsa_der_to_raw(reinterpret_cast<const unsigned char*>(buf.data()),
                                       buf.size())
                    : buf;
  } catch (...) {
    EVP_MD_CTX_free(ctx);
    throw;
  }
  EVP_MD_CTX_free(ctx);
  return signature;
}

VerifyKey VerifyKey::from_pem(const std::string& pem) {
  BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
  if (!bio) throw KeyError("cannot allocate key buffer");
  EVP_PKEY* raw = PEM_read_bio_PUBKEY(bio.get(), nullptr, nullptr, nullptr);
  if (raw == nullptr) throw KeyError("cannot parse PEM public key: " + openssl_error());
  auto key = wrap_pkey(raw);
  return VerifyKey(key, algorithm_for_key(raw));
}

VerifyKey VerifyKey::from_pem_file(const std::string& path) {
  return from_pem(read_file(path));
}

bool VerifyKey::verify(const std::string& signing_input,
                       const std::string& signature) const {
  std::string sig = signature;
  if (algorithm_ == SignAlgorithm::kES256) {
    sig = ecdsa_raw_to_der(signature);
    if (sig.empty()) return false;
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) return false;
  bool ok = EVP_DigestVerifyInit(ctx, nullptr, EVP_sha256(), nullptr, key_.get()) == 1 &&
            EVP_DigestVerify(ctx, reinterpret_cast<const unsigned char*>(sig.data()),
                             sig.size(),
                             reinterpret_cast<const unsigned char*>(signing_input.data()),
                             signing_input.size()) == 1;
  EVP_MD_CTX_free(ctx);
  ERR_clear_error();
  return ok;
}

std::string mint_token(const policy::PolicyDocument& doc, const std::string& service,
                       const std::string& purpose, const SigningKey& key,
                       double expiration_hours, int64_t now) {
  const policy::PurposeRule& rule = policy::lookup_rule(doc, service, purpose);
  return mint_token(rule, service, key, expiration_hours, now);
}

std::string mint_token(const policy::PurposeRule& rule, const std::string& service,
                       const SigningKey& key, double expiration_hours, int64_t now) {
  if (!(expiration_hours > 0.0) || !std::isfinite(expiration_hours)) {
    throw ParamError("expiration_hours must be strictly positive");
  }
  int64_t lifetime = static_cast<int64_t>(std::llround(expiration_hours * 3600.0));
  if (lifetime <= 0) {
    throw ParamError("expiration_hours is too small; the token would expire at issuance");
  }

  json header;
  header["alg"] = algorithm_name(key.algorithm());
  header["typ"] = "JWT";

  json payload;
  payload["sub"] = service;
  payload["purpose"] = rule.purpose;
  payload["policy"] = policy::rule_to_json(rule);
  payload["iat"] = now;
  payload["exp"] = now + lifetime;

  std::string signing_input =
      base64url_encode(header.dump()) + "." + base64url_encode(payload.dump());
  return signing_input + "." + base64url_encode(key.sign(signing_input));
}

PolicyClaims verify_token(const std::string& compact_token, const VerifyKey& key,
                          int64_t now) {
  size_t dot1 = compact_token.find('.');
  size_t dot2 = compact_token.find('.', dot1 == std::string::npos ? 0 : dot1 + 1);
  if (dot1 == std::string::npos || dot2 == std::string::npos ||
      compact_token.find('.', dot2 + 1) != std::string::npos) {
    throw MalformedError("token is not a three-part compact serialization");
  }
  std::string header_b64 = compact_token.substr(0, dot1);
  std::string payload_b64 = compact_token.substr(dot1 + 1, dot2 - dot1 - 1);
  std::string signature_b64 = compact_token.substr(dot2 + 1);
  if (header_b64.empty() || payload_b64.empty() || signature_b64.empty()) {
    throw MalformedError("token has an empty segment");
  }

  json header;
  try {
    header = json::parse(base64url_decode(header_b64));
  } catch (const json::parse_error&) {
    throw MalformedError("token header is not valid JSON");
  }
  if (!header.is_object() || !header.contains("alg") || !header.at("alg").is_string()) {
    throw MalformedError("token header lacks an algorithm");
  }
  std::string alg = header.at("alg").get<std::string>();
  if (alg != "RS256" && alg != "ES256") {
    throw MalformedError("unsupported token algorithm '" + alg + "'");
  }
  if (alg != algorithm_name(key.algorithm())) {
    throw SignatureError("token algorithm " + alg + " does not match the " +
                         std::string(algorithm_name(key.algorithm())) + " key");
  }

  // Verify before trusting any claim, including exp.
  std::string signature = base64url_decode(signature_b64);
  if (!key.verify(header_b64 + "." + payload_b64, signature)) {
    throw SignatureError("token signature does not verify");
  }

  json payload;
  try {
    payload = json::parse(base64url_decode(payload_b64));
  } catch (const json::parse_error&) {
    throw MalformedError("token payload is not valid JSON");
  }
  if (!payload.is_object()) throw MalformedError("token payload must be an object");
  for (const char* claim : {"sub", "purpose", "policy", "iat", "exp"}) {
    if (!payload.contains(claim)) {
      throw MalformedError(std::string("token payload lacks claim '") + claim + "'");
    }
  }
  if (!payload.at("sub").is_string() || !payload.at("purpose").is_string() ||
      !payload.at("iat").is_number_integer() || !payload.at("exp").is_number_integer()) {
    throw MalformedError("token payload has mistyped claims");
  }

  PolicyClaims claims;
  claims.service = payload.at("sub").get<std::string>();
  claims.purpose = payload.at("purpose").get<std::string>();
  claims.issued_at = payload.at("iat").get<int64_t>();
  claims.expires_at = payload.at("exp").get<int64_t>();
  if (claims.expires_at <= claims.issued_at) {
    throw MalformedError("token expires before it was issued");
  }
  try {
    claims.rule = policy::rule_from_json(payload.at("policy"), claims.purpose);
  } catch (const Error& e) {
    throw MalformedError(std::string("token carries an invalid rule: ") + e.what());
  }

  if (now >= claims.expires_at) {
    throw ExpiredError("token expired at " + std::to_string(claims.expires_at) +
                       " (now " + std::to_string(now) + ")");
  }
  return claims;
}

GeneratedKeyPair generate_key_pair(SignAlgorithm algorithm) {
  EVP_PKEY* raw = algorithm == SignAlgorithm::kRS256
                      ? EVP_PKEY_Q_keygen(nullptr, nullptr, "RSA", size_t{2048})
                      : EVP_PKEY_Q_keygen(nullptr, nullptr, "EC", "P-256");
  if (raw == nullptr) throw KeyError("key generation failed: " + openssl_error());
  auto key = wrap_pkey(raw);

  auto pem_of = [](EVP_PKEY* pkey, bool is_private) {
    BioPtr bio(BIO_new(BIO_s_mem()));
    if (!bio) throw KeyError("cannot allocate PEM buffer");
    int ok = is_private ? PEM_write_bio_PrivateKey(bio.get(), pkey, nullptr, nullptr, 0,
                                                   nullptr, nullptr)
                        : PEM_write_bio_PUBKEY(bio.get(), pkey);
    if (ok != 1) throw KeyError("cannot encode PEM: " + openssl_error());
    char* data = nullptr;
    long len = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, static_cast<size_t>(len));
  };

  return GeneratedKeyPair{pem_of(raw, true), pem_of(raw, false)};
}

}  // namespace plim::token
