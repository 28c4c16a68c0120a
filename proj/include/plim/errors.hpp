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

#include <stdexcept>
#include <string>

namespace plim {

// Base of every domain error the toolkit raises. kind() is a stable,
// machine-greppable identifier; the CLI prints it as "error[<kind>]: ...".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define PLIM_DEFINE_ERROR(NAME, KIND)                                    \
  class NAME : public Error {                                            \
   public:                                                               \
    explicit NAME(const std::string& message) : Error(KIND, message) {}  \
  }

// Policy parsing and lookup.
PLIM_DEFINE_ERROR(SyntaxError, "Syntax");        // malformed JSON
PLIM_DEFINE_ERROR(SchemaError, "Schema");        // wrong keys/types in a policy
PLIM_DEFINE_ERROR(ConflictError, "Conflict");    // field in two categories
PLIM_DEFINE_ERROR(ParamError, "Param");          // out-of-range parameter
PLIM_DEFINE_ERROR(NotFoundError, "NotFound");    // unknown service/purpose

// Tokens.
PLIM_DEFINE_ERROR(KeyError, "Key");              // unreadable/mismatched key material
PLIM_DEFINE_ERROR(SignatureError, "Signature");  // tampered token or wrong key
PLIM_DEFINE_ERROR(ExpiredError, "Expired");      // now >= expires_at
PLIM_DEFINE_ERROR(MalformedError, "Malformed");  // not a compact token / bad claims

// Plumbing.
PLIM_DEFINE_ERROR(IoError, "Io");
PLIM_DEFINE_ERROR(UnsupportedError, "Unsupported");
PLIM_DEFINE_ERROR(BenchError, "Bench");

#undef PLIM_DEFINE_ERROR

}  // namespace plim
