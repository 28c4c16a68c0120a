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

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <google/protobuf/message.h>

#include "plim/errors.hpp"

namespace plim::rpc {

// Request metadata: lowercase ASCII keys, single-valued.
using Metadata = std::map<std::string, std::string>;

// Canonical RPC status codes (the usual gRPC numbering).
namespace code {
inline constexpr int kOk = 0;
inline constexpr int kInvalidArgument = 3;
inline constexpr int kNotFound = 5;
inline constexpr int kPermissionDenied = 7;
inline constexpr int kInternal = 13;
inline constexpr int kUnavailable = 14;
inline constexpr int kUnimplemented = 12;
inline constexpr int kUnauthenticated = 16;
}  // namespace code

struct RpcStatus {
  int code = code::kOk;
  std::string message;

  bool ok() const { return code == code::kOk; }

  static RpcStatus Ok() { return {}; }
  static RpcStatus Unauthenticated(std::string msg) {
    return {code::kUnauthenticated, std::move(msg)};
  }
  static RpcStatus PermissionDenied(std::string msg) {
    return {code::kPermissionDenied, std::move(msg)};
  }
  static RpcStatus Internal(std::string msg) { return {code::kInternal, std::move(msg)}; }
  static RpcStatus InvalidArgument(std::string msg) {
    return {code::kInvalidArgument, std::move(msg)};
  }
  static RpcStatus NotFound(std::string msg) { return {code::kNotFound, std::move(msg)}; }
  static RpcStatus Unavailable(std::string msg) {
    return {code::kUnavailable, std::move(msg)};
  }
};

// A unary method body: fills `response` from `request`.
using UnaryHandler = std::function<RpcStatus(
    const Metadata&, const google::protobuf::Message& request,
    google::protobuf::Message& response)>;

// Server middleware. Runs around `next`; may fail before invoking it
// (short-circuiting everything downstream) or rewrite the response after it
// returns. Interceptors must not assume anything about the concrete message
// type: they see responses through the protobuf reflection interface.
using ServerInterceptor = std::function<RpcStatus(
    const Metadata&, const google::protobuf::Message& request,
    google::protobuf::Message& response, const UnaryHandler& next)>;

namespace wire {
// Transport framing: unary protobuf bodies over HTTP POST. Status travels in
// these response headers; error responses carry no body.
inline constexpr char kStatusHeader[] = "rpc-status";
inline constexpr char kMessageHeader[] = "rpc-message";
inline constexpr char kContentType[] = "application/x-protobuf";
}  // namespace wire

// A unary RPC server on a background thread. Register methods and
// interceptors, then start(). Prototypes must outlive the server (generated
// default instances always do).
class RpcServer {
 public:
  RpcServer();
  ~RpcServer();

  RpcServer(const RpcServer&) = delete;
  RpcServer& operator=(const RpcServer&) = delete;

  void register_unary(const std::string& method_path,
                      const google::protobuf::Message* request_prototype,
                      const google::protobuf::Message* response_prototype,
                      UnaryHandler handler);

  // Streaming is not part of this toolkit; registration fails loudly.
  void register_server_streaming(const std::string& method_path);

  // Interceptors run in registration order, first added outermost.
  void add_interceptor(ServerInterceptor interceptor);

  // Binds and serves; port 0 picks a free port. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

// A blocking unary client over a keep-alive connection. Not thread-safe; use
// one channel per thread.
class RpcChannel {
 public:
  RpcChannel(const std::string& host, int port);
  ~RpcChannel();

  RpcChannel(const RpcChannel&) = delete;
  RpcChannel& operator=(const RpcChannel&) = delete;

  RpcStatus call(const std::string& method_path, const Metadata& metadata,
                 const google::protobuf::Message& request,
                 google::protobuf::Message* response);

  // Raw body variant, used by tests to assert that failed calls carry no payload.
  RpcStatus call_raw(const std::string& method_path, const Metadata& metadata,
                     const std::string& request_body, std::string* response_body);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace plim::rpc
