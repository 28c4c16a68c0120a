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

#include "plim/rpc.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include "httplib.h"

namespace plim::rpc {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// httplib compiles route patterns as regexes; escape so '.' in package names
// matches literally.
std::string escape_route(const std::string& path) {
  std::string out;
  out.reserve(path.size() + 8);
  for (char c : path) {
    if (std::strchr(".^$|()[]{}*+?\\", c) != nullptr) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

struct MethodSpec {
  const google::protobuf::Message* request_prototype = nullptr;
  const google::protobuf::Message* response_prototype = nullptr;
  UnaryHandler handler;
};

}  // namespace

struct RpcServer::Impl {
  httplib::Server server;
  std::thread serve_thread;
  std::map<std::string, MethodSpec> methods;
  std::vector<ServerInterceptor> interceptors;
  ServerInterceptor pipeline;  // composed at start()

  void handle(const MethodSpec& method, const httplib::Request& req,
              httplib::Response& res) {
    Metadata metadata;
    for (const auto& [key, value] : req.headers) {
      metadata[to_lower(key)] = value;
    }

    std::unique_ptr<google::protobuf::Message> request(
        method.request_prototype->New());
    std::unique_ptr<google::protobuf::Message> response(
        method.response_prototype->New());

    RpcStatus status;
    if (!request->ParseFromArray(req.body.data(), static_cast<int>(req.body.size()))) {
      status = RpcStatus::InvalidArgument("cannot parse request body");
    } else if (pipeline) {
      status = pipeline(metadata, *request, *response, method.handler);
    } else {
      status = method.handler(metadata, *request, *response);
    }

    res.set_header(wire::kStatusHeader, std::to_string(status.code));
    if (status.ok()) {
      res.set_content(response->SerializeAsString(), wire::kContentType);
    } else {
      // Fail closed: no payload accompanies an error.
      res.set_header(wire::kMessageHeader, status.message);
      res.set_content("", wire::kContentType);
    }
  }
};

RpcServer::RpcServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(16); };
}

RpcServer::~RpcServer() { stop(); }

void RpcServer::register_unary(const std::string& method_path,
                               const google::protobuf::Message* request_prototype,
                               const google::protobuf::Message* response_prototype,
                               UnaryHandler handler) {
  MethodSpec spec{request_prototype, response_prototype, std::move(handler)};
  auto [it, inserted] = impl_->methods.emplace(method_path, std::move(spec));
  if (!inserted) {
    throw UnsupportedError("method '" + method_path + "' registered twice");
  }
  MethodSpec* registered = &it->second;
  Impl* impl = impl_.get();
  impl_->server.Post(escape_route(method_path),
                     [impl, registered](const httplib::Request& req,
                                        httplib::Response& res) {
                       impl->handle(*registered, req, res);
                     });
}

void RpcServer::register_server_streaming(const std::string& method_path) {
  throw UnsupportedError("streaming method '" + method_path +
                         "' is not supported; only unary responses are intercepted");
}

void RpcServer::add_interceptor(ServerInterceptor interceptor) {
  impl_->interceptors.push_back(std::move(interceptor));
}

int RpcServer::start(const std::string& host, int port) {
  if (impl_->serve_thread.joinable()) {
    throw UnsupportedError("server already started");
  }

  // First added runs outermost.
  impl_->pipeline = nullptr;
  for (auto it = impl_->interceptors.rbegin(); it != impl_->interceptors.rend(); ++it) {
    if (!impl_->pipeline) {
      impl_->pipeline = *it;
      continue;
    }
    ServerInterceptor inner = impl_->pipeline;
    ServerInterceptor outer = *it;
    impl_->pipeline = [inner, outer](const Metadata& md,
                                     const google::protobuf::Message& req,
                                     google::protobuf::Message& resp,
                                     const UnaryHandler& next) {
      UnaryHandler bridge = [&inner, &next](const Metadata& m,
                                            const google::protobuf::Message& rq,
                                            google::protobuf::Message& rs) {
        return inner(m, rq, rs, next);
      };
      return outer(md, req, resp, bridge);
    };
  }

  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw IoError("cannot bind to an ephemeral port on " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw IoError("cannot bind to " + host + ":" + std::to_string(port));
    }
  }
  impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  port_ = bound;
  return bound;
}

void RpcServer::stop() {
  if (!impl_) return;
  if (impl_->serve_thread.joinable()) {
    impl_->server.stop();
    impl_->serve_thread.join();
  }
}

struct RpcChannel::Impl {
  httplib::Client client;

  explicit Impl(const std::string& host, int port) : client(host, port) {
    client.set_keep_alive(true);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(300, 0);
  }
};

RpcChannel::RpcChannel(const std::string& host, int port)
    : impl_(std::make_unique<Impl>(host, port)) {}

RpcChannel::~RpcChannel() = default;

RpcStatus RpcChannel::call_raw(const std::string& method_path, const Metadata& metadata,
                               const std::string& request_body,
                               std::string* response_body) {
  httplib::Headers headers(metadata.begin(), metadata.end());
  httplib::Result result =
      impl_->client.Post(method_path, headers, request_body, wire::kContentType);
  if (!result) {
    return RpcStatus::Unavailable("transport error: " +
                                  httplib::to_string(result.error()));
  }
  if (!result->has_header(wire::kStatusHeader)) {
    return RpcStatus::Internal("response lacks a status header (HTTP " +
                               std::to_string(result->status) + ")");
  }
  int status_code = 0;
  try {
    status_code = std::stoi(result->get_header_value(wire::kStatusHeader));
  } catch (const std::exception&) {
    return RpcStatus::Internal("unparsable status header");
  }
  if (status_code != code::kOk) {
    if (response_body) *response_body = result->body;
    return {status_code, result->get_header_value(wire::kMessageHeader)};
  }
  if (response_body) *response_body = result->body;
  return RpcStatus::Ok();
}

RpcStatus RpcChannel::call(const std::string& method_path, const Metadata& metadata,
                           const google::protobuf::Message& request,
                           google::protobuf::Message* response) {
  std::string body;
  RpcStatus status = call_raw(method_path, metadata, request.SerializeAsString(), &body);
  if (!status.ok()) return status;
  if (response != nullptr &&
      !response->ParseFromArray(body.data(), static_cast<int>(body.size()))) {
    return RpcStatus::Internal("cannot parse response body");
  }
  return RpcStatus::Ok();
}

}  // namespace plim::rpc
