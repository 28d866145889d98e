// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_SERVER_HPP_
#define KEYSAVE_SERVER_HPP_

#include <memory>
#include <string>

#include "keysave/session.hpp"

namespace keysave {

inline constexpr int kSchemaVersion = 1;

struct ApiRequest {
  std::string method;  // "GET" or "POST"
  std::string path;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON, always carrying "schema_version": 1
};

// JSON API over a SessionStore:
//   GET  /v1/health
//   POST /v1/sessions                 {"design","direction","k","model"}
//   GET  /v1/sessions/{id}
//   POST /v1/sessions/{id}/events     {"type":"digit|char|toggle|backspace",
//                                      "value": ...}
//   GET  /v1/sessions/{id}/suggestions
//   POST /v1/predict                  {"context","direction","k"[,"model"]}
// Errors come back as {"schema_version":1,"error":{"code","message"}}.
class Api {
 public:
  Api(SessionStore& store, std::string default_model);

  ApiResponse Handle(const ApiRequest& request) const;

 private:
  ApiResponse CreateSession(const std::string& body) const;
  ApiResponse GetSession(const std::string& id) const;
  ApiResponse PostEvent(const std::string& id, const std::string& body) const;
  ApiResponse GetSuggestions(const std::string& id) const;
  ApiResponse Predict(const std::string& body) const;
  ApiResponse Health() const;

  SessionStore& store_;
  std::string default_model_;
};

// HTTP front end for Api (cpp-httplib underneath). Serves the optional
// static web client from `static_dir` when set.
class HttpServer {
 public:
  HttpServer(SessionStore& store, std::string default_model,
             std::string static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and blocks until Stop(). Returns false if the port cannot be bound.
  bool Listen(const std::string& host, int port);
  // Binds to an ephemeral port and returns it (or -1); call ListenAfterBind.
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace keysave

#endif  // KEYSAVE_SERVER_HPP_
