// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/server.hpp"

#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "keysave/remote.hpp"

namespace keysave {
namespace {

using Json = nlohmann::ordered_json;

ApiResponse Reply(int status, Json body) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = *it;
  return {status, out.dump()};
}

ApiResponse Error(int status, std::string_view code, const std::string& msg) {
  return Reply(status, Json{{"error", {{"code", code}, {"message", msg}}}});
}

Json SnapshotJson(const SessionSnapshot& s) {
  Json j;
  j["session_id"] = s.session_id;
  j["model"] = s.model_tag;
  j["design"] = DesignName(s.design);
  j["direction"] = DirectionName(s.direction);
  j["k"] = s.k;
  j["text"] = s.text;
  j["pending"] = s.pending;
  j["ledger"] = {{"actual", s.actual},
                 {"manual_equivalent", s.manual_equivalent},
                 {"saved", static_cast<std::int64_t>(s.manual_equivalent) -
                               static_cast<std::int64_t>(s.actual)}};
  j["ae"] = s.ae ? Json(*s.ae) : Json(nullptr);
  j["ae_defined"] = s.ae.has_value();
  j["events"] = s.events;
  return j;
}

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string::npos) slash = path.size();
    if (slash > start) parts.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

Json ParseBody(const std::string& body) {
  if (body.empty()) return Json::object();
  auto j = Json::parse(body);
  if (!j.is_object()) throw UsageError("request body must be a JSON object");
  return j;
}

}  // namespace

Api::Api(SessionStore& store, std::string default_model)
    : store_(store), default_model_(std::move(default_model)) {}

ApiResponse Api::Handle(const ApiRequest& request) const {
  const auto parts = SplitPath(request.path);
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";
  try {
    if (parts.size() < 2 || parts[0] != "v1") {
      return Error(404, "not_found", "no route for " + request.path);
    }
    if (parts.size() == 2 && parts[1] == "health" && get) return Health();
    if (parts.size() == 2 && parts[1] == "predict" && post) {
      return Predict(request.body);
    }
    if (parts[1] == "sessions") {
      if (parts.size() == 2 && post) return CreateSession(request.body);
      if (parts.size() == 3 && get) return GetSession(parts[2]);
      if (parts.size() == 4 && parts[3] == "events" && post) {
        return PostEvent(parts[2], request.body);
      }
      if (parts.size() == 4 && parts[3] == "suggestions" && get) {
        return GetSuggestions(parts[2]);
      }
    }
    return Error(404, "not_found",
                 "no route for " + request.method + " " + request.path);
  } catch (const nlohmann::json::exception& e) {
    return Error(400, "bad_request", e.what());
  } catch (const UsageError& e) {
    return Error(400, "bad_request", e.what());
  } catch (const NotFoundError& e) {
    return Error(404, "not_found", e.what());
  } catch (const DataError& e) {
    return Error(502, "predictor_error", e.what());
  } catch (const std::exception& e) {
    return Error(500, "internal", e.what());
  }
}

ApiResponse Api::Health() const {
  return Reply(200, Json{{"status", "ok"}, {"models", store_.model_tags()}});
}

ApiResponse Api::CreateSession(const std::string& body) const {
  const auto j = ParseBody(body);
  SessionConfig config;
  config.design = ParseDesign(j.value("design", std::string("digit")));
  config.direction = ParseDirection(j.value("direction", std::string("forward")));
  config.k = j.value("k", std::size_t{10});
  config.model_tag = j.value("model", default_model_);
  const auto id = store_.Create(config);
  return Reply(201, SnapshotJson(store_.Snapshot(id)));
}

ApiResponse Api::GetSession(const std::string& id) const {
  return Reply(200, SnapshotJson(store_.Snapshot(id)));
}

ApiResponse Api::PostEvent(const std::string& id,
                           const std::string& body) const {
  const auto j = ParseBody(body);
  const auto type = j.at("type").get<std::string>();
  KeyEvent event;
  if (type == "digit") {
    const auto& v = j.at("value");
    const long long d = v.is_string() ? std::stoll(v.get<std::string>())
                                      : v.get<long long>();
    if (d < 0 || d > 9) throw UsageError("digit value must be 0..9");
    event = KeyEvent::Digit(static_cast<unsigned>(d));
  } else if (type == "char") {
    event = KeyEvent::Char(j.at("value").get<std::string>());
  } else if (type == "toggle") {
    event = KeyEvent::Toggle();
  } else if (type == "backspace") {
    event = KeyEvent::Backspace();
  } else {
    throw UsageError("unknown event type '" + type + "'");
  }
  try {
    return Reply(200, SnapshotJson(store_.Apply(id, event)));
  } catch (const EventRejectedError& e) {
    Json out{{"error", {{"code", "event_rejected"}, {"message", e.what()}}}};
    out["session"] = SnapshotJson(store_.Snapshot(id));
    return Reply(409, std::move(out));
  }
}

ApiResponse Api::GetSuggestions(const std::string& id) const {
  const auto config = store_.Config(id);
  const auto prediction = store_.Suggestions(id);
  const auto entry = store_.model(config.model_tag);
  Json list = Json::array();
  for (std::size_t i = 0; i < prediction.candidates.size(); ++i) {
    const auto& c = prediction.candidates[i];
    list.push_back({{"label", i},
                    {"rank", i + 1},
                    {"id", c.id},
                    {"score", c.score},
                    {"surface", std::string(entry.vocab->Surface(c.id).surface)}});
  }
  return Reply(200, Json{{"session_id", id},
                         {"direction", DirectionName(prediction.direction)},
                         {"candidates", std::move(list)}});
}

ApiResponse Api::Predict(const std::string& body) const {
  const auto j = ParseBody(body);
  const auto entry = store_.model(j.value("model", default_model_));
  const auto context = j.at("context").get<std::vector<std::int64_t>>();
  TokenSequence tokens;
  for (auto id : context) {
    if (id < 0 || static_cast<std::uint64_t>(id) >= entry.vocab->size()) {
      throw UsageError("context id " + std::to_string(id) +
                       " outside the vocabulary");
    }
    tokens.push_back(static_cast<TokenId>(id));
  }
  const auto direction = ParseDirection(j.at("direction").get<std::string>());
  const auto k = j.at("k").get<std::int64_t>();
  if (k < 1) throw UsageError("k must be at least 1");
  const auto prediction = entry.predictor->Predict(
      tokens, direction, static_cast<std::size_t>(k));
  return {200, EncodePredictResponse(prediction)};
}

struct HttpServer::Impl {
  Impl(SessionStore& store, std::string default_model)
      : api(store, std::move(default_model)) {}
  Api api;
  httplib::Server server;
};

HttpServer::HttpServer(SessionStore& store, std::string default_model,
                       std::string static_dir)
    : impl_(std::make_unique<Impl>(store, std::move(default_model))) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = impl_->api.Handle({req.method, req.path, req.body});
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  impl_->server.Get(R"(/v1/.*)", forward);
  impl_->server.Post(R"(/v1/.*)", forward);
  if (!static_dir.empty()) impl_->server.set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() { Stop(); }

bool HttpServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int HttpServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::is_running() const { return impl_->server.is_running(); }

}  // namespace keysave
