/*
 * Copyright 2026 The Advocates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <string>

#include "advocates/agent.hpp"
#include "httplib.h"

namespace advocates {

struct LiveConfig {
  /// e.g. "https://api.openai.com/v1"; requests go to <base_url>/chat/completions.
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model = "gpt-4o-mini";
  /// Name of the environment variable holding the API key.
  std::string api_key_env = "ADVOCATES_API_KEY";
  double timeout_s = 60.0;
  int max_in_flight = 4;

  void validate() const {
    if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
      throw Error(ErrorKind::InvalidConfig, "base_url must start with http:// or https://");
    }
    if (model.empty()) throw Error(ErrorKind::InvalidConfig, "model must be set");
    if (timeout_s <= 0) throw Error(ErrorKind::InvalidConfig, "timeout must be positive");
    if (max_in_flight < 1) throw Error(ErrorKind::InvalidConfig, "max_in_flight must be >= 1");
  }
};

/// Generic chat-completion client: one user message per call, no streaming.
class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveConfig config)
      : config_(std::move(config)), slots_(config_.max_in_flight) {
    config_.validate();
    const auto scheme_end = config_.base_url.find("://") + 3;
    const auto path_start = config_.base_url.find('/', scheme_end);
    origin_ = config_.base_url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }

  std::string_view kind() const override { return "live"; }

  static Json request_body(const std::string& model, const std::string& prompt,
                           const Sampling& sampling) {
    Json body;
    body["model"] = model;
    body["messages"] = Json::array({Json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = sampling.temperature;
    body["max_tokens"] = sampling.max_tokens;
    if (sampling.seed) body["seed"] = *sampling.seed;
    return body;
  }

  static std::string response_text(const std::string& raw) {
    const auto j = Json::parse(raw, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorKind::BackendHTTPError, "200: unparseable body: " + excerpt(raw));
    }
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
      throw Error(ErrorKind::BackendHTTPError, "200: no choices[0].message.content: " + excerpt(raw));
    }
  }

  std::string complete(const CallContext&, const std::string& prompt,
                       const Sampling& sampling) override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};

    httplib::Client client(origin_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    const auto body = request_body(config_.model, prompt, sampling).dump();
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    if (!res) {
      switch (res.error()) {
        case httplib::Error::Read:
        case httplib::Error::Write:
        case httplib::Error::ConnectionTimeout:
          throw Error(ErrorKind::Timeout, origin_ + ": " + httplib::to_string(res.error()));
        default:
          throw Error(ErrorKind::BackendUnreachable,
                      origin_ + ": " + httplib::to_string(res.error()));
      }
    }
    if (res->status != 200) {
      throw Error(ErrorKind::BackendHTTPError,
                  std::to_string(res->status) + ": " + excerpt(res->body));
    }
    return response_text(res->body);
  }

 private:
  static std::string excerpt(const std::string& body) {
    return body.size() <= 200 ? body : body.substr(0, 200) + "...";
  }

  LiveConfig config_;
  std::counting_semaphore<> slots_;
  std::string origin_;
  std::string path_prefix_;
};

}  // namespace advocates
