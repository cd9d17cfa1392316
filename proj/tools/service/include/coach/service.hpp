#pragma once

// The /v1 request/response service. `Service::handle` is transport-free so
// it can be exercised directly; `serve` binds it to an HTTP listener.

#include <cstdint>
#include <functional>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/engine.hpp"
#include "coach/error.hpp"
#include "coach/session.hpp"
#include "coach/similarity.hpp"

namespace coach::service {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  nlohmann::json body;
  std::vector<std::string> warnings;  // sent as X-Coach-Warning headers
};

// Returns text for a prompt, or throws on any failure.
using AbstractiveFn = std::function<std::string(const std::string& text, std::size_t max_tokens)>;

class Service {
 public:
  Service(const engine::Engine& engine, session::Store& store);

  // Enables the external abstractive generator for POST .../prompt. On
  // failure the extractive prompt is returned with a warning.
  void set_abstractive(AbstractiveFn fn, std::size_t max_tokens) {
    abstractive_ = std::move(fn);
    max_tokens_ = max_tokens;
  }

  Response handle(const Request& request) const;

 private:
  Response route(const Request& request) const;

  const engine::Engine* engine_;
  session::Store* store_;
  AbstractiveFn abstractive_;
  std::size_t max_tokens_ = 0;
};

// {code, message, field?} with 404 for kNotFound, 500 for kIoError and 422
// for every other library error.
Response error_response(const Error& e);

// HTTP clients for the optional external services. `config` is the service
// object from the engine config: {url, dimension, timeout_ms} for
// embeddings, {url, max_tokens, timeout_ms} for the abstractive generator.
std::shared_ptr<similarity::SimilarityBackend> make_embedding_backend(const nlohmann::json& config);
AbstractiveFn make_abstractive_client(const nlohmann::json& config);

struct ServeOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::optional<std::filesystem::path> static_dir;  // web UI assets
  // Called once the port is bound (port 0 picks a free one) with a callback
  // that stops the listener from another thread.
  std::function<void(std::uint16_t port, std::function<void()> stop)> on_ready;
};

// Blocks until the listener stops. Returns false if the port cannot be bound.
bool serve(const Service& service, const ServeOptions& options);

}  // namespace coach::service
