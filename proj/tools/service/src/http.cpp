#include <httplib.h>

#include <chrono>
#include <stdexcept>

#include "coach/error.hpp"
#include "coach/service.hpp"

namespace coach::service {
namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::kFormatError, "service url needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body, int timeout_ms) {
  httplib::Client client(ep.base);
  const auto timeout = std::chrono::milliseconds(timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) throw std::runtime_error("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("status " + std::to_string(res->status));
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("response is not JSON");
  return j;
}

}  // namespace

std::shared_ptr<similarity::SimilarityBackend> make_embedding_backend(const nlohmann::json& config) {
  const Endpoint ep = split_url(config.at("url").get<std::string>());
  const auto dimension = config.at("dimension").get<std::size_t>();
  const int timeout_ms = config.value("timeout_ms", 2000);
  auto embed = [ep, timeout_ms](const std::vector<std::string>& sentences) {
    const auto j = post_json(ep, {{"sentences", sentences}}, timeout_ms);
    return j.at("vectors").get<std::vector<std::vector<double>>>();
  };
  return std::make_shared<similarity::EmbeddingBackend>(embed, dimension);
}

AbstractiveFn make_abstractive_client(const nlohmann::json& config) {
  const Endpoint ep = split_url(config.at("url").get<std::string>());
  const int timeout_ms = config.value("timeout_ms", 10000);
  return [ep, timeout_ms](const std::string& text, std::size_t max_tokens) {
    const auto j = post_json(ep, {{"text", text}, {"max_tokens", max_tokens}}, timeout_ms);
    return j.at("abstract").get<std::string>();
  };
}

bool serve(const Service& service, const ServeOptions& options) {
  httplib::Server server;
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    const Response out = service.handle(r);
    res.status = out.status;
    for (const auto& w : out.warnings) res.headers.emplace("X-Coach-Warning", w);
    res.set_content(out.body.dump(), "application/json; charset=utf-8");
  };
  server.Get(R"(/v1/.*)", handler);
  server.Post(R"(/v1/.*)", handler);
  if (options.static_dir && !server.set_mount_point("/", options.static_dir->string())) {
    return false;
  }
  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
    if (port < 0) return false;
  } else if (!server.bind_to_port(options.host, port)) {
    return false;
  }
  if (options.on_ready) options.on_ready(static_cast<std::uint16_t>(port), [&server] { server.stop(); });
  return server.listen_after_bind();
}

}  // namespace coach::service
