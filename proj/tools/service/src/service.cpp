#include "coach/service.hpp"

#include <charconv>

#include "coach/error.hpp"

namespace coach::service {
namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t slash = path.find('/', pos);
    const std::size_t end = slash == std::string::npos ? path.size() : slash;
    if (end > pos) parts.push_back(path.substr(pos, end - pos));
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  return parts;
}

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kFormatError, "request body must be a JSON object").with_field("body");
  }
  return j;
}

std::string required_string(const nlohmann::json& body, const std::string& key) {
  if (!body.contains(key) || !body.at(key).is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "'" + key + "' must be a string").with_field(key);
  }
  return body.at(key).get<std::string>();
}

std::size_t parse_count(const std::string& s, const std::string& field) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument, "'" + field + "' must be a non-negative integer")
        .with_field(field);
  }
  return v;
}

std::string query_or(const Request& r, const std::string& key, const std::string& fallback) {
  const auto it = r.query.find(key);
  return it == r.query.end() ? fallback : it->second;
}

Response ok(nlohmann::json body, int status = 200) { return {status, std::move(body), {}}; }

Error route_not_found(const Request& r) {
  return Error(ErrorCode::kNotFound, "no route for " + r.method + " " + r.path);
}

}  // namespace

Response error_response(const Error& e) {
  Response r;
  r.status = e.code() == ErrorCode::kNotFound ? 404 : e.code() == ErrorCode::kIoError ? 500 : 422;
  r.body = {{"code", error_code_name(e.code())}, {"message", e.what()}};
  if (e.field()) r.body["field"] = *e.field();
  return r;
}

Service::Service(const engine::Engine& engine, session::Store& store)
    : engine_(&engine), store_(&store) {}

Response Service::handle(const Request& request) const {
  try {
    return route(request);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    Response r;
    r.status = 500;
    r.body = {{"code", "Internal"}, {"message", e.what()}};
    return r;
  }
}

Response Service::route(const Request& r) const {
  const auto parts = split_path(r.path);
  if (parts.size() < 2 || parts[0] != "v1") throw route_not_found(r);
  const bool get = r.method == "GET";
  const bool post = r.method == "POST";

  if (parts.size() == 2 && parts[1] == "strategies" && get) {
    return ok({{"format", "markdown"}, {"text", engine_->strategies()}});
  }
  if (parts[1] != "projects") throw route_not_found(r);

  if (parts.size() == 2 && post) {
    const auto body = parse_body(r.body);
    const std::string source = required_string(body, "source_text");
    std::optional<std::string> reference;
    if (body.contains("reference_abstract") && !body.at("reference_abstract").is_null()) {
      reference = required_string(body, "reference_abstract");
    }
    // Parse up front so a source the pipeline cannot read is rejected here.
    const auto check = [this](const std::string& text, const char* field) {
      try {
        engine_->parse_text(text);
      } catch (Error& e) {
        if (!e.field()) e.with_field(field);
        throw;
      }
    };
    check(source, "source_text");
    if (reference) check(*reference, "reference_abstract");
    const auto project = store_->create_project(source, reference, engine_->snapshot());
    return ok({{"project_id", project.id}}, 201);
  }
  if (parts.size() < 3) throw route_not_found(r);
  const std::string& id = parts[2];

  if (parts.size() == 3 && get) return ok(store_->project(id).to_json());

  const std::string& leaf = parts.size() > 3 ? parts[3] : std::string();
  if (parts.size() == 4 && leaf == "rst" && get) {
    const auto project = store_->project(id);
    engine::RstRequest req;
    req.scope = query_or(r, "scope", req.scope);
    req.granularity = query_or(r, "granularity", req.granularity);
    req.parser = query_or(r, "parser", req.parser);
    return ok(engine_->rst(engine_->parse_text(project.source_text), req));
  }
  if (parts.size() == 4 && leaf == "drafts" && post) {
    const auto body = parse_body(r.body);
    return ok(store_->add_draft(id, required_string(body, "text")).to_json(), 201);
  }
  if (parts.size() == 5 && leaf == "drafts" && get) {
    return ok(store_->draft(id, parse_count(parts[4], "draft_no")).to_json());
  }
  if (parts.size() == 6 && leaf == "drafts" && parts[5] == "analyze" && post) {
    const auto record = store_->analyze_draft(id, parse_count(parts[4], "draft_no"), *engine_);
    Response resp = ok(*record.analysis);
    resp.warnings = record.warnings;
    return resp;
  }
  if (parts.size() == 4 && leaf == "history" && get) return ok(store_->history(id).to_json());
  if (parts.size() == 4 && leaf == "reference" && get) {
    const auto project = store_->project(id);
    if (!project.reference_abstract) {
      throw Error(ErrorCode::kAnalysisUnavailable, "project has no reference abstract")
          .with_field("reference_abstract");
    }
    const std::size_t k =
        r.query.count("k") ? parse_count(r.query.at("k"), "k") : engine_->config().k;
    const auto source = engine_->parse_text(project.source_text);
    const auto abstract = engine_->parse_text(*project.reference_abstract);
    const auto map = engine_->align(abstract, source, k);
    nlohmann::json labels = nlohmann::json::array();
    for (auto g : engine_->organization(abstract).labels) labels.push_back(genre::genre_name(g));
    nlohmann::json abstract_sentences = nlohmann::json::array();
    for (const auto& s : abstract.sentences) abstract_sentences.push_back(s.text);
    nlohmann::json source_sentences = nlohmann::json::array();
    for (const auto& s : source.sentences) source_sentences.push_back(s.text);
    Response resp = ok({{"organization", std::move(labels)},
                        {"abstract_sentences", std::move(abstract_sentences)},
                        {"source_sentences", std::move(source_sentences)},
                        {"alignment", map.to_json()}});
    resp.warnings = map.warnings;
    return resp;
  }
  if (parts.size() == 4 && leaf == "prompt" && post) {
    const auto body = parse_body(r.body);
    std::optional<std::size_t> target;
    if (body.contains("target_count") && !body.at("target_count").is_null()) {
      if (!body.at("target_count").is_number_unsigned()) {
        throw Error(ErrorCode::kInvalidArgument, "'target_count' must be a positive integer")
            .with_field("target_count");
      }
      target = body.at("target_count").get<std::size_t>();
    }
    const auto project = store_->project(id);
    const auto source = engine_->parse_text(project.source_text);
    auto prompt = engine_->prompt(source, target);
    nlohmann::json out = prompt.to_json();
    out["generator"] = "extractive";
    std::vector<std::string> warnings;
    if (abstractive_) {
      try {
        out = {{"generator", "abstractive"},
               {"text", abstractive_(project.source_text, max_tokens_)},
               {"sentences", nlohmann::json::array()},
               {"target_count", prompt.target_count}};
      } catch (const std::exception& e) {
        warnings.push_back(std::string("abstractive service failed: ") + e.what() +
                           "; returned the extractive prompt");
      }
    }
    Response resp = ok(std::move(out));
    resp.warnings = std::move(warnings);
    return resp;
  }
  throw route_not_found(r);
}

}  // namespace coach::service
