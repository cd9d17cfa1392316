// coach: batch analysis, training and the HTTP service.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "coach/discourse.hpp"
#include "coach/engine.hpp"
#include "coach/error.hpp"
#include "coach/genre.hpp"
#include "coach/io.hpp"
#include "coach/metrics.hpp"
#include "coach/service.hpp"
#include "coach/session.hpp"

namespace fs = std::filesystem;
using namespace coach;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_config() {
  if (const char* env = std::getenv("COACH_CONFIG"); env && *env) return env;
  return COACH_DEFAULT_CONFIG;
}

std::string format_value(const metrics::Value& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string format_score(const metrics::Value& v) {
  if (!v) return "undefined";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

// Prefixes a file name to a format error so the message points at the file.
template <typename F>
auto with_file(const fs::path& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    Error wrapped(e.code(), path.string() + ": " + e.what());
    if (e.field()) wrapped.with_field(*e.field());
    throw wrapped;
  }
}

void print_analysis_text(const engine::Analysis& a, std::ostream& out) {
  out << "organization:";
  for (auto g : a.organization.labels) out << ' ' << genre::genre_name(g);
  out << "\nmissing:";
  if (a.missing.empty()) out << " none";
  for (auto g : a.missing) out << ' ' << genre::genre_name(g);
  out << "\n\n";
  for (auto f : metrics::kAllFacets) {
    std::string name(metrics::facet_name(f));
    name.resize(18, ' ');
    out << name << format_score(a.report.draft[f]) << '\n';
  }
  out << "overall           " << format_score(a.report.draft.overall) << "\n\n";
  for (std::size_t i = 0; i < a.report.per_sentence.size(); ++i) {
    const auto& s = a.report.per_sentence[i];
    out << "sentence " << i + 1 << " [" << genre::genre_name(a.organization.labels[i]) << "]";
    for (auto f : metrics::kAllFacets) out << ' ' << format_score(s[f]);
    out << '\n';
  }
  if (!a.guidance.empty()) {
    out << "\nguidance:\n";
    for (const auto& t : a.guidance) out << "- " << t.text << '\n';
  }
  for (const auto& f : a.report.draft.flags) out << "flag: " << f << '\n';
  for (const auto& w : a.warnings) out << "warning: " << w << '\n';
}

int cmd_analyze(const std::string& config, const fs::path& draft_path,
                const std::optional<fs::path>& source_path, bool json) {
  const auto engine = engine::Engine::load(config);
  const auto draft = with_file(draft_path, [&] { return engine.parse_text(io::read_file(draft_path)); });
  std::optional<text::Document> source;
  if (source_path) {
    source = with_file(*source_path, [&] { return engine.parse_text(io::read_file(*source_path)); });
  }
  const auto analysis = engine.analyze(draft, source ? &*source : nullptr);
  if (json) {
    std::cout << analysis.to_json().dump(2) << '\n';
  } else {
    print_analysis_text(analysis, std::cout);
  }
  return 0;
}

int cmd_align(const std::string& config, const fs::path& abstract_path, const fs::path& source_path,
              std::optional<std::size_t> k) {
  auto engine = engine::Engine::load(config);
  if (!engine.config().embedding_service.is_null()) {
    engine.set_alignment_backend(service::make_embedding_backend(engine.config().embedding_service));
  }
  const auto abstract =
      with_file(abstract_path, [&] { return engine.parse_text(io::read_file(abstract_path)); });
  const auto source = with_file(source_path, [&] { return engine.parse_text(io::read_file(source_path)); });
  const auto map = engine.align(abstract, source, k.value_or(engine.config().k));
  nlohmann::json out = map.to_json();
  nlohmann::json a = nlohmann::json::array();
  for (const auto& s : abstract.sentences) a.push_back(s.text);
  nlohmann::json b = nlohmann::json::array();
  for (const auto& s : source.sentences) b.push_back(s.text);
  out["abstract_sentences"] = std::move(a);
  out["source_sentences"] = std::move(b);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_train_genre(const std::string& config, const fs::path& corpus_path, const fs::path& out,
                    double alpha, const std::optional<fs::path>& mapping_path, double holdout) {
  const auto cfg = engine::Config::load(config);
  const auto fw = text::WordList::load(cfg.function_words);
  const auto mapping = mapping_path ? genre::LabelMapping::load(*mapping_path) : genre::LabelMapping{};
  const auto corpus = with_file(corpus_path, [&] { return genre::read_rct(corpus_path, mapping); });
  if (holdout < 0.0 || holdout >= 1.0) throw UsageError("--holdout must be in [0, 1)");

  // Whole documents go to the held-out split: the last `holdout` share.
  std::vector<std::string> docs;
  for (const auto& s : corpus) {
    if (docs.empty() || docs.back() != s.doc_id) docs.push_back(s.doc_id);
  }
  const auto held_docs = static_cast<std::size_t>(holdout * static_cast<double>(docs.size()));
  const std::set<std::string> held(docs.end() - static_cast<std::ptrdiff_t>(held_docs), docs.end());
  std::vector<genre::LabeledSentence> train, test;
  for (const auto& s : corpus) (held.count(s.doc_id) ? test : train).push_back(s);

  const auto model = genre::train(train, alpha, fw);
  model.save(out);
  std::cout << "trained on " << train.size() << " sentences from " << docs.size() - held_docs
            << " documents; model written to " << out.string() << '\n';
  if (!test.empty()) {
    std::array<std::size_t, genre::kNumGenres> train_counts{};
    for (const auto& s : train) ++train_counts[static_cast<std::size_t>(s.label)];
    const auto majority = static_cast<genre::GenreLabel>(
        std::max_element(train_counts.begin(), train_counts.end()) - train_counts.begin());
    std::size_t correct = 0, baseline = 0;
    for (const auto& s : test) {
      const auto sentence = text::make_sentence(s.text, s.ordinal, fw);
      correct += model.predict(sentence, s.ordinal, s.count) == s.label ? 1 : 0;
      baseline += s.label == majority ? 1 : 0;
    }
    const double n = static_cast<double>(test.size());
    std::printf("held-out accuracy %.4f (majority baseline %.4f) on %zu sentences\n",
                static_cast<double>(correct) / n, static_cast<double>(baseline) / n, test.size());
  }
  return 0;
}

int cmd_train_boundary(const std::string& config, const fs::path& gold_path, const fs::path& out,
                       double reg) {
  const auto cfg = engine::Config::load(config);
  const auto fw = text::WordList::load(cfg.function_words);
  const auto abbr = text::WordList::load(cfg.abbreviations);
  const auto docs = with_file(gold_path, [&] { return discourse::read_gold_edus(gold_path); });
  std::vector<discourse::LabeledSentence> corpus;
  for (const auto& d : docs) {
    for (auto& s : discourse::label_gold_document(d, abbr, fw)) corpus.push_back(std::move(s));
  }
  const auto model = discourse::train_boundary(corpus, reg);
  model.save(out);
  std::size_t correct = 0, total = 0, positives = 0;
  for (const auto& s : corpus) {
    for (std::size_t i = 1; i < s.sentence.tokens.size(); ++i) {
      ++total;
      positives += s.starts[i] ? 1 : 0;
      correct += model.is_boundary(s.sentence, i) == s.starts[i] ? 1 : 0;
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(total, 1));
  std::printf("trained on %zu sentences; token accuracy %.4f (majority baseline %.4f); model written to %s\n",
              corpus.size(), static_cast<double>(correct) / n,
              static_cast<double>(std::max(positives, total - positives)) / n, out.string().c_str());
  return 0;
}

int cmd_score_corpus(const std::string& config, const fs::path& dir,
                     const std::optional<fs::path>& fit_norms, const std::string& version) {
  const auto engine = engine::Engine::load(config);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIoError, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const bool is_source = name.size() > 11 && name.compare(name.size() - 11, 11, ".source.txt") == 0;
    if (entry.is_regular_file() && entry.path().extension() == ".txt" && !is_source) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::cout << "file";
  for (auto f : metrics::all_features()) std::cout << '\t' << metrics::feature_name(f);
  std::cout << '\n';
  std::vector<metrics::FeatureVector> vectors;
  for (const auto& path : files) {
    const auto draft = with_file(path, [&] { return engine.parse_text(io::read_file(path)); });
    fs::path source_path = path;
    source_path.replace_extension(".source.txt");
    std::optional<text::Document> source;
    if (fs::exists(source_path)) {
      source = with_file(source_path, [&] { return engine.parse_text(io::read_file(source_path)); });
    }
    const auto fv = metrics::extract_features(draft, engine.feature_context(source ? &*source : nullptr));
    std::cout << path.filename().string();
    for (auto f : metrics::all_features()) std::cout << '\t' << format_value(fv[f]);
    std::cout << '\n';
    vectors.push_back(fv);
  }

  if (fit_norms) {
    if (!engine.weights()) {
      throw Error(ErrorCode::kAnalysisUnavailable, "--fit-norms needs configured facet weights");
    }
    metrics::FacetWeights w = *engine.weights();
    for (const auto& [feature, norm] : metrics::fit_norms(vectors)) w.norms[feature] = norm;
    w.version = version;
    w.validate();
    io::write_file_atomic(*fit_norms, w.to_json().dump(2) + "\n");
    std::cerr << "wrote normalization stats for " << vectors.size() << " documents to "
              << fit_norms->string() << '\n';
  }
  return 0;
}

int cmd_serve(const std::string& config, const std::string& host, int port, const fs::path& root,
              const std::optional<fs::path>& static_dir) {
  auto engine = engine::Engine::load(config);
  if (!engine.config().embedding_service.is_null()) {
    engine.set_alignment_backend(service::make_embedding_backend(engine.config().embedding_service));
  }
  session::Store store(root);
  service::Service svc(engine, store);
  if (!engine.config().abstractive_service.is_null()) {
    const auto& a = engine.config().abstractive_service;
    svc.set_abstractive(service::make_abstractive_client(a), a.value("max_tokens", std::size_t{256}));
  }
  service::ServeOptions options;
  options.host = host;
  options.port = static_cast<std::uint16_t>(port);
  options.static_dir = static_dir;
  std::cerr << "coach: serving /v1 on " << host << ':' << port << " with store " << root.string() << '\n';
  if (!service::serve(svc, options)) {
    std::cerr << "coach: error: cannot listen on " << host << ':' << port << '\n';
    return kExitData;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abstract-writing feedback: discourse structure, genre organization and quality facets"};
  app.require_subcommand(1);
  std::string config = default_config();
  app.add_option("--config", config, "Engine config file")->envname("COACH_CONFIG");

  auto* analyze = app.add_subcommand("analyze", "Score a draft abstract and detect its organization");
  fs::path draft_path;
  std::optional<fs::path> source_path;
  bool json = false;
  analyze->add_option("draft", draft_path, "Draft abstract (UTF-8 text)")->required();
  analyze->add_option("--source", source_path, "Introduction the abstract summarizes");
  analyze->add_flag("--json", json, "Print the analysis payload as JSON");

  auto* align = app.add_subcommand("align", "Align a reference abstract to its source");
  fs::path abstract_path, align_source;
  std::optional<std::size_t> k;
  align->add_option("abstract", abstract_path, "Reference abstract")->required();
  align->add_option("--source", align_source, "Source text")->required();
  align->add_option("--k", k, "Top-k source sentences per abstract sentence")->check(CLI::PositiveNumber);

  auto* train_genre = app.add_subcommand("train-genre", "Train the genre classifier on an RCT-format file");
  fs::path rct_path, genre_out;
  double alpha = 1.0;
  double holdout = 0.0;
  std::optional<fs::path> mapping;
  train_genre->add_option("corpus", rct_path, "RCT-format corpus")->required();
  train_genre->add_option("--out", genre_out, "Output model file")->required();
  train_genre->add_option("--alpha", alpha, "Additive smoothing")->check(CLI::PositiveNumber);
  train_genre->add_option("--mapping", mapping, "foreign_label<TAB>genre mapping file");
  train_genre->add_option("--holdout", holdout, "Share of documents held out for evaluation");

  auto* train_boundary = app.add_subcommand("train-boundary", "Train the EDU boundary classifier");
  fs::path gold_path, boundary_out;
  double reg = 1.0;
  train_boundary->add_option("gold", gold_path, "Gold EDU file (doc_id<TAB>edu_id<TAB>text)")->required();
  train_boundary->add_option("--out", boundary_out, "Output model file")->required();
  train_boundary->add_option("--reg", reg, "L2 regularization strength")->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score-corpus", "Feature vectors for every .txt file in a directory");
  fs::path corpus_dir;
  std::optional<fs::path> fit_norms;
  std::string version = "fitted";
  score->add_option("dir", corpus_dir, "Directory of abstracts; <name>.source.txt pairs a source")->required();
  score->add_option("--fit-norms", fit_norms, "Write the config weights with refitted normalization stats");
  score->add_option("--weights-version", version, "Version string for the refitted weights");

  auto* serve = app.add_subcommand("serve", "Run the /v1 HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  fs::path root = "coach-store";
  std::optional<fs::path> static_dir;
  serve->add_option("--port", port, "Listen port")->envname("COACH_PORT")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Listen address")->envname("COACH_HOST");
  serve->add_option("--root", root, "Project store directory")->envname("COACH_ROOT");
  serve->add_option("--static", static_dir, "Directory of web UI assets to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(config, draft_path, source_path, json);
    if (*align) return cmd_align(config, abstract_path, align_source, k);
    if (*train_genre) return cmd_train_genre(config, rct_path, genre_out, alpha, mapping, holdout);
    if (*train_boundary) return cmd_train_boundary(config, gold_path, boundary_out, reg);
    if (*score) return cmd_score_corpus(config, corpus_dir, fit_norms, version);
    if (*serve) return cmd_serve(config, host, port, root, static_dir);
  } catch (const UsageError& e) {
    std::cerr << "coach: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "coach: error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kInvalidK;
    return usage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "coach: error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
