#pragma once

// Discourse segmentation and shift-reduce rhetorical-structure parsing.
//
// Units are indexed from 0 internally; the textual forms (bracketed trees,
// JSON) use the same 0-based leaf indices. A tree over n units always has n
// leaves and n-1 binary internal nodes.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/linear_model.hpp"
#include "coach/text.hpp"

namespace coach::discourse {

class RelationInventory {
 public:
  RelationInventory() = default;
  explicit RelationInventory(std::set<std::string> names);

  // background, contrast, elaboration, joint, sequence, attribution,
  // explanation, cause, condition, comparison, enablement, evaluation,
  // summary, temporal, topic-change, same-unit.
  static const RelationInventory& standard();
  static RelationInventory load(const std::filesystem::path& path);

  bool contains(std::string_view name) const;
  void require(std::string_view name) const;  // throws kUnknownRelation
  const std::set<std::string, std::less<>>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::set<std::string, std::less<>> names_;
};

enum class Nuclearity { kNN, kNS, kSN };

std::string_view nuclearity_name(Nuclearity n);
Nuclearity parse_nuclearity(std::string_view s);

struct Edu {
  std::size_t id = 0;
  std::size_t sentence = 0;
  std::size_t paragraph = 0;
  std::size_t token_begin = 0;  // within the sentence, half-open
  std::size_t token_end = 0;
  std::string text;
  std::vector<std::string> words;  // lemmas of word tokens, in order
};

// Inclusive unit range.
struct Span {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct RstNode {
  std::optional<std::size_t> unit;  // set on leaves
  std::string relation;             // internal only
  Nuclearity nuclearity = Nuclearity::kNS;
  std::size_t left = 0;  // node indices, internal only
  std::size_t right = 0;
  Span span;

  bool is_leaf() const { return unit.has_value(); }
};

class RstTree {
 public:
  RstTree() = default;

  std::size_t add_leaf(std::size_t unit);
  std::size_t add_internal(std::string relation, Nuclearity nuc, std::size_t left,
                           std::size_t right);
  void set_root(std::size_t root) { root_ = root; }

  std::size_t root() const { return root_; }
  const RstNode& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<RstNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t internal_count() const;
  bool empty() const { return nodes_.empty(); }

  // Nucleus / satellite children of an internal node. NN has no satellite.
  std::vector<std::size_t> nuclei(std::size_t node) const;
  std::optional<std::size_t> satellite(std::size_t node) const;

  // Lowest internal node whose span covers both units.
  std::size_t lowest_common_ancestor(std::size_t unit_a, std::size_t unit_b) const;

  // Number of satellite edges on the path from the root to a unit's leaf.
  std::size_t satellite_depth(std::size_t unit) const;

  // Throws kInvalidArgument describing the first violated structural law.
  void validate() const;

 private:
  std::vector<RstNode> nodes_;
  std::size_t root_ = 0;
};

struct Action {
  enum class Kind { kShift, kReduce };
  Kind kind = Kind::kShift;
  std::string relation;
  Nuclearity nuclearity = Nuclearity::kNS;

  static Action shift() { return {}; }
  static Action reduce(std::string relation, Nuclearity nuc) {
    return {Kind::kReduce, std::move(relation), nuc};
  }
  std::string label() const;  // "shift" or "reduce:<relation>:<NS>"
  static Action from_label(std::string_view label);
  friend bool operator==(const Action&, const Action&) = default;
};

struct StackItem {
  std::size_t node = 0;
  Span span;
};

// What a transition policy may look at before choosing the next action.
struct ParserState {
  const std::vector<Edu>* units = nullptr;
  std::vector<StackItem> stack;
  std::size_t next = 0;  // first unshifted unit

  bool queue_empty() const { return next >= units->size(); }
  bool can_shift() const { return !queue_empty(); }
  bool can_reduce() const { return stack.size() >= 2; }
};

class TransitionPolicy {
 public:
  virtual ~TransitionPolicy() = default;
  virtual Action next(const ParserState& state) = 0;
};

// Cue-word driven policy that needs no training data. Reduces immediately
// after shifting a unit that opens with a cue, closes every paragraph
// right-to-left, and joins paragraphs right-to-left at the end.
class HeuristicPolicy : public TransitionPolicy {
 public:
  Action next(const ParserState& state) override;
};

// Replays a fixed action sequence (gold trees, tests).
class ReplayPolicy : public TransitionPolicy {
 public:
  explicit ReplayPolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}
  Action next(const ParserState& state) override;

 private:
  std::vector<Action> actions_;
  std::size_t pos_ = 0;
};

struct ParseResult {
  RstTree tree;
  std::vector<Action> actions;
};

// Runs the shift-reduce loop. Exactly n shifts and n-1 reduces are executed;
// a policy that proposes an illegal action raises kInvalidArgument.
ParseResult parse(const std::vector<Edu>& units, TransitionPolicy& policy);
ParseResult parse_heuristic(const std::vector<Edu>& units);

// Relation of the cue that opens a unit, if any ("however" -> contrast NN).
std::optional<std::pair<std::string, Nuclearity>> leading_cue(const Edu& unit);

// --- segmentation -----------------------------------------------------------

bool is_connective_cue(std::string_view lemma);

// Boundary features for token `i` of a sentence.
std::vector<std::string> boundary_features(const text::Sentence& sentence, std::size_t i);

class BoundaryModel {
 public:
  BoundaryModel() = default;
  explicit BoundaryModel(LinearModel model) : model_(std::move(model)) {}

  double boundary_probability(const text::Sentence& sentence, std::size_t i) const;
  bool is_boundary(const text::Sentence& sentence, std::size_t i) const;
  const LinearModel& linear() const { return model_; }

  nlohmann::json to_json() const;
  static BoundaryModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static BoundaryModel load(const std::filesystem::path& path);

 private:
  LinearModel model_;
};

// Rule fallback: a boundary after every ';', before a subordinating cue
// ("because", "although", ...) and before a coordinating/relative cue that
// follows a comma. The first token always opens an EDU.
std::vector<Edu> segment_edus(const text::Sentence& sentence);
std::vector<Edu> segment_edus(const text::Sentence& sentence, const BoundaryModel& model);

// All EDUs of a document, numbered in text order.
std::vector<Edu> segment_document(const text::Document& doc, const BoundaryModel* model);

// One unit per sentence (the sentence-level granularity used by default).
std::vector<Edu> sentence_units(const text::Document& doc);
std::vector<Edu> sentence_units(const text::Document& doc, std::size_t paragraph);

// --- gold data ----------------------------------------------------------------

struct GoldDocument {
  std::string id;
  std::vector<std::string> edus;
};

// `doc_id <TAB> edu_id <TAB> text`, one EDU per line, grouped by document in
// first-appearance order and sorted by edu_id.
std::vector<GoldDocument> read_gold_edus(std::istream& in);
std::vector<GoldDocument> read_gold_edus(const std::filesystem::path& path);

// Tokenizes a gold document and marks the gold EDU starts on its tokens.
struct LabeledSentence {
  text::Sentence sentence;
  std::vector<bool> starts;  // per token
};
std::vector<LabeledSentence> label_gold_document(const GoldDocument& doc,
                                                 const text::WordList& abbreviations,
                                                 const text::WordList& function_words);

BoundaryModel train_boundary(const std::vector<LabeledSentence>& corpus, double reg);

// `(relation nuclearity left right)` with integer leaves, e.g.
// `(elaboration NS 0 (contrast NN 1 2))`.
RstTree parse_bracketed(std::string_view s, const RelationInventory& inventory);
std::string to_bracketed(const RstTree& tree);

// Post-order shift/reduce sequence that rebuilds `tree`.
std::vector<Action> gold_actions(const RstTree& tree);

// --- learned transition policy ----------------------------------------------

std::vector<std::string> transition_features(const ParserState& state);

class RelationModel {
 public:
  RelationModel() = default;
  RelationModel(LinearModel model, std::vector<std::string> labels)
      : model_(std::move(model)), labels_(std::move(labels)) {}

  // Best legal action for the state.
  Action choose(const ParserState& state) const;
  const std::vector<std::string>& labels() const { return labels_; }

  nlohmann::json to_json() const;
  static RelationModel from_json(const nlohmann::json& j);

 private:
  LinearModel model_;
  std::vector<std::string> labels_;
};

class ModelPolicy : public TransitionPolicy {
 public:
  explicit ModelPolicy(const RelationModel& model) : model_(&model) {}
  Action next(const ParserState& state) override { return model_->choose(state); }

 private:
  const RelationModel* model_;
};

struct GoldParse {
  std::vector<Edu> units;
  RstTree tree;
};

RelationModel train_relation_model(const std::vector<GoldParse>& corpus, double reg);

// --- queries ------------------------------------------------------------------

std::vector<Span> satellite_spans(const RstTree& tree, std::string_view relation,
                                  const RelationInventory& inventory);

std::map<std::string, std::size_t> relation_counts(const RstTree& tree);

// Lifts an EDU-level tree to sentences. When every sentence is a subtree the
// tree is collapsed directly; otherwise sentences are re-parsed with the
// heuristic policy and each reduce takes the relation of the lowest common
// ancestor of the two EDUs that meet at the boundary.
RstTree merge_to_sentences(const RstTree& edu_tree, const std::vector<Edu>& edus,
                           const std::vector<Edu>& sentence_units);

nlohmann::json to_json(const RstTree& tree, const std::vector<Edu>& units);

}  // namespace coach::discourse
