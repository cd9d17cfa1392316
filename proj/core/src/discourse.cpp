#include "coach/discourse.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <sstream>

#include "coach/error.hpp"
#include "coach/io.hpp"

namespace coach::discourse {
namespace {

constexpr std::string_view kDefaultRelation = "elaboration";

const std::set<std::string, std::less<>> kSubordinators = {
    "because", "although", "though", "whereas", "unless", "since"};

const std::set<std::string, std::less<>> kCommaCues = {
    "and", "but", "or", "so", "yet", "which", "who", "while", "when", "if", "where", "whereas",
    "although", "though", "because", "since", "unless", "whom", "whose", "thereby"};

const std::set<std::string, std::less<>> kAdverbialCues = {
    "however", "therefore", "thus", "hence", "moreover", "furthermore", "consequently",
    "nevertheless", "nonetheless", "meanwhile", "also", "instead", "additionally"};

struct CueRule {
  std::vector<std::string_view> words;
  std::string_view relation;
  Nuclearity nuclearity;
};

// Multi-word cues first so "in contrast" wins over "in".
const std::vector<CueRule>& cue_rules() {
  static const std::vector<CueRule> rules = {
      {{"on", "the", "other", "hand"}, "contrast", Nuclearity::kNN},
      {{"as", "a", "result"}, "cause", Nuclearity::kNS},
      {{"in", "order", "to"}, "enablement", Nuclearity::kNS},
      {{"for", "example"}, "elaboration", Nuclearity::kNS},
      {{"for", "instance"}, "elaboration", Nuclearity::kNS},
      {{"in", "particular"}, "elaboration", Nuclearity::kNS},
      {{"in", "contrast"}, "contrast", Nuclearity::kNN},
      {{"in", "addition"}, "joint", Nuclearity::kNN},
      {{"in", "summary"}, "summary", Nuclearity::kNS},
      {{"in", "conclusion"}, "summary", Nuclearity::kNS},
      {{"in", "short"}, "summary", Nuclearity::kNS},
      {{"according", "to"}, "attribution", Nuclearity::kNS},
      {{"compared", "to"}, "comparison", Nuclearity::kNN},
      {{"however"}, "contrast", Nuclearity::kNN},
      {{"but"}, "contrast", Nuclearity::kNN},
      {{"yet"}, "contrast", Nuclearity::kNN},
      {{"although"}, "contrast", Nuclearity::kNN},
      {{"though"}, "contrast", Nuclearity::kNN},
      {{"whereas"}, "contrast", Nuclearity::kNN},
      {{"nevertheless"}, "contrast", Nuclearity::kNN},
      {{"nonetheless"}, "contrast", Nuclearity::kNN},
      {{"because"}, "explanation", Nuclearity::kNS},
      {{"since"}, "explanation", Nuclearity::kNS},
      {{"therefore"}, "cause", Nuclearity::kNS},
      {{"thus"}, "cause", Nuclearity::kNS},
      {{"hence"}, "cause", Nuclearity::kNS},
      {{"consequently"}, "cause", Nuclearity::kNS},
      {{"so"}, "cause", Nuclearity::kNS},
      {{"specifically"}, "elaboration", Nuclearity::kNS},
      {{"which"}, "elaboration", Nuclearity::kNS},
      {{"who"}, "elaboration", Nuclearity::kNS},
      {{"that"}, "elaboration", Nuclearity::kNS},
      {{"and"}, "joint", Nuclearity::kNN},
      {{"also"}, "joint", Nuclearity::kNN},
      {{"moreover"}, "joint", Nuclearity::kNN},
      {{"furthermore"}, "joint", Nuclearity::kNN},
      {{"additionally"}, "joint", Nuclearity::kNN},
      {{"then"}, "sequence", Nuclearity::kNN},
      {{"next"}, "sequence", Nuclearity::kNN},
      {{"finally"}, "sequence", Nuclearity::kNN},
      {{"subsequently"}, "sequence", Nuclearity::kNN},
      {{"afterwards"}, "sequence", Nuclearity::kNN},
      {{"second"}, "sequence", Nuclearity::kNN},
      {{"third"}, "sequence", Nuclearity::kNN},
      {{"similarly"}, "comparison", Nuclearity::kNN},
      {{"likewise"}, "comparison", Nuclearity::kNN},
      {{"if"}, "condition", Nuclearity::kNS},
      {{"unless"}, "condition", Nuclearity::kNS},
      {{"when"}, "temporal", Nuclearity::kNS},
      {{"while"}, "temporal", Nuclearity::kNS},
      {{"before"}, "temporal", Nuclearity::kNS},
      {{"after"}, "temporal", Nuclearity::kNS},
      {{"to"}, "enablement", Nuclearity::kNS},
      {{"importantly"}, "evaluation", Nuclearity::kNS},
      {{"notably"}, "evaluation", Nuclearity::kNS},
      {{"overall"}, "summary", Nuclearity::kNS},
  };
  return rules;
}

bool matches_at(const std::vector<std::string>& words, std::size_t pos, const CueRule& rule) {
  if (pos + rule.words.size() > words.size()) return false;
  for (std::size_t k = 0; k < rule.words.size(); ++k) {
    if (words[pos + k] != rule.words[k]) return false;
  }
  return true;
}

std::vector<std::string> word_lemmas(const text::Sentence& s, std::size_t begin,
                                     std::size_t end) {
  std::vector<std::string> out;
  for (std::size_t i = begin; i < end; ++i) {
    if (s.tokens[i].is_word()) out.push_back(s.tokens[i].lemma);
  }
  return out;
}

Edu make_edu(const text::Sentence& s, std::size_t begin, std::size_t end) {
  Edu e;
  e.sentence = s.index;
  e.token_begin = begin;
  e.token_end = end;
  const std::size_t from = s.tokens[begin].span.start - s.span.start;
  const std::size_t to = s.tokens[end - 1].span.end - s.span.start;
  e.text = s.text.substr(from, to - from);
  e.words = word_lemmas(s, begin, end);
  return e;
}

std::vector<Edu> edus_from_starts(const text::Sentence& s, const std::vector<bool>& starts) {
  std::vector<Edu> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= s.tokens.size(); ++i) {
    if (i == s.tokens.size() || starts[i]) {
      out.push_back(make_edu(s, begin, i));
      out.back().id = out.size() - 1;
      begin = i;
    }
  }
  return out;
}

bool has_word_from(const text::Sentence& s, std::size_t i) {
  for (; i < s.tokens.size(); ++i) {
    if (s.tokens[i].is_word()) return true;
  }
  return false;
}

std::size_t item_paragraph(const ParserState& st, const StackItem& item) {
  return (*st.units)[item.span.first].paragraph;
}

void apply_action(ParserState& st, RstTree& tree, const Action& a) {
  if (a.kind == Action::Kind::kShift) {
    if (!st.can_shift()) throw Error(ErrorCode::kInvalidArgument, "shift with empty queue");
    const std::size_t node = tree.add_leaf(st.next);
    st.stack.push_back({node, {st.next, st.next}});
    ++st.next;
    return;
  }
  if (!st.can_reduce()) throw Error(ErrorCode::kInvalidArgument, "reduce with fewer than two items");
  const StackItem right = st.stack.back();
  st.stack.pop_back();
  const StackItem left = st.stack.back();
  st.stack.pop_back();
  const std::size_t node = tree.add_internal(a.relation, a.nuclearity, left.node, right.node);
  st.stack.push_back({node, {left.span.first, right.span.last}});
}

Action default_reduce(const Edu& right_first) {
  if (auto cue = leading_cue(right_first)) return Action::reduce(cue->first, cue->second);
  return Action::reduce(std::string(kDefaultRelation), Nuclearity::kNS);
}

}  // namespace

// --- inventory ----------------------------------------------------------------

RelationInventory::RelationInventory(std::set<std::string> names)
    : names_(names.begin(), names.end()) {}

const RelationInventory& RelationInventory::standard() {
  static const RelationInventory inv(std::set<std::string>{
      "background", "contrast", "elaboration", "joint", "sequence", "attribution", "explanation",
      "cause", "condition", "comparison", "enablement", "evaluation", "summary", "temporal",
      "topic-change", "same-unit"});
  return inv;
}

RelationInventory RelationInventory::load(const std::filesystem::path& path) {
  const auto list = text::WordList::load(path);
  return RelationInventory(std::set<std::string>(list.entries().begin(), list.entries().end()));
}

bool RelationInventory::contains(std::string_view name) const {
  return names_.find(name) != names_.end();
}

void RelationInventory::require(std::string_view name) const {
  if (!contains(name)) {
    throw Error(ErrorCode::kUnknownRelation, "unknown relation '" + std::string(name) + "'");
  }
}

std::string_view nuclearity_name(Nuclearity n) {
  switch (n) {
    case Nuclearity::kNN: return "NN";
    case Nuclearity::kNS: return "NS";
    case Nuclearity::kSN: return "SN";
  }
  return "NS";
}

Nuclearity parse_nuclearity(std::string_view s) {
  if (s == "NN") return Nuclearity::kNN;
  if (s == "NS") return Nuclearity::kNS;
  if (s == "SN") return Nuclearity::kSN;
  throw Error(ErrorCode::kFormatError, "bad nuclearity '" + std::string(s) + "'");
}

// --- tree -----------------------------------------------------------------------

std::size_t RstTree::add_leaf(std::size_t unit) {
  RstNode n;
  n.unit = unit;
  n.span = {unit, unit};
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t RstTree::add_internal(std::string relation, Nuclearity nuc, std::size_t left,
                                  std::size_t right) {
  const Span ls = nodes_.at(left).span;
  const Span rs = nodes_.at(right).span;
  if (ls.last + 1 != rs.first) {
    throw Error(ErrorCode::kInvalidArgument, "children spans are not adjacent");
  }
  RstNode n;
  n.relation = std::move(relation);
  n.nuclearity = nuc;
  n.left = left;
  n.right = right;
  n.span = {ls.first, rs.last};
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t RstTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const RstNode& n) { return n.is_leaf(); }));
}

std::size_t RstTree::internal_count() const { return nodes_.size() - leaf_count(); }

std::vector<std::size_t> RstTree::nuclei(std::size_t node) const {
  const RstNode& n = nodes_.at(node);
  if (n.is_leaf()) return {};
  switch (n.nuclearity) {
    case Nuclearity::kNN: return {n.left, n.right};
    case Nuclearity::kNS: return {n.left};
    case Nuclearity::kSN: return {n.right};
  }
  return {};
}

std::optional<std::size_t> RstTree::satellite(std::size_t node) const {
  const RstNode& n = nodes_.at(node);
  if (n.is_leaf() || n.nuclearity == Nuclearity::kNN) return std::nullopt;
  return n.nuclearity == Nuclearity::kNS ? n.right : n.left;
}

std::size_t RstTree::lowest_common_ancestor(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  std::size_t cur = root_;
  for (;;) {
    const RstNode& n = nodes_.at(cur);
    if (n.is_leaf()) return cur;
    const Span ls = nodes_[n.left].span;
    const Span rs = nodes_[n.right].span;
    if (b <= ls.last) {
      cur = n.left;
    } else if (a >= rs.first) {
      cur = n.right;
    } else {
      return cur;
    }
  }
}

std::size_t RstTree::satellite_depth(std::size_t unit) const {
  std::size_t depth = 0;
  std::size_t cur = root_;
  while (!nodes_.at(cur).is_leaf()) {
    const RstNode& n = nodes_[cur];
    const std::size_t child = unit <= nodes_[n.left].span.last ? n.left : n.right;
    if (satellite(cur) == child) ++depth;
    cur = child;
  }
  return depth;
}

void RstTree::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, m); };
  if (nodes_.empty()) fail("empty tree");
  if (root_ >= nodes_.size()) fail("root out of range");
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> leaves;
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (seen[i]) fail("node reached twice");
    seen[i] = true;
    const RstNode& n = nodes_[i];
    if (n.is_leaf()) {
      if (n.span.first != *n.unit || n.span.last != *n.unit) fail("leaf span mismatch");
      leaves.push_back(*n.unit);
      continue;
    }
    if (n.left >= nodes_.size() || n.right >= nodes_.size()) fail("child out of range");
    const Span ls = nodes_[n.left].span;
    const Span rs = nodes_[n.right].span;
    if (ls.last + 1 != rs.first || ls.first != n.span.first || rs.last != n.span.last) {
      fail("span is not the contiguous union of its children");
    }
    stack.push_back(n.right);
    stack.push_back(n.left);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) fail("unreachable node");
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (leaves[k] != k) fail("leaves are not 0..n-1 in order");
  }
  if (internal_count() + 1 != leaf_count()) fail("internal count is not n-1");
  if (nodes_[root_].span != Span{0, leaves.size() - 1}) fail("root does not span all units");
}

// --- actions / parsing ----------------------------------------------------------

std::string Action::label() const {
  if (kind == Kind::kShift) return "shift";
  return "reduce:" + relation + ":" + std::string(nuclearity_name(nuclearity));
}

Action Action::from_label(std::string_view label) {
  if (label == "shift") return shift();
  if (label.substr(0, 7) != "reduce:") {
    throw Error(ErrorCode::kFormatError, "bad action label '" + std::string(label) + "'");
  }
  const std::string_view rest = label.substr(7);
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kFormatError, "bad action label '" + std::string(label) + "'");
  }
  return reduce(std::string(rest.substr(0, colon)), parse_nuclearity(rest.substr(colon + 1)));
}

std::optional<std::pair<std::string, Nuclearity>> leading_cue(const Edu& unit) {
  const auto& words = unit.words;
  // Discourse adverbs may sit after a fronted constituent ("Strategy, however, ...").
  for (std::size_t pos = 0; pos < std::min<std::size_t>(3, words.size()); ++pos) {
    for (const auto& rule : cue_rules()) {
      if (pos > 0 && (rule.words.size() > 1 || !kAdverbialCues.count(rule.words[0]))) continue;
      if (matches_at(words, pos, rule)) {
        return std::make_pair(std::string(rule.relation), rule.nuclearity);
      }
    }
  }
  return std::nullopt;
}

Action HeuristicPolicy::next(const ParserState& st) {
  const auto& units = *st.units;
  if (st.stack.empty()) return Action::shift();
  const StackItem& top = st.stack.back();

  if (st.can_reduce()) {
    const StackItem& below = st.stack[st.stack.size() - 2];
    const bool same_paragraph = item_paragraph(st, below) == item_paragraph(st, top);
    // A freshly shifted cue-opening unit attaches to its left neighbour.
    if (same_paragraph && top.span.size() == 1 && leading_cue(units[top.span.first])) {
      return default_reduce(units[top.span.first]);
    }
    const bool paragraph_ends =
        st.queue_empty() || units[st.next].paragraph != units[top.span.last].paragraph;
    if (paragraph_ends && (same_paragraph || st.queue_empty())) {
      return default_reduce(units[top.span.first]);
    }
  }
  return Action::shift();
}

Action ReplayPolicy::next(const ParserState&) {
  if (pos_ >= actions_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "action sequence exhausted before the tree closed");
  }
  return actions_[pos_++];
}

ParseResult parse(const std::vector<Edu>& units, TransitionPolicy& policy) {
  if (units.empty()) throw Error(ErrorCode::kEmptyInput, "cannot parse zero units");
  ParserState st;
  st.units = &units;
  ParseResult result;
  while (!(st.queue_empty() && st.stack.size() == 1)) {
    Action a = policy.next(st);
    apply_action(st, result.tree, a);
    result.actions.push_back(std::move(a));
  }
  result.tree.set_root(st.stack.front().node);
  return result;
}

ParseResult parse_heuristic(const std::vector<Edu>& units) {
  HeuristicPolicy policy;
  return parse(units, policy);
}

// --- segmentation -----------------------------------------------------------------

bool is_connective_cue(std::string_view lemma) {
  return kSubordinators.count(lemma) > 0 || kCommaCues.count(lemma) > 0 ||
         kAdverbialCues.count(lemma) > 0;
}

std::vector<std::string> boundary_features(const text::Sentence& s, std::size_t i) {
  const auto& toks = s.tokens;
  const std::string& cur = toks[i].lemma;
  const std::string prev = i > 0 ? toks[i - 1].lemma : "<s>";
  const std::string next = i + 1 < toks.size() ? toks[i + 1].lemma : "</s>";
  const std::size_t bucket = toks.empty() ? 0 : std::min<std::size_t>(4, 5 * i / toks.size());
  std::vector<std::string> f = {
      "w=" + cur,
      "p=" + prev,
      "n=" + next,
      "pw=" + prev + "|" + cur,
      "pos=" + std::to_string(bucket),
  };
  if (toks[i].punct) f.emplace_back("punct");
  if (i > 0 && toks[i - 1].punct) f.emplace_back("prev_punct");
  if (is_connective_cue(cur)) {
    f.emplace_back("cue");
    if (prev == ",") f.emplace_back("cue_after_comma");
  }
  return f;
}

double BoundaryModel::boundary_probability(const text::Sentence& s, std::size_t i) const {
  if (i == 0) return 1.0;
  return model_.probabilities(boundary_features(s, i))[1];
}

bool BoundaryModel::is_boundary(const text::Sentence& s, std::size_t i) const {
  return i == 0 || boundary_probability(s, i) > 0.5;
}

nlohmann::json BoundaryModel::to_json() const {
  return {{"schema", 1}, {"kind", "boundary"}, {"model", model_.to_json()}};
}

BoundaryModel BoundaryModel::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "boundary" || j.value("schema", 0) != 1) {
    throw Error(ErrorCode::kFormatError, "not a schema-1 boundary model");
  }
  return BoundaryModel(LinearModel::from_json(j.at("model")));
}

void BoundaryModel::save(const std::filesystem::path& path) const {
  io::write_file_atomic(path, to_json().dump(1) + "\n");
}

BoundaryModel BoundaryModel::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path));
}

std::vector<Edu> segment_edus(const text::Sentence& s) {
  if (s.tokens.empty()) return {};
  std::vector<bool> starts(s.tokens.size(), false);
  starts[0] = true;
  for (std::size_t i = 1; i < s.tokens.size(); ++i) {
    if (!has_word_from(s, i)) break;
    const auto& prev = s.tokens[i - 1];
    const std::string& lemma = s.tokens[i].lemma;
    if (prev.punct && prev.surface == ";") {
      starts[i] = true;
    } else if (kSubordinators.count(lemma) && !s.tokens[i].punct) {
      starts[i] = true;
    } else if (prev.punct && prev.surface == "," && kCommaCues.count(lemma)) {
      starts[i] = true;
    }
  }
  return edus_from_starts(s, starts);
}

std::vector<Edu> segment_edus(const text::Sentence& s, const BoundaryModel& model) {
  if (s.tokens.empty()) return {};
  std::vector<bool> starts(s.tokens.size(), false);
  for (std::size_t i = 0; i < s.tokens.size(); ++i) starts[i] = model.is_boundary(s, i);
  return edus_from_starts(s, starts);
}

std::vector<Edu> segment_document(const text::Document& doc, const BoundaryModel* model) {
  std::vector<Edu> all;
  for (const auto& s : doc.sentences) {
    auto edus = model ? segment_edus(s, *model) : segment_edus(s);
    const std::size_t paragraph = doc.paragraph_of(s.index);
    for (auto& e : edus) {
      e.id = all.size();
      e.paragraph = paragraph;
      all.push_back(std::move(e));
    }
  }
  return all;
}

std::vector<Edu> sentence_units(const text::Document& doc) {
  std::vector<Edu> out;
  for (const auto& s : doc.sentences) {
    Edu e = make_edu(s, 0, s.tokens.size());
    e.id = out.size();
    e.paragraph = doc.paragraph_of(s.index);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Edu> sentence_units(const text::Document& doc, std::size_t paragraph) {
  if (paragraph >= doc.paragraphs.size()) {
    throw Error(ErrorCode::kIndexError, "paragraph " + std::to_string(paragraph) + " out of range");
  }
  std::vector<Edu> out;
  const auto& p = doc.paragraphs[paragraph];
  for (std::size_t i = p.first; i < p.last; ++i) {
    const auto& s = doc.sentences[i];
    Edu e = make_edu(s, 0, s.tokens.size());
    e.id = out.size();
    e.paragraph = paragraph;
    out.push_back(std::move(e));
  }
  return out;
}

// --- gold data ------------------------------------------------------------------------

std::vector<GoldDocument> read_gold_edus(std::istream& in) {
  std::vector<GoldDocument> docs;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::map<long, std::string>> edus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw Error(ErrorCode::kFormatError, "expected doc_id<TAB>edu_id<TAB>text", line_no);
    }
    const std::string doc_id = line.substr(0, t1);
    const std::string edu_field = line.substr(t1 + 1, t2 - t1 - 1);
    long edu_id = 0;
    try {
      std::size_t used = 0;
      edu_id = std::stol(edu_field, &used);
      if (used != edu_field.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormatError, "edu_id '" + edu_field + "' is not an integer", line_no);
    }
    std::string body = line.substr(t2 + 1);
    if (body.find_first_not_of(" \t") == std::string::npos) {
      throw Error(ErrorCode::kFormatError, "empty EDU text", line_no);
    }
    if (!index.count(doc_id)) {
      index[doc_id] = docs.size();
      docs.push_back({doc_id, {}});
    }
    if (!edus[doc_id].emplace(edu_id, std::move(body)).second) {
      throw Error(ErrorCode::kFormatError, "duplicate edu_id in document " + doc_id, line_no);
    }
  }
  for (auto& d : docs) {
    for (auto& [id, body] : edus[d.id]) d.edus.push_back(std::move(body));
  }
  return docs;
}

std::vector<GoldDocument> read_gold_edus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_gold_edus(in);
}

std::vector<LabeledSentence> label_gold_document(const GoldDocument& doc,
                                                 const text::WordList& abbreviations,
                                                 const text::WordList& function_words) {
  std::string raw;
  std::set<std::size_t> starts;
  for (const auto& e : doc.edus) {
    if (!raw.empty()) raw += ' ';
    const auto lead = e.find_first_not_of(" \t");
    starts.insert(raw.size() + (lead == std::string::npos ? 0 : lead));
    raw += e;
  }
  const text::Document parsed = text::parse_document(raw, abbreviations, function_words);
  std::vector<LabeledSentence> out;
  for (const auto& s : parsed.sentences) {
    LabeledSentence ls{s, std::vector<bool>(s.tokens.size(), false)};
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      ls.starts[i] = i == 0 || starts.count(s.tokens[i].span.start) > 0;
    }
    out.push_back(std::move(ls));
  }
  return out;
}

BoundaryModel train_boundary(const std::vector<LabeledSentence>& corpus, double reg) {
  if (!(reg > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reg must be positive");
  std::vector<LinearExample> examples;
  std::size_t positives = 0;
  for (const auto& ls : corpus) {
    for (std::size_t i = 1; i < ls.sentence.tokens.size(); ++i) {
      const bool start = ls.starts[i];
      positives += start ? 1 : 0;
      examples.push_back({boundary_features(ls.sentence, i), start ? 1u : 0u});
    }
  }
  if (positives == 0) {
    throw Error(ErrorCode::kDegenerateCorpus, "corpus has no sentence-internal EDU boundaries");
  }
  LinearTrainOptions opts;
  opts.reg = reg;
  return BoundaryModel(LinearModel::train(examples, 2, opts));
}

// --- bracketed trees ------------------------------------------------------------------

namespace {

class BracketReader {
 public:
  BracketReader(std::string_view s, const RelationInventory& inv, RstTree& tree)
      : s_(s), inv_(inv), tree_(tree) {}

  std::size_t read_node() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] != '(') {
      const std::string tok = read_token();
      std::size_t used = 0;
      unsigned long unit = 0;
      try {
        unit = std::stoul(tok, &used);
      } catch (const std::exception&) {
        fail("expected a leaf index, got '" + tok + "'");
      }
      if (used != tok.size()) fail("expected a leaf index, got '" + tok + "'");
      if (unit != next_leaf_) fail("leaves must appear as 0..n-1 in order");
      ++next_leaf_;
      return tree_.add_leaf(unit);
    }
    ++pos_;
    const std::string relation = read_token();
    if (!inv_.contains(relation)) {
      throw Error(ErrorCode::kUnknownRelation, "unknown relation '" + relation + "'");
    }
    const Nuclearity nuc = parse_nuclearity(read_token());
    const std::size_t left = read_node();
    const std::size_t right = read_node();
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
    ++pos_;
    return tree_.add_internal(relation, nuc, left, right);
  }

  void finish() {
    skip_space();
    if (pos_ != s_.size()) fail("trailing characters");
  }

 private:
  [[noreturn]] void fail(const std::string& m) const {
    throw Error(ErrorCode::kFormatError, "bracketed tree at offset " + std::to_string(pos_) + ": " + m);
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string read_token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) fail("expected a token");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  const RelationInventory& inv_;
  RstTree& tree_;
  std::size_t pos_ = 0;
  std::size_t next_leaf_ = 0;
};

void write_bracketed(const RstTree& t, std::size_t node, std::string& out) {
  const RstNode& n = t.node(node);
  if (n.is_leaf()) {
    out += std::to_string(*n.unit);
    return;
  }
  out += '(';
  out += n.relation;
  out += ' ';
  out += nuclearity_name(n.nuclearity);
  out += ' ';
  write_bracketed(t, n.left, out);
  out += ' ';
  write_bracketed(t, n.right, out);
  out += ')';
}

void post_order(const RstTree& t, std::size_t node, std::vector<Action>& out) {
  const RstNode& n = t.node(node);
  if (n.is_leaf()) {
    out.push_back(Action::shift());
    return;
  }
  post_order(t, n.left, out);
  post_order(t, n.right, out);
  out.push_back(Action::reduce(n.relation, n.nuclearity));
}

nlohmann::json node_json(const RstTree& t, std::size_t node, const std::vector<Edu>& units) {
  const RstNode& n = t.node(node);
  nlohmann::json j;
  j["span"] = {n.span.first, n.span.last};
  if (n.is_leaf()) {
    j["unit"] = *n.unit;
    if (*n.unit < units.size()) j["text"] = units[*n.unit].text;
    return j;
  }
  j["relation"] = n.relation;
  j["nuclearity"] = nuclearity_name(n.nuclearity);
  j["children"] = {node_json(t, n.left, units), node_json(t, n.right, units)};
  return j;
}

}  // namespace

RstTree parse_bracketed(std::string_view s, const RelationInventory& inventory) {
  RstTree tree;
  BracketReader reader(s, inventory, tree);
  tree.set_root(reader.read_node());
  reader.finish();
  tree.validate();
  return tree;
}

std::string to_bracketed(const RstTree& tree) {
  std::string out;
  write_bracketed(tree, tree.root(), out);
  return out;
}

std::vector<Action> gold_actions(const RstTree& tree) {
  std::vector<Action> out;
  post_order(tree, tree.root(), out);
  return out;
}

// --- learned transitions --------------------------------------------------------------

std::vector<std::string> transition_features(const ParserState& st) {
  const auto& units = *st.units;
  auto first_word = [](const Edu& e) { return e.words.empty() ? std::string("<none>") : e.words[0]; };
  auto cue = [](const Edu& e) {
    auto c = leading_cue(e);
    return c ? c->first + ":" + std::string(nuclearity_name(c->second)) : std::string("none");
  };
  std::vector<std::string> f;
  f.push_back("stack=" + std::to_string(std::min<std::size_t>(st.stack.size(), 3)));
  f.push_back(st.queue_empty() ? "queue_empty" : "queue_nonempty");
  if (!st.stack.empty()) {
    const auto& s0 = st.stack.back();
    const Edu& u0 = units[s0.span.first];
    f.push_back("s0_cue=" + cue(u0));
    f.push_back("s0_first=" + first_word(u0));
    f.push_back(s0.span.size() == 1 ? "s0_single" : "s0_multi");
    if (st.stack.size() >= 2) {
      const auto& s1 = st.stack[st.stack.size() - 2];
      f.push_back("s1_first=" + first_word(units[s1.span.first]));
      f.push_back(units[s1.span.first].paragraph == u0.paragraph ? "s01_same_para" : "s01_cross_para");
      f.push_back("s0_cue+s01=" + cue(u0) + "|" +
                  (units[s1.span.first].paragraph == u0.paragraph ? "same" : "cross"));
    }
    if (!st.queue_empty()) {
      const Edu& q0 = units[st.next];
      f.push_back("q0_cue=" + cue(q0));
      f.push_back("q0_first=" + first_word(q0));
      f.push_back(q0.paragraph != units[s0.span.last].paragraph ? "q0_new_para" : "q0_same_para");
    }
  }
  return f;
}

Action RelationModel::choose(const ParserState& st) const {
  const auto scores = model_.scores(transition_features(st));
  std::vector<std::size_t> order(labels_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (std::size_t i : order) {
    Action a = Action::from_label(labels_[i]);
    if (a.kind == Action::Kind::kShift ? st.can_shift() : st.can_reduce()) return a;
  }
  if (st.can_reduce()) return Action::reduce(std::string(kDefaultRelation), Nuclearity::kNS);
  return Action::shift();
}

nlohmann::json RelationModel::to_json() const {
  return {{"schema", 1}, {"kind", "relation"}, {"labels", labels_}, {"model", model_.to_json()}};
}

RelationModel RelationModel::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "relation" || j.value("schema", 0) != 1) {
    throw Error(ErrorCode::kFormatError, "not a schema-1 relation model");
  }
  return RelationModel(LinearModel::from_json(j.at("model")),
                       j.at("labels").get<std::vector<std::string>>());
}

RelationModel train_relation_model(const std::vector<GoldParse>& corpus, double reg) {
  std::vector<std::pair<std::vector<std::string>, std::string>> raw;
  std::set<std::string> label_set;
  for (const auto& g : corpus) {
    if (g.units.size() != g.tree.leaf_count()) {
      throw Error(ErrorCode::kInvalidArgument, "gold tree leaf count does not match its units");
    }
    ParserState st;
    st.units = &g.units;
    RstTree scratch;
    for (const auto& a : gold_actions(g.tree)) {
      raw.emplace_back(transition_features(st), a.label());
      label_set.insert(a.label());
      apply_action(st, scratch, a);
    }
  }
  if (label_set.size() < 2) {
    throw Error(ErrorCode::kDegenerateCorpus, "gold trees contain no reduce actions");
  }
  std::vector<std::string> labels(label_set.begin(), label_set.end());
  std::vector<LinearExample> examples;
  for (auto& [features, label] : raw) {
    const auto idx = static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), label) - labels.begin());
    examples.push_back({std::move(features), idx});
  }
  LinearTrainOptions opts;
  opts.reg = reg;
  LinearModel model = LinearModel::train(examples, labels.size(), opts);
  return RelationModel(std::move(model), std::move(labels));
}

// --- queries --------------------------------------------------------------------------

std::vector<Span> satellite_spans(const RstTree& tree, std::string_view relation,
                                  const RelationInventory& inventory) {
  inventory.require(relation);
  std::vector<Span> out;
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const RstNode& n = tree.node(i);
    if (n.is_leaf() || n.relation != relation) continue;
    if (auto sat = tree.satellite(i)) out.push_back(tree.node(*sat).span);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::size_t> relation_counts(const RstTree& tree) {
  std::map<std::string, std::size_t> counts;
  for (const auto& n : tree.nodes()) {
    if (!n.is_leaf()) ++counts[n.relation];
  }
  return counts;
}

namespace {

class LiftPolicy : public TransitionPolicy {
 public:
  LiftPolicy(const RstTree& edu_tree, std::vector<std::size_t> first_edu,
             std::vector<std::size_t> last_edu)
      : tree_(edu_tree), first_(std::move(first_edu)), last_(std::move(last_edu)) {}

  Action next(const ParserState& st) override {
    Action a = inner_.next(st);
    if (a.kind == Action::Kind::kReduce) {
      const auto& right = st.stack.back();
      const auto& left = st.stack[st.stack.size() - 2];
      const std::size_t lca = tree_.lowest_common_ancestor(last_[left.span.last], first_[right.span.first]);
      const RstNode& n = tree_.node(lca);
      if (!n.is_leaf()) {
        a.relation = n.relation;
        a.nuclearity = n.nuclearity;
      }
    }
    return a;
  }

 private:
  HeuristicPolicy inner_;
  const RstTree& tree_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> last_;
};

}  // namespace

RstTree merge_to_sentences(const RstTree& edu_tree, const std::vector<Edu>& edus,
                           const std::vector<Edu>& sentences) {
  std::map<std::size_t, std::size_t> position;  // global sentence index -> unit position
  for (std::size_t k = 0; k < sentences.size(); ++k) position[sentences[k].sentence] = k;
  std::vector<std::size_t> sent_of(edus.size());
  std::vector<std::size_t> first(sentences.size(), edus.size());
  std::vector<std::size_t> last(sentences.size(), 0);
  for (std::size_t i = 0; i < edus.size(); ++i) {
    const auto it = position.find(edus[i].sentence);
    if (it == position.end()) throw Error(ErrorCode::kInvalidArgument, "EDU outside the sentence list");
    sent_of[i] = it->second;
    first[it->second] = std::min(first[it->second], i);
    last[it->second] = std::max(last[it->second], i);
  }

  bool respects = true;
  for (const auto& n : edu_tree.nodes()) {
    if (n.is_leaf()) continue;
    const Span ls = edu_tree.node(n.left).span;
    const Span rs = edu_tree.node(n.right).span;
    if (sent_of[n.span.first] != sent_of[n.span.last] && sent_of[ls.last] == sent_of[rs.first]) {
      respects = false;
      break;
    }
  }

  if (respects) {
    RstTree out;
    std::function<std::size_t(std::size_t)> build = [&](std::size_t node) -> std::size_t {
      const RstNode& n = edu_tree.node(node);
      if (sent_of[n.span.first] == sent_of[n.span.last]) return out.add_leaf(sent_of[n.span.first]);
      const std::size_t l = build(n.left);
      const std::size_t r = build(n.right);
      return out.add_internal(n.relation, n.nuclearity, l, r);
    };
    out.set_root(build(edu_tree.root()));
    return out;
  }

  LiftPolicy policy(edu_tree, first, last);
  return parse(sentences, policy).tree;
}

nlohmann::json to_json(const RstTree& tree, const std::vector<Edu>& units) {
  return node_json(tree, tree.root(), units);
}

}  // namespace coach::discourse
