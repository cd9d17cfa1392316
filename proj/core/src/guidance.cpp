#include "coach/guidance.hpp"

#include "coach/error.hpp"
#include "coach/io.hpp"

namespace coach::guidance {

GuidanceRules GuidanceRules::from_json(const nlohmann::json& j) {
  if (j.value("schema", 0) != 1) throw Error(ErrorCode::kFormatError, "guidance rules need schema 1");
  GuidanceRules r;
  try {
    for (const auto& [k, v] : j.at("facets").items()) {
      if (!metrics::facet_from_name(k)) throw Error(ErrorCode::kFormatError, "unknown facet '" + k + "'");
      r.facet_tips[k] = v.get<std::string>();
    }
    for (const auto& [k, v] : j.at("missing_genres").items()) {
      if (!genre::genre_from_name(k)) throw Error(ErrorCode::kFormatError, "unknown genre '" + k + "'");
      r.genre_tips[k] = v.get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad guidance rules: ") + e.what());
  }
  return r;
}

GuidanceRules GuidanceRules::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path));
}

std::vector<Tip> generate(const GuidanceRules& rules, const metrics::FacetScores& scores,
                          const std::set<genre::GenreLabel>& missing) {
  std::vector<Tip> tips;
  std::optional<metrics::Facet> lowest;
  for (auto f : metrics::kAllFacets) {
    if (!scores[f]) continue;
    if (!lowest || *scores[f] < *scores[*lowest]) lowest = f;
  }
  if (lowest) {
    const std::string name(metrics::facet_name(*lowest));
    if (auto it = rules.facet_tips.find(name); it != rules.facet_tips.end()) {
      tips.push_back({"facet", name, it->second});
    }
  }
  for (auto g : genre::kAllGenres) {
    if (!missing.count(g)) continue;
    const std::string name(genre::genre_name(g));
    if (auto it = rules.genre_tips.find(name); it != rules.genre_tips.end()) {
      tips.push_back({"genre", name, it->second});
    }
  }
  return tips;
}

nlohmann::json to_json(const std::vector<Tip>& tips) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tips) arr.push_back({{"kind", t.kind}, {"key", t.key}, {"text", t.text}});
  return arr;
}

}  // namespace coach::guidance
