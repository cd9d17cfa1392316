#pragma once

// Rule-table revision tips: one tip for the weakest facet and one per
// missing genre. Tables are data, loaded from JSON.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coach/genre.hpp"
#include "coach/metrics.hpp"

namespace coach::guidance {

struct Tip {
  std::string kind;  // "facet" or "genre"
  std::string key;   // facet or genre name
  std::string text;
};

struct GuidanceRules {
  std::map<std::string, std::string> facet_tips;  // facet name -> tip
  std::map<std::string, std::string> genre_tips;  // genre name -> tip

  // {"schema": 1, "facets": {...}, "missing_genres": {...}}
  static GuidanceRules from_json(const nlohmann::json& j);
  static GuidanceRules load(const std::filesystem::path& path);
};

// The lowest defined facet (ties by facet order) yields one tip; each missing
// genre, in canonical order, yields one more. Keys without a rule are skipped.
std::vector<Tip> generate(const GuidanceRules& rules, const metrics::FacetScores& scores,
                          const std::set<genre::GenreLabel>& missing);

nlohmann::json to_json(const std::vector<Tip>& tips);

}  // namespace coach::guidance
