#include <fstream>
#include <istream>
#include <sstream>

#include "accsams/errors.hpp"
#include "accsams/ingest.hpp"
#include "json_io.hpp"
#include "text.hpp"

namespace accsams {

using json_io::json;

namespace {

bool contains_any(const std::string& lowered, const std::vector<std::string>& needles) {
  for (const auto& n : needles) {
    if (!n.empty() && lowered.find(n) != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string("'") + key + "' must be a list of strings");
  std::vector<std::string> out;
  for (const json& v : j) {
    if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a list of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<WeightedKeyword> weighted_list(const std::string& field, const json& j) {
  std::vector<WeightedKeyword> out;
  auto bad = [&] { return ConfigError("field_keywords." + field + " must map keywords to weights"); };
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_number()) throw bad();
      out.push_back({it.key(), it.value().get<double>()});
    }
  } else if (j.is_array()) {
    for (const json& item : j) {
      if (item.is_string()) {
        out.push_back({item.get<std::string>(), 1.0});
      } else if (item.is_array() && item.size() == 2 && item[0].is_string() && item[1].is_number()) {
        out.push_back({item[0].get<std::string>(), item[1].get<double>()});
      } else {
        throw bad();
      }
    }
  } else {
    throw bad();
  }
  return out;
}

}  // namespace

FilterConfig FilterConfig::defaults() {
  FilterConfig cfg;
  cfg.field_keywords = {
      {"chemistry", {{"chemistry", 2}, {"chemie", 2}, {"molecule", 1}, {"reaction", 1}, {"molekül", 1}}},
      {"computer science",
       {{"algorithm", 2}, {"informatik", 2}, {"programming", 1}, {"complexity", 1}, {"datenstruktur", 1}}},
      {"economics", {{"economics", 2}, {"wirtschaft", 2}, {"market", 1}, {"markt", 1}, {"price", 1}}},
      {"electrical engineering", {{"elektrotechnik", 2}, {"circuit", 1}, {"voltage", 1}, {"spannung", 1}}},
      {"law", {{"recht", 2}, {"law", 2}, {"court", 1}, {"gericht", 1}}},
      {"mathematics", {{"mathematik", 2}, {"integral", 1}, {"matrix", 1}, {"theorem", 1}, {"beweis", 1}}},
      {"mechanical engineering", {{"maschinenbau", 2}, {"mechanics", 1}, {"mechanik", 1}, {"torque", 1}}},
      {"physics", {{"physics", 2}, {"physik", 2}, {"velocity", 1}, {"energy", 1}, {"energie", 1}}},
  };
  return cfg;
}

void check_filter_config(const FilterConfig& cfg) {
  if (cfg.include_keywords.empty()) throw ConfigError("include_keywords must not be empty");
  auto lower = [](const std::vector<std::string>& xs, const char* what) {
    for (const auto& x : xs) {
      if (x.empty()) throw ConfigError(std::string(what) + " contains an empty entry");
      if (!text::is_lowercase(x)) throw ConfigError(std::string(what) + " entry '" + x + "' is not lowercase");
    }
  };
  lower(cfg.include_keywords, "include_keywords");
  lower(cfg.false_positive_phrases, "false_positive_phrases");
  for (const auto& [field, kws] : cfg.field_keywords) {
    for (const auto& kw : kws) {
      if (kw.keyword.empty() || !text::is_lowercase(kw.keyword)) {
        throw ConfigError("field_keywords." + field + " entry '" + kw.keyword + "' must be non-empty lowercase");
      }
      if (kw.weight < 0) throw ConfigError("field_keywords." + field + " has a negative weight");
    }
  }
}

FilterConfig parse_filter_config(std::string_view bytes) {
  json j;
  try {
    j = json_io::parse(bytes);
  } catch (const SyntaxError& e) {
    throw ConfigError(std::string("filter config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("filter config must be a JSON object");
  FilterConfig cfg = FilterConfig::defaults();
  if (auto it = j.find("include_keywords"); it != j.end()) cfg.include_keywords = string_list(*it, "include_keywords");
  if (auto it = j.find("false_positive_phrases"); it != j.end()) {
    cfg.false_positive_phrases = string_list(*it, "false_positive_phrases");
  }
  if (auto it = j.find("field_keywords"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("field_keywords must be an object");
    cfg.field_keywords.clear();
    for (auto f = it->begin(); f != it->end(); ++f) cfg.field_keywords[f.key()] = weighted_list(f.key(), f.value());
  }
  check_filter_config(cfg);
  return cfg;
}

FilterConfig load_filter_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read filter config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_filter_config(ss.str());
}

std::vector<ManifestEntry> parse_manifest(std::istream& in) {
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ManifestError(lineno, e.what());
    }
    if (!j.is_object()) throw ManifestError(lineno, "entry must be a JSON object");
    auto url = j.find("url");
    if (url == j.end() || !url->is_string() || url->get<std::string>().empty()) {
      throw ManifestError(lineno, "entry needs a non-empty string 'url'");
    }
    ManifestEntry e;
    e.url = url->get<std::string>();
    for (auto [key, dest] : {std::pair{"path", &e.path}, std::pair{"text", &e.text}}) {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) continue;
      if (!it->is_string()) throw ManifestError(lineno, std::string("'") + key + "' must be a string or null");
      *dest = it->get<std::string>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string serialize_manifest_entry(const ManifestEntry& e) {
  json j = {{"url", e.url},
            {"path", e.path ? json(*e.path) : json(nullptr)},
            {"text", e.text ? json(*e.text) : json(nullptr)}};
  if (e.needs_text) j["flags"] = json::array({"NEEDS_TEXT"});
  return j.dump();
}

std::vector<ManifestEntry> filter_urls(const std::vector<ManifestEntry>& entries, const FilterConfig& cfg) {
  std::vector<ManifestEntry> kept;
  for (const auto& e : entries) {
    if (contains_any(text::to_lower(e.url), cfg.include_keywords)) kept.push_back(e);
  }
  return kept;
}

std::vector<ManifestEntry> filter_false_positives(const std::vector<ManifestEntry>& entries,
                                                  const FilterConfig& cfg) {
  std::vector<ManifestEntry> kept;
  for (const auto& e : entries) {
    if (!e.text) {
      ManifestEntry flagged = e;
      flagged.needs_text = true;
      kept.push_back(std::move(flagged));
      continue;
    }
    if (!contains_any(text::to_lower(*e.text), cfg.false_positive_phrases)) kept.push_back(e);
  }
  return kept;
}

FieldSuggestion suggest_study_field(std::string_view input, const FilterConfig& cfg) {
  const std::string lowered = text::to_lower(input);
  FieldSuggestion best;
  // std::map iterates fields in lexicographic order, so strict > keeps the
  // smaller name on ties.
  for (const auto& [field, keywords] : cfg.field_keywords) {
    double score = 0.0;
    for (const auto& kw : keywords) {
      score += static_cast<double>(text::count_occurrences(lowered, text::to_lower(kw.keyword))) * kw.weight;
    }
    if (score > best.score) {
      best.field = field;
      best.score = score;
    }
  }
  return best;
}

}  // namespace accsams
