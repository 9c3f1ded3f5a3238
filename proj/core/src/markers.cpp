#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>

#include "accsams/errors.hpp"
#include "accsams/structure.hpp"
#include "json_io.hpp"
#include "text.hpp"

namespace accsams {

namespace {

constexpr std::array<std::string_view, 10> kStyleNames = {
    "decimal_dot", "decimal_paren", "multilevel_decimal", "alpha_lower", "alpha_upper",
    "roman_lower", "roman_upper",   "bullet",             "keyword_heading", "none"};

// Bullet glyphs. ASCII ones need a following space to count.
constexpr std::array<std::string_view, 12> kBullets = {
    "•", "◦", "▪", "▫", "■", "□", "●", "○", "·", "–", "—", "►"};
constexpr std::string_view kAsciiBullets = "-*+";

bool boundary(std::string_view s, std::size_t pos) { return pos >= s.size() || text::is_space(s[pos]); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

std::optional<int> to_int(std::string_view digits) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return v;
}

std::string to_roman(int v) {
  static constexpr std::array<std::pair<int, std::string_view>, 13> table = {{{1000, "m"},
                                                                            {900, "cm"},
                                                                            {500, "d"},
                                                                            {400, "cd"},
                                                                            {100, "c"},
                                                                            {90, "xc"},
                                                                            {50, "l"},
                                                                            {40, "xl"},
                                                                            {10, "x"},
                                                                            {9, "ix"},
                                                                            {5, "v"},
                                                                            {4, "iv"},
                                                                            {1, "i"}}};
  std::string out;
  for (const auto& [n, sym] : table) {
    while (v >= n) {
      out += sym;
      v -= n;
    }
  }
  return out;
}

// Canonical lowercase roman numeral -> value.
std::optional<int> parse_roman(std::string_view lower) {
  if (lower.empty() || lower.size() > 15) return std::nullopt;
  static constexpr std::string_view digits = "ivxlcdm";
  static constexpr std::array<int, 7> values = {1, 5, 10, 50, 100, 500, 1000};
  int total = 0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    auto k = digits.find(lower[i]);
    if (k == std::string_view::npos) return std::nullopt;
    int v = values[k];
    int next = 0;
    if (i + 1 < lower.size()) {
      auto k2 = digits.find(lower[i + 1]);
      if (k2 == std::string_view::npos) return std::nullopt;
      next = values[k2];
    }
    total += v < next ? -v : v;
  }
  if (total <= 0 || total >= 4000 || to_roman(total) != lower) return std::nullopt;
  return total;
}

bool is_ambiguous_roman_letter(char c) {
  char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return l == 'i' || l == 'v' || l == 'x';
}

// Letters-only token: a single letter is alphabetic unless it is i/v/x,
// multi-letter tokens must be canonical roman numerals of one case.
std::optional<Marker> letter_marker(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const bool lower = std::all_of(token.begin(), token.end(), is_lower);
  const bool upper = std::all_of(token.begin(), token.end(), is_upper);
  if (!lower && !upper) return std::nullopt;
  Marker m;
  if (token.size() == 1 && !is_ambiguous_roman_letter(token[0])) {
    m.style = lower ? MarkerStyle::alpha_lower : MarkerStyle::alpha_upper;
    m.value = (lower ? token[0] - 'a' : token[0] - 'A') + 1;
    return m;
  }
  auto v = parse_roman(text::to_lower(token));
  if (!v) return std::nullopt;
  m.style = lower ? MarkerStyle::roman_lower : MarkerStyle::roman_upper;
  m.value = *v;
  return m;
}

std::optional<Marker> parenthesized(std::string_view s) {
  if (s.empty() || s[0] != '(') return std::nullopt;
  auto close = s.find(')');
  if (close == std::string_view::npos || close < 2 || !boundary(s, close + 1)) return std::nullopt;
  std::string_view token = s.substr(1, close - 1);
  std::optional<Marker> m;
  if (std::all_of(token.begin(), token.end(), is_digit)) {
    auto v = to_int(token);
    if (!v || *v < 1) return std::nullopt;
    m = Marker{MarkerStyle::decimal_paren, *v, 1, {}};
  } else {
    m = letter_marker(token);
  }
  if (m) m->literal = std::string(s.substr(0, close + 1));
  return m;
}

std::optional<Marker> numeric(std::string_view s) {
  std::size_t end = 0;
  while (end < s.size() && (is_digit(s[end]) || s[end] == '.')) ++end;
  if (end == 0 || !is_digit(s[0])) return std::nullopt;
  std::string_view run = s.substr(0, end);
  const bool trailing_dot = run.back() == '.';
  std::string_view body = trailing_dot ? run.substr(0, run.size() - 1) : run;

  std::vector<int> parts;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto dot = body.find('.', start);
    std::string_view part = body.substr(start, dot == std::string_view::npos ? body.npos : dot - start);
    auto v = to_int(part);
    if (part.empty() || !v || *v < 1) return std::nullopt;
    parts.push_back(*v);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }

  std::size_t lit_end = end;
  const bool paren = !trailing_dot && lit_end < s.size() && s[lit_end] == ')';
  if (paren) ++lit_end;
  if (!boundary(s, lit_end)) return std::nullopt;

  Marker m;
  m.literal = std::string(s.substr(0, lit_end));
  m.value = parts.back();
  if (parts.size() == 1 && trailing_dot) {
    m.style = MarkerStyle::decimal_dot;
  } else if (parts.size() == 1 && paren) {
    m.style = MarkerStyle::decimal_paren;
  } else {
    m.style = MarkerStyle::multilevel_decimal;
    m.depth = static_cast<int>(parts.size());
  }
  return m;
}

std::optional<Marker> lettered(std::string_view s) {
  std::size_t end = 0;
  while (end < s.size() && (is_lower(s[end]) || is_upper(s[end]))) ++end;
  if (end == 0 || end >= s.size() || (s[end] != '.' && s[end] != ')')) return std::nullopt;
  if (!boundary(s, end + 1)) return std::nullopt;
  auto m = letter_marker(s.substr(0, end));
  if (m) m->literal = std::string(s.substr(0, end + 1));
  return m;
}

std::optional<Marker> bullet(std::string_view s) {
  if (!s.empty() && kAsciiBullets.find(s[0]) != std::string_view::npos) {
    if (!boundary(s, 1)) return std::nullopt;
    return Marker{MarkerStyle::bullet, std::nullopt, 1, std::string(1, s[0])};
  }
  for (std::string_view b : kBullets) {
    if (s.substr(0, b.size()) == b) return Marker{MarkerStyle::bullet, std::nullopt, 1, std::string(b)};
  }
  return std::nullopt;
}

std::optional<Marker> keyword(std::string_view s, const StructureConfig& cfg) {
  const std::string lowered = text::to_lower(s);
  std::optional<Marker> best;
  for (const auto& kw : cfg.heading_keywords) {
    if (kw.empty() || lowered.compare(0, kw.size(), kw) != 0) continue;
    std::size_t pos = kw.size();
    std::size_t ws = pos;
    while (ws < s.size() && text::is_space(s[ws])) ++ws;
    if (ws == pos) continue;
    std::size_t digits_end = ws;
    while (digits_end < s.size() && is_digit(s[digits_end])) ++digits_end;
    if (digits_end == ws) continue;
    if (digits_end < s.size() && !text::is_space(s[digits_end]) &&
        std::string_view(".:)").find(s[digits_end]) == std::string_view::npos) {
      continue;
    }
    auto v = to_int(s.substr(ws, digits_end - ws));
    if (!v || *v < 1) continue;
    Marker m{MarkerStyle::keyword_heading, *v, 1, std::string(s.substr(0, digits_end))};
    if (!best || m.literal.size() > best->literal.size()) best = std::move(m);
  }
  return best;
}

}  // namespace

std::string_view to_string(MarkerStyle style) { return kStyleNames[static_cast<std::size_t>(style)]; }

std::optional<MarkerStyle> parse_marker_style(std::string_view name) {
  for (std::size_t i = 0; i < kStyleNames.size(); ++i) {
    if (kStyleNames[i] == name) return static_cast<MarkerStyle>(i);
  }
  return std::nullopt;
}

bool is_flat_ordinal(MarkerStyle style) {
  switch (style) {
    case MarkerStyle::decimal_dot:
    case MarkerStyle::decimal_paren:
    case MarkerStyle::alpha_lower:
    case MarkerStyle::alpha_upper:
    case MarkerStyle::roman_lower:
    case MarkerStyle::roman_upper:
      return true;
    default:
      return false;
  }
}

void check_structure_config(const StructureConfig& cfg) {
  if (cfg.heading_keywords.empty()) throw ConfigError("heading keyword list must not be empty");
  for (const auto& kw : cfg.heading_keywords) {
    if (kw.empty() || !text::is_lowercase(kw)) {
      throw ConfigError("heading keyword '" + kw + "' must be non-empty lowercase");
    }
  }
}

StructureConfig parse_heading_keywords(std::string_view bytes) {
  json_io::json j;
  try {
    j = json_io::parse(bytes);
  } catch (const SyntaxError& e) {
    throw ConfigError(std::string("heading keywords: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("heading keywords must be a JSON list of strings");
  StructureConfig cfg;
  cfg.heading_keywords.clear();
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError("heading keywords must be a JSON list of strings");
    cfg.heading_keywords.push_back(v.get<std::string>());
  }
  check_structure_config(cfg);
  return cfg;
}

Marker classify_marker(std::optional<std::string_view> input, const StructureConfig& cfg) {
  if (!input) return {};
  const std::string s = text::trim(*input);
  if (s.empty()) return {};

  std::optional<Marker> best;
  auto consider = [&](std::optional<Marker> m) {
    if (m && (!best || m->literal.size() > best->literal.size())) best = std::move(m);
  };
  consider(keyword(s, cfg));
  consider(parenthesized(s));
  consider(numeric(s));
  consider(lettered(s));
  consider(bullet(s));
  return best.value_or(Marker{});
}

void resolve_marker_runs(std::vector<Marker>& seq) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    Marker& m = seq[i];
    if (m.style != MarkerStyle::roman_lower && m.style != MarkerStyle::roman_upper) continue;
    std::string letters;
    for (char c : m.literal) {
      if (is_lower(c) || is_upper(c)) letters.push_back(c);
    }
    if (letters.size() != 1 || !is_ambiguous_roman_letter(letters[0])) continue;
    const bool lower = m.style == MarkerStyle::roman_lower;
    const MarkerStyle alpha = lower ? MarkerStyle::alpha_lower : MarkerStyle::alpha_upper;
    const int ordinal = (lower ? letters[0] - 'a' : letters[0] - 'A') + 1;
    const Marker& prev = seq[i - 1];
    if (prev.style == alpha && prev.value && *prev.value == ordinal - 1) {
      m.style = alpha;
      m.value = ordinal;
    }
  }
}

}  // namespace accsams
