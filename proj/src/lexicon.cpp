#include "classdiff/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "classdiff/error.hpp"

namespace classdiff {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string lowercase_trim(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_ascii_space(raw[begin])) ++begin;
  while (end > begin && is_ascii_space(raw[end - 1])) --end;
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(raw[i]))));
  }
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

constexpr std::size_t kMinStemLength = 3;

std::string stem(std::string s) {
  if (ends_with(s, "ies") && s.size() - 2 >= kMinStemLength) {
    s.erase(s.size() - 3);
    s.push_back('y');
    return s;
  }
  if (ends_with(s, "es") && s.size() - 2 >= kMinStemLength) {
    const std::string_view base(s.data(), s.size() - 2);
    if (ends_with(base, "s") || ends_with(base, "x") || ends_with(base, "z") ||
        ends_with(base, "ch") || ends_with(base, "sh")) {
      s.erase(s.size() - 2);
      return s;
    }
  }
  if (ends_with(s, "s") && !ends_with(s, "ss") &&
      s.size() - 1 >= kMinStemLength) {
    s.pop_back();
  }
  return s;
}

bool parse_rating(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last;
}

}  // namespace

std::string normalize_term(std::string_view raw) {
  std::string lowered;
  lowered.reserve(raw.size());
  for (const char c : raw) {
    if (is_ascii_space(c)) continue;
    lowered.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(c))));
  }
  if (lowered.empty()) {
    throw Error(ErrorCode::empty_term, "term is empty after normalization");
  }
  return stem(std::move(lowered));
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> curr(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitution =
          prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, substitution});
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

std::string_view to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::exact: return "exact";
    case MatchKind::stemmed: return "stemmed";
    case MatchKind::nearest: return "nearest";
  }
  return "unknown";
}

void ConcretenessLexicon::insert(std::string_view term, double rating) {
  if (!(rating >= 0.0 && rating <= 5.0)) {
    throw Error(ErrorCode::range_error,
                "concreteness rating out of [0, 5]: " + std::to_string(rating));
  }
  const std::string key = normalize_term(term);
  auto [it, inserted] = entries_.try_emplace(key, rating);
  if (!inserted) {
    it->second = std::max(it->second, rating);  // duplicate keys keep the max
  }
}

LookupResult ConcretenessLexicon::lookup(std::string_view term) const {
  if (entries_.empty()) {
    throw Error(ErrorCode::empty_lexicon, "lookup on an empty lexicon");
  }

  const std::string trimmed = lowercase_trim(term);
  if (auto it = entries_.find(trimmed); it != entries_.end()) {
    return {it->second, MatchKind::exact, it->first};
  }

  std::string normalized = trimmed;
  bool have_normalized = false;
  try {
    normalized = normalize_term(term);
    have_normalized = true;
  } catch (const Error&) {
    // Whitespace-only query: fall through to nearest-match on the trimmed
    // form so that lookup stays total.
  }
  if (have_normalized) {
    if (auto it = entries_.find(normalized); it != entries_.end()) {
      return {it->second, MatchKind::stemmed, it->first};
    }
  }

  // std::map iterates keys in ascending order, so the first minimum found is
  // the lexicographically smallest tie.
  const std::map<std::string, double>::const_iterator end = entries_.end();
  auto best = end;
  std::size_t best_distance = std::numeric_limits<std::size_t>::max();
  for (auto it = entries_.begin(); it != end; ++it) {
    const std::size_t d = levenshtein(normalized, it->first);
    if (d < best_distance) {
      best_distance = d;
      best = it;
    }
  }
  return {best->second, MatchKind::nearest, best->first};
}

ConcretenessLexicon load_lexicon(std::istream& in) {
  ConcretenessLexicon lexicon;
  std::string line;
  std::size_t line_number = 0;
  bool saw_content = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::parse_error,
                  "line " + std::to_string(line_number) +
                      ": expected exactly `term<TAB>rating`");
    }
    const std::string term = line.substr(0, tab);
    const std::string rating_field = line.substr(tab + 1);

    double rating = 0.0;
    if (!parse_rating(rating_field, rating)) {
      if (!saw_content) {
        saw_content = true;  // header row
        continue;
      }
      throw Error(ErrorCode::parse_error,
                  "line " + std::to_string(line_number) +
                      ": rating field '" + rating_field + "' is not numeric");
    }
    saw_content = true;
    if (!(rating >= 0.0 && rating <= 5.0)) {
      throw Error(ErrorCode::range_error,
                  "line " + std::to_string(line_number) + ": rating " +
                      rating_field + " outside [0, 5]");
    }
    try {
      lexicon.insert(term, rating);
    } catch (const Error& e) {
      throw Error(ErrorCode::parse_error,
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return lexicon;
}

ConcretenessLexicon load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open lexicon file: " + path);
  }
  return load_lexicon(in);
}

}  // namespace classdiff
