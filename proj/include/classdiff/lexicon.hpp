#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

namespace classdiff {

// Lowercase, strip all whitespace, then light suffix stemming:
//   "ies" -> "y"; else drop "es" after s/x/z/ch/sh; else drop a trailing "s"
//   not preceded by another "s".
// A rule fires only if the result keeps at least 3 characters, and the first
// firing rule wins; this keeps the function idempotent. Throws EmptyTerm when
// nothing is left after whitespace removal.
std::string normalize_term(std::string_view raw);

std::size_t levenshtein(std::string_view a, std::string_view b);

enum class MatchKind { exact, stemmed, nearest };

std::string_view to_string(MatchKind kind);

struct LookupResult {
  double rating = 0.0;
  MatchKind kind = MatchKind::exact;
  std::string key;  // the lexicon entry that resolved the query
};

// Term -> human-judged concreteness rating in [0, 5]. Keys are stored in
// normalized form; duplicate normalized terms keep the highest rating.
class ConcretenessLexicon {
 public:
  ConcretenessLexicon() = default;

  void insert(std::string_view term, double rating);

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, double>& entries() const noexcept {
    return entries_;
  }

  // Resolution order: exact hit on the lowercased/trimmed term, then a hit on
  // the normalized term, then the nearest key by Levenshtein distance (ties
  // go to the lexicographically smallest key). Total on non-empty lexicons.
  LookupResult lookup(std::string_view term) const;

 private:
  std::map<std::string, double> entries_;
};

// TSV `term<TAB>rating`; a first line whose rating field is non-numeric is
// treated as a header. Blank lines are skipped.
ConcretenessLexicon load_lexicon(std::istream& in);
ConcretenessLexicon load_lexicon_file(const std::string& path);

}  // namespace classdiff
