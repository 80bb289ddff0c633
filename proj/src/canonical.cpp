#include "himap/canonical.hpp"

#include <algorithm>
#include <cctype>

namespace himap {

std::string canonicalize(std::string_view raw_name) {
  std::string out;
  out.reserve(raw_name.size());
  bool pending_space = false;
  for (char ch : raw_name) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (std::ispunct(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  std::size_t m = std::max(a.size(), b.size());
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

std::vector<std::string_view> split_tokens(std::string_view key) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < key.size()) {
    while (i < key.size() && key[i] == ' ') ++i;
    std::size_t j = i;
    while (j < key.size() && key[j] != ' ') ++j;
    if (j > i) out.push_back(key.substr(i, j - i));
    i = j;
  }
  return out;
}

namespace {

// Walks whitespace-separated tokens without allocating.
struct Tokens {
  std::string_view s;
  std::size_t count() const {
    std::size_t n = 0, i = 0;
    while (i < s.size()) {
      while (i < s.size() && s[i] == ' ') ++i;
      if (i == s.size()) break;
      ++n;
      while (i < s.size() && s[i] != ' ') ++i;
    }
    return n;
  }
  // next token at or after i; i moves past it
  std::string_view next(std::size_t& i) const {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    auto t = s.substr(i, j - i);
    i = j;
    return t;
  }
  // previous token ending at or before i; i moves before it
  std::string_view prev(std::size_t& i) const {
    while (i > 0 && s[i - 1] == ' ') --i;
    std::size_t j = i;
    while (j > 0 && s[j - 1] != ' ') --j;
    auto t = s.substr(j, i - j);
    i = j;
    return t;
  }
};

}  // namespace

bool token_contained(std::string_view a, std::string_view b) {
  Tokens ta{a}, tb{b};
  std::size_t na = ta.count(), nb = tb.count();
  if (na == 0 || nb == 0) return false;
  if (na > nb) {
    std::swap(ta, tb);
    std::swap(na, nb);
  }
  bool prefix = true;
  for (std::size_t k = 0, i = 0, j = 0; k < na && prefix; ++k) prefix = ta.next(i) == tb.next(j);
  if (prefix) return true;
  bool suffix = true;
  for (std::size_t k = 0, i = ta.s.size(), j = tb.s.size(); k < na && suffix; ++k) suffix = ta.prev(i) == tb.prev(j);
  return suffix;
}

namespace {

// Edit distance <= k, evaluated on the diagonal band |i - j| <= k only.
bool within_distance(std::string_view a, std::string_view b, std::size_t k) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > k) return false;
  const std::size_t big = k + 1;
  thread_local std::vector<std::size_t> row;
  row.assign(b.size() + 1, big);
  for (std::size_t j = 0; j <= std::min(b.size(), k); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t lo = i > k ? i - k : 1;
    std::size_t hi = std::min(b.size(), i + k);
    std::size_t diag = row[lo - 1];
    row[lo - 1] = i <= k ? i : big;
    std::size_t best = row[lo - 1];
    for (std::size_t j = lo; j <= hi; ++j) {
      std::size_t up = row[j];
      std::size_t v = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      row[j] = std::min(v, big);
      diag = up;
      best = std::min(best, row[j]);
    }
    if (hi < b.size()) row[hi + 1] = big;
    if (best > k) return false;
  }
  return row[b.size()] <= k;
}

}  // namespace

bool is_duplicate(std::string_view key_a, std::string_view key_b, double tau) {
  if (key_a == key_b) return true;
  if (token_contained(key_a, key_b)) return true;
  std::size_t m = std::max(key_a.size(), key_b.size());
  // largest distance d with 1 - d/m >= tau, using the same comparison as similarity()
  std::size_t k = 0;
  while (k < m && 1.0 - static_cast<double>(k + 1) / static_cast<double>(m) >= tau) ++k;
  return within_distance(key_a, key_b, k);
}

}  // namespace himap
