#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medtag {

// Lowercase and split on non-alphanumeric characters.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

inline std::string normalize_join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Hashed bag-of-features text encoder. Each token contributes its own hash
// plus the hash of each of its character trigrams; bucket = hash mod dim,
// sign from bit 63. The accumulated vector is divided by the token count
// (mean pooling) and L2-normalized when the norm is positive.
inline std::vector<double> encode_text_hashed(std::string_view text, int dim) {
  std::vector<double> v(static_cast<size_t>(dim), 0.0);
  const auto tokens = tokenize(text);
  if (tokens.empty()) return v;

  auto add = [&](uint64_t h) {
    const size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim));
    v[bucket] += (h >> 63) ? -1.0 : 1.0;
  };
  for (const auto& tok : tokens) {
    add(fnv1a64(tok));
    if (tok.size() >= 3) {
      for (size_t i = 0; i + 3 <= tok.size(); ++i) {
        add(fnv1a64(std::string_view(tok).substr(i, 3)));
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  double sq = 0.0;
  for (auto& x : v) {
    x *= inv;
    sq += x * x;
  }
  if (sq > 0.0) {
    const double inv_norm = 1.0 / std::sqrt(sq);
    for (auto& x : v) x *= inv_norm;
  }
  return v;
}

}  // namespace medtag
