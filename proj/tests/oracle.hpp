#pragma once

// Brute-force reference implementations used only by the tests.

#include <random>
#include <vector>

#include "dlam/word.hpp"

namespace oracle {

using dlam::Letter;
using dlam::Word;

/// Naive reduction: repeatedly delete the first adjacent x x' pair.
inline std::vector<Letter> reduce(std::vector<Letter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return w;
}

/// All reduced words of length exactly n over rank letters, generated without the library.
inline std::vector<std::vector<Letter>> reduced_of_length(int rank, std::size_t n) {
  std::vector<std::vector<Letter>> out{{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : out) {
      for (int g = 1; g <= rank; ++g) {
        for (Letter x : {g, -g}) {
          if (!w.empty() && w.back() == -x) continue;
          auto v = w;
          v.push_back(x);
          next.push_back(std::move(v));
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<std::vector<Letter>> reduced_up_to(int rank, std::size_t n, bool with_empty = false) {
  std::vector<std::vector<Letter>> out;
  if (with_empty) out.emplace_back();
  for (std::size_t k = 1; k <= n; ++k) {
    auto layer = reduced_of_length(rank, k);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

inline std::vector<Letter> random_letters(std::mt19937& rng, int rank, std::size_t len) {
  std::uniform_int_distribution<int> gen(1, rank);
  std::bernoulli_distribution sign(0.5);
  std::vector<Letter> w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(sign(rng) ? gen(rng) : -gen(rng));
  return w;
}

inline std::vector<Letter> random_reduced(std::mt19937& rng, int rank, std::size_t len) {
  std::uniform_int_distribution<int> gen(1, rank);
  std::bernoulli_distribution sign(0.5);
  std::vector<Letter> w;
  while (w.size() < len) {
    Letter x = sign(rng) ? gen(rng) : -gen(rng);
    if (!w.empty() && w.back() == -x) continue;
    w.push_back(x);
  }
  return w;
}

/// Letters of v repeated enough to hold every factor of length <= depth of v^∞.
inline std::vector<Letter> long_expansion(const std::vector<Letter>& v, std::size_t depth) {
  std::vector<Letter> out;
  while (out.size() < 4 * (depth + v.size())) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace oracle
