#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmexp {

/// A face is a strictly ascending list of 0-based vertex indices.
/// The empty face (dimension -1) is allowed.
using Face = std::vector<int>;

inline int face_dimension(const Face& f) { return static_cast<int>(f.size()) - 1; }

/// Exact binomial coefficient; k is small everywhere in this library.
inline std::int64_t binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Colexicographic rank of a k-subset among all k-subsets of any universe.
/// rank({v_0 < ... < v_{k-1}}) = sum_i C(v_i, i+1).
inline std::int64_t colex_rank(const Face& f) {
  std::int64_t r = 0;
  for (std::size_t i = 0; i < f.size(); ++i) r += binom(f[i], static_cast<std::int64_t>(i) + 1);
  return r;
}

/// Inverse of colex_rank for k-subsets.
inline Face colex_unrank(std::int64_t rank, int k) {
  Face f(static_cast<std::size_t>(k));
  for (int i = k; i >= 1; --i) {
    // largest v with C(v, i) <= rank
    std::int64_t lo = i - 1, hi = i;
    while (binom(hi, i) <= rank) hi *= 2;
    while (lo + 1 < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (binom(mid, i) <= rank) lo = mid; else hi = mid;
    }
    f[static_cast<std::size_t>(i - 1)] = static_cast<int>(lo);
    rank -= binom(lo, i);
  }
  return f;
}

/// Advance a k-subset of [0,n) to its colex successor. Returns false at the last subset.
inline bool next_subset_colex(Face& f, int n) {
  const int k = static_cast<int>(f.size());
  for (int i = 0; i < k; ++i) {
    const int limit = (i + 1 < k) ? f[static_cast<std::size_t>(i + 1)] : n;
    if (f[static_cast<std::size_t>(i)] + 1 < limit) {
      ++f[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) f[static_cast<std::size_t>(j)] = j;
      return true;
    }
  }
  return false;
}

inline Face first_subset(int k) {
  Face f(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) f[static_cast<std::size_t>(i)] = i;
  return f;
}

/// Throws unless f is strictly ascending with all vertices in [0, n).
inline void validate_face(const Face& f, int n) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0 || f[i] >= n)
      throw std::invalid_argument("face vertex " + std::to_string(f[i]) + " out of range [0," +
                                  std::to_string(n) + ")");
    if (i > 0 && f[i] <= f[i - 1])
      throw std::invalid_argument("face vertices must be strictly increasing");
  }
}

/// Sorts a vertex list into a Face, rejecting repeated vertices.
inline Face make_face(std::vector<int> vertices, int n) {
  std::sort(vertices.begin(), vertices.end());
  for (std::size_t i = 1; i < vertices.size(); ++i)
    if (vertices[i] == vertices[i - 1])
      throw std::invalid_argument("face has repeated vertex " + std::to_string(vertices[i]));
  validate_face(vertices, n);
  return vertices;
}

/// Number of set partitions of [n] into exactly k non-empty blocks,
/// saturating at `cap` to keep the DP overflow-free.
inline std::int64_t stirling_second(int n, int k, std::int64_t cap = (std::int64_t{1} << 62)) {
  if (k <= 0 || k > n) return 0;
  std::vector<std::int64_t> row(static_cast<std::size_t>(k) + 1, 0);
  row[1] = 1;  // S(1, 1)
  for (int i = 2; i <= n; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) {
      std::int64_t v = row[static_cast<std::size_t>(j)];
      std::int64_t prev = row[static_cast<std::size_t>(j - 1)];
      std::int64_t s = (v > (cap - prev) / j) ? cap : j * v + prev;
      row[static_cast<std::size_t>(j)] = std::min(s, cap);
    }
    row[0] = 0;
  }
  return row[static_cast<std::size_t>(k)];
}

/// Thrown when an exact enumeration would exceed its size guard.
class instance_too_large : public std::runtime_error {
 public:
  instance_too_large(const std::string& what, std::int64_t count)
      : std::runtime_error(what + " (count = " + std::to_string(count) + ")"), count_(count) {}
  std::int64_t count() const { return count_; }

 private:
  std::int64_t count_;
};

}  // namespace lmexp
