#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lmexp/complex.hpp"

namespace lmexp {

/// Vertex partition into labeled blocks A_0, ..., A_d.
struct Partition {
  std::vector<std::vector<int>> blocks;
};

/// Exact Cheeger data: the minimum score, a partition attaining it, and the
/// number of top faces transversal to that partition.
struct CheegerResult {
  double value = 0;
  Partition witness;
  std::int64_t crossing = 0;
};

/// Counts top faces with exactly one vertex in every block of `p`.
/// Requires d+1 non-empty disjoint blocks covering [0, n).
std::int64_t crossing_faces(const Complex& y, const Partition& p);

/// n * crossing / (|A_0| * ... * |A_d|), the quantity h(Y) minimizes.
double partition_score(const Complex& y, const Partition& p);

/// Global minimum of partition_score over every partition of [0, n) into
/// d+1 non-empty blocks, enumerated as restricted-growth strings. Refuses
/// instances with more than 10^7 partitions. Deterministic under any worker
/// count: ties resolve to the lexicographically first string.
CheegerResult cheeger_exact(const Complex& y);

/// Upper bound n * min_codegree / (n - d) attained by the singleton
/// partition on a minimum-co-degree face, with that witness.
std::pair<double, Partition> cheeger_from_min_codegree(const Complex& y);

/// {"h": ..., "witness": [[...], ...], "crossing": ...}
std::string cheeger_result_json(const CheegerResult& r);

}  // namespace lmexp
