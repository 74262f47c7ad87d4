#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmexp/combinatorics.hpp"

namespace lmexp {

/// Link of a (d-2)-face: a graph on the vertices outside the face.
/// With a complete (d-1)-skeleton every outside vertex belongs to the link.
struct LinkGraph {
  std::vector<int> vertices;                // ascending global vertex ids
  std::vector<std::pair<int, int>> edges;   // (u, v) global ids, u < v, lexicographic

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges.size()); }

  /// Position of a global vertex id inside `vertices`.
  int local_index(int global_vertex) const;

  /// Vertex degrees, indexed like `vertices`.
  std::vector<int> degrees() const;
};

/// A d-dimensional complex on n vertices with complete (d-1)-skeleton:
/// all subsets of size <= d are faces, plus an explicit set of d-faces.
/// Immutable after construction. (d-1)-faces are indexed by colex rank
/// in [0, C(n,d)); top faces are kept as a sorted list of colex ranks.
class Complex {
 public:
  /// Bernoulli(p) inclusion of every (d+1)-subset, decided by a counter-based
  /// stream keyed on (seed, colex rank of the subset). Enumeration order and
  /// threading cannot change the outcome.
  static Complex generate(int n, int d, double p, std::uint64_t seed);

  /// Build from an explicit list of d-faces. Vertex lists may be unsorted;
  /// duplicate faces collapse. Throws on repeated or out-of-range vertices.
  static Complex from_faces(int n, int d, const std::vector<Face>& faces);

  int n() const { return n_; }
  int d() const { return d_; }

  std::int64_t top_count() const { return static_cast<std::int64_t>(top_ranks_.size()); }
  const std::vector<std::int64_t>& top_ranks() const { return top_ranks_; }
  Face top_face(std::int64_t index) const;
  bool has_top_rank(std::int64_t rank) const;
  bool has_top(const Face& rho) const;

  /// Number of (d-1)-faces, i.e. C(n, d).
  std::int64_t codim1_count() const { return num_codim1_; }

  int codegree_by_rank(std::int64_t rank) const { return codegree_[static_cast<std::size_t>(rank)]; }
  int codegree(const Face& sigma) const;

  /// Minimum co-degree over all C(n,d) potential (d-1)-faces, zeros included.
  int min_codegree() const;

  /// Vertices v with sigma + v a top face; sigma given by colex rank.
  std::span<const int> coface_vertices(std::int64_t sigma_rank) const;

  /// Walk neighbors of sigma: faces sharing a top coface with sigma.
  /// Exactly d * codegree(sigma) of them, all distinct, ascending colex.
  std::vector<Face> neighbors(const Face& sigma) const;

  /// Link of a (d-2)-face tau (the empty face when d == 1).
  LinkGraph link_graph(const Face& tau) const;

 private:
  Complex(int n, int d, std::vector<std::int64_t> sorted_top_ranks);
  static void require_dimensions(int n, int d);

  int n_ = 0;
  int d_ = 0;
  std::int64_t num_codim1_ = 0;
  std::vector<std::int64_t> top_ranks_;     // ascending
  std::vector<std::int32_t> codegree_;      // size C(n, d)
  std::vector<std::int64_t> coface_offset_; // CSR over (d-1)-face ranks
  std::vector<std::int32_t> coface_vertex_; // extending vertices per (d-1)-face
};

/// JSON format: {"n": int, "d": int, "faces": [[int, ...], ...]}.
Complex read_complex_json(std::istream& in);
Complex read_complex_json_file(const std::string& path);
void write_complex_json(const Complex& y, std::ostream& out);
void write_complex_json_file(const Complex& y, const std::string& path);

}  // namespace lmexp
