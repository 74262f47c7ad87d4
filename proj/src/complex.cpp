#include "lmexp/complex.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "lmexp/rng.hpp"

namespace lmexp {

int LinkGraph::local_index(int global_vertex) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), global_vertex);
  if (it == vertices.end() || *it != global_vertex)
    throw std::invalid_argument("vertex " + std::to_string(global_vertex) + " not in link");
  return static_cast<int>(it - vertices.begin());
}

std::vector<int> LinkGraph::degrees() const {
  std::vector<int> deg(vertices.size(), 0);
  for (const auto& [u, v] : edges) {
    ++deg[static_cast<std::size_t>(local_index(u))];
    ++deg[static_cast<std::size_t>(local_index(v))];
  }
  return deg;
}

void Complex::require_dimensions(int n, int d) {
  if (d < 1) throw std::invalid_argument("top dimension d must be >= 1");
  if (n <= d) throw std::invalid_argument("need n > d, got n = " + std::to_string(n) +
                                          ", d = " + std::to_string(d));
}

Complex::Complex(int n, int d, std::vector<std::int64_t> sorted_top_ranks)
    : n_(n), d_(d), top_ranks_(std::move(sorted_top_ranks)) {
  num_codim1_ = binom(n, d);
  codegree_.assign(static_cast<std::size_t>(num_codim1_), 0);
  coface_offset_.assign(static_cast<std::size_t>(num_codim1_) + 1, 0);
  coface_vertex_.resize(top_ranks_.size() * static_cast<std::size_t>(d + 1));

  // Colex rank of rho minus its i-th vertex, for all i, via prefix/suffix sums.
  const int k = d + 1;
  std::vector<std::int64_t> sub_rank(static_cast<std::size_t>(k));
  auto sub_ranks_of = [&](const Face& rho) {
    std::int64_t prefix = 0;
    std::vector<std::int64_t> suffix(static_cast<std::size_t>(k) + 1, 0);
    for (int j = k - 1; j >= 0; --j)
      suffix[static_cast<std::size_t>(j)] =
          suffix[static_cast<std::size_t>(j) + 1] + binom(rho[static_cast<std::size_t>(j)], j);
    for (int i = 0; i < k; ++i) {
      sub_rank[static_cast<std::size_t>(i)] = prefix + suffix[static_cast<std::size_t>(i) + 1];
      prefix += binom(rho[static_cast<std::size_t>(i)], i + 1);
    }
  };

  for (std::int64_t r : top_ranks_) {
    Face rho = colex_unrank(r, k);
    sub_ranks_of(rho);
    for (int i = 0; i < k; ++i)
      ++codegree_[static_cast<std::size_t>(sub_rank[static_cast<std::size_t>(i)])];
  }
  for (std::int64_t f = 0; f < num_codim1_; ++f)
    coface_offset_[static_cast<std::size_t>(f) + 1] =
        coface_offset_[static_cast<std::size_t>(f)] + codegree_[static_cast<std::size_t>(f)];

  std::vector<std::int64_t> cursor(coface_offset_.begin(), coface_offset_.end() - 1);
  for (std::int64_t r : top_ranks_) {
    Face rho = colex_unrank(r, k);
    sub_ranks_of(rho);
    for (int i = 0; i < k; ++i) {
      std::int64_t face = sub_rank[static_cast<std::size_t>(i)];
      coface_vertex_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(face)]++)] =
          rho[static_cast<std::size_t>(i)];
    }
  }
}

Complex Complex::generate(int n, int d, double p, std::uint64_t seed) {
  require_dimensions(n, d);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("need p in [0, 1]");

  std::vector<std::int64_t> ranks;
  if (p > 0.0) {
    Face rho = first_subset(d + 1);
    std::int64_t counter = 0;
    do {
      if (uniform01(stream_value(seed, static_cast<std::uint64_t>(counter))) < p)
        ranks.push_back(counter);
      ++counter;
    } while (next_subset_colex(rho, n));
  }
  return Complex(n, d, std::move(ranks));
}

Complex Complex::from_faces(int n, int d, const std::vector<Face>& faces) {
  require_dimensions(n, d);
  std::vector<std::int64_t> ranks;
  ranks.reserve(faces.size());
  for (const Face& f : faces) {
    if (static_cast<int>(f.size()) != d + 1)
      throw std::invalid_argument("top face must have " + std::to_string(d + 1) + " vertices, got " +
                                  std::to_string(f.size()));
    ranks.push_back(colex_rank(make_face(f, n)));
  }
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  return Complex(n, d, std::move(ranks));
}

Face Complex::top_face(std::int64_t index) const {
  return colex_unrank(top_ranks_[static_cast<std::size_t>(index)], d_ + 1);
}

bool Complex::has_top_rank(std::int64_t rank) const {
  return std::binary_search(top_ranks_.begin(), top_ranks_.end(), rank);
}

bool Complex::has_top(const Face& rho) const {
  if (static_cast<int>(rho.size()) != d_ + 1) return false;
  validate_face(rho, n_);
  return has_top_rank(colex_rank(rho));
}

int Complex::codegree(const Face& sigma) const {
  if (static_cast<int>(sigma.size()) != d_)
    throw std::invalid_argument("codegree expects a (d-1)-face with " + std::to_string(d_) +
                                " vertices");
  validate_face(sigma, n_);
  return codegree_by_rank(colex_rank(sigma));
}

int Complex::min_codegree() const {
  if (codegree_.empty()) return 0;
  return *std::min_element(codegree_.begin(), codegree_.end());
}

std::span<const int> Complex::coface_vertices(std::int64_t sigma_rank) const {
  const auto lo = coface_offset_[static_cast<std::size_t>(sigma_rank)];
  const auto hi = coface_offset_[static_cast<std::size_t>(sigma_rank) + 1];
  return {coface_vertex_.data() + lo, static_cast<std::size_t>(hi - lo)};
}

std::vector<Face> Complex::neighbors(const Face& sigma) const {
  if (static_cast<int>(sigma.size()) != d_)
    throw std::invalid_argument("neighbors expects a (d-1)-face");
  validate_face(sigma, n_);
  const std::int64_t r = colex_rank(sigma);
  std::vector<std::int64_t> out_ranks;
  out_ranks.reserve(coface_vertices(r).size() * static_cast<std::size_t>(d_));
  Face other(sigma.size());
  for (int v : coface_vertices(r)) {
    // drop each original vertex of sigma, keep v
    for (int drop = 0; drop < d_; ++drop) {
      int idx = 0;
      for (int j = 0; j < d_; ++j) {
        if (j == drop) continue;
        other[static_cast<std::size_t>(idx++)] = sigma[static_cast<std::size_t>(j)];
      }
      other[static_cast<std::size_t>(d_ - 1)] = v;
      std::sort(other.begin(), other.end());
      out_ranks.push_back(colex_rank(other));
    }
  }
  std::sort(out_ranks.begin(), out_ranks.end());
  std::vector<Face> out;
  out.reserve(out_ranks.size());
  for (std::int64_t rr : out_ranks) out.push_back(colex_unrank(rr, d_));
  return out;
}

LinkGraph Complex::link_graph(const Face& tau) const {
  if (static_cast<int>(tau.size()) != d_ - 1)
    throw std::invalid_argument("link_graph expects a (d-2)-face with " + std::to_string(d_ - 1) +
                                " vertices");
  validate_face(tau, n_);

  LinkGraph g;
  g.vertices.reserve(static_cast<std::size_t>(n_ - d_ + 1));
  for (int v = 0; v < n_; ++v)
    if (!std::binary_search(tau.begin(), tau.end(), v)) g.vertices.push_back(v);

  std::vector<int> extra;
  extra.reserve(2);
  for (std::int64_t i = 0; i < top_count(); ++i) {
    Face rho = top_face(i);
    if (!std::includes(rho.begin(), rho.end(), tau.begin(), tau.end())) continue;
    extra.clear();
    std::set_difference(rho.begin(), rho.end(), tau.begin(), tau.end(), std::back_inserter(extra));
    g.edges.emplace_back(extra[0], extra[1]);
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

namespace {

using nlohmann::json;

Complex complex_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("d") || !j.contains("faces"))
    throw std::invalid_argument("complex JSON must be an object with n, d, faces");
  if (!j["n"].is_number_integer() || !j["d"].is_number_integer() || !j["faces"].is_array())
    throw std::invalid_argument("complex JSON has wrong field types");
  const int n = j["n"].get<int>();
  const int d = j["d"].get<int>();
  std::vector<Face> faces;
  faces.reserve(j["faces"].size());
  for (const auto& jf : j["faces"]) {
    if (!jf.is_array()) throw std::invalid_argument("each face must be an array of ints");
    Face f;
    f.reserve(jf.size());
    for (const auto& v : jf) {
      if (!v.is_number_integer()) throw std::invalid_argument("face vertices must be integers");
      f.push_back(v.get<int>());
    }
    faces.push_back(std::move(f));
  }
  return Complex::from_faces(n, d, faces);
}

}  // namespace

Complex read_complex_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid complex JSON: ") + e.what());
  }
  return complex_from_json(j);
}

Complex read_complex_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_complex_json(in);
}

void write_complex_json(const Complex& y, std::ostream& out) {
  json faces = json::array();
  for (std::int64_t i = 0; i < y.top_count(); ++i) faces.push_back(y.top_face(i));
  json j{{"n", y.n()}, {"d", y.d()}, {"faces", std::move(faces)}};
  out << j.dump(2) << '\n';
}

void write_complex_json_file(const Complex& y, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_complex_json(y, out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace lmexp
