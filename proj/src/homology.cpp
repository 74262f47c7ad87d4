#include "lmexp/homology.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace lmexp {

namespace {

using SpMatI = Eigen::SparseMatrix<std::int64_t>;
using SpMatD = Eigen::SparseMatrix<double>;

constexpr double rank_rel_tol = 1e-10;
constexpr double zero_eig_tol = 1e-8;

// Colex rank of `face` with the vertex at position `drop` removed.
std::int64_t subface_rank(const Face& face, int drop) {
  std::int64_t r = 0;
  int pos = 0;
  for (int j = 0; j < static_cast<int>(face.size()); ++j) {
    if (j == drop) continue;
    pos += 1;
    r += binom(face[static_cast<std::size_t>(j)], pos);
  }
  return r;
}

}  // namespace

Eigen::SparseMatrix<std::int64_t> boundary_matrix_int(const Complex& y, int j) {
  if (j < 1 || j > y.d())
    throw std::invalid_argument("boundary_matrix needs 1 <= j <= d, got j = " + std::to_string(j));
  const int k = j + 1;  // vertices per column face
  const std::int64_t rows = binom(y.n(), j);
  const std::int64_t cols = (j == y.d()) ? y.top_count() : binom(y.n(), k);

  std::vector<Eigen::Triplet<std::int64_t>> trip;
  trip.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(k));
  Face face = first_subset(k);
  for (std::int64_t c = 0; c < cols; ++c) {
    if (j == y.d()) face = y.top_face(c);
    for (int i = 0; i < k; ++i)
      trip.emplace_back(subface_rank(face, i), c, (i % 2 == 0) ? 1 : -1);
    if (j != y.d()) next_subset_colex(face, y.n());
  }
  SpMatI m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> boundary_matrix(const Complex& y, int j) {
  return boundary_matrix_int(y, j).cast<double>();
}

Eigen::SparseMatrix<double> coboundary_matrix(const Complex& y, int j, WeightScheme scheme) {
  if (j < 0 || j > y.d() - 1)
    throw std::invalid_argument("coboundary_matrix needs 0 <= j <= d-1, got j = " +
                                std::to_string(j));
  const int k = j + 2;  // vertices per row face
  const std::int64_t rows = (j + 1 == y.d()) ? y.top_count() : binom(y.n(), k);
  const std::int64_t cols = binom(y.n(), j + 1);

  // Weights differ from 1 only on (d-1)-faces: rows carry one when k == d
  // (so j == d-2, complete level), columns when k - 1 == d (so j == d-1).
  const bool weighted_rows = scheme == WeightScheme::normalized && k == y.d();
  const bool weighted_cols = scheme == WeightScheme::normalized && k - 1 == y.d();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(k));
  Face face = first_subset(k);
  for (std::int64_t r = 0; r < rows; ++r) {
    if (j + 1 == y.d()) face = y.top_face(r);
    const double inv_wr = weighted_rows ? static_cast<double>(y.codegree_by_rank(r)) : 1.0;
    for (int i = 0; i < k; ++i) {
      const std::int64_t sub_r = subface_rank(face, i);
      const double wc = weighted_cols ? 1.0 / static_cast<double>(y.codegree_by_rank(sub_r)) : 1.0;
      trip.emplace_back(r, sub_r, ((i % 2 == 0) ? 1.0 : -1.0) * wc * inv_wr);
    }
    if (j + 1 != y.d()) next_subset_colex(face, y.n());
  }
  SpMatD m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> upper_laplacian(const Complex& y, WeightScheme scheme) {
  if (scheme == WeightScheme::combinatorial) {
    SpMatI b = boundary_matrix_int(y, y.d());
    SpMatI bt = b.transpose();
    SpMatI lap = b * bt;
    lap.prune([](auto, auto, std::int64_t v) { return v != 0; });
    return lap.cast<double>();
  }
  if (y.min_codegree() == 0)
    throw std::domain_error("normalized Laplacian undefined: a (d-1)-face has co-degree 0");
  SpMatD b = boundary_matrix(y, y.d());
  SpMatD lap = b * coboundary_matrix(y, y.d() - 1, WeightScheme::normalized);
  lap.prune([](auto, auto, double v) { return v != 0.0; });
  return lap;
}

namespace {

// boundary_{d-1}, including d == 1 where it is the all-ones row on vertices.
Eigen::MatrixXd codim1_boundary_dense(const Complex& y) {
  if (y.d() == 1) return Eigen::MatrixXd::Ones(1, y.n());
  return Eigen::MatrixXd(boundary_matrix(y, y.d() - 1));
}

}  // namespace

Eigen::MatrixXd cycle_space_basis(const Complex& y) {
  const Eigen::MatrixXd b = codim1_boundary_dense(y);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::int64_t rank = 0;
  if (sv.size() > 0 && sv(0) > 0) {
    const double cut = rank_rel_tol * sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rank;
  }
  return svd.matrixV().rightCols(b.cols() - rank);
}

namespace {

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

// Smallest eigenpair of symmetric m, restricted to the orthogonal complement of
// `locked`: Lanczos with full reorthogonalization on shift*I - m, restarted
// until the matvec budget runs out.
RitzPair lanczos_smallest(const Eigen::MatrixXd& m, double shift,
                          const std::vector<Eigen::VectorXd>& locked, double tol,
                          std::int64_t max_matvec, std::uint64_t seed) {
  const Eigen::Index q = m.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  auto deflate = [&](Eigen::VectorXd& v) {
    for (const auto& u : locked) v -= u.dot(v) * u;
  };

  Eigen::VectorXd start(q);
  for (Eigen::Index i = 0; i < q; ++i) start(i) = gauss(rng);
  deflate(start);
  if (start.norm() < 1e-300) start.setOnes(), deflate(start);
  start.normalize();

  const Eigen::Index sweep_cap = std::min<Eigen::Index>(q, 200);
  std::int64_t used = 0;
  RitzPair best{shift, start};
  bool have_best = false;

  while (used < max_matvec) {
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;  // beta[i] couples basis[i] and basis[i+1]
    basis.reserve(static_cast<std::size_t>(sweep_cap));

    Eigen::VectorXd v = have_best ? best.vector : start;
    deflate(v);
    if (v.norm() < 1e-300) {
      for (Eigen::Index i = 0; i < q; ++i) v(i) = gauss(rng);
      deflate(v);
    }
    v.normalize();

    double residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXd ritz_coeff;
    double theta = 0.0;
    bool exhausted = false;

    auto ritz_from = [&](Eigen::Index k) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k)
          t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      Eigen::Index top;
      es.eigenvalues().maxCoeff(&top);  // largest of shift*I - m = smallest of m
      theta = es.eigenvalues()(top);
      ritz_coeff = es.eigenvectors().col(top);
      const double tail = (static_cast<std::size_t>(k) <= beta.size() && k >= 1)
                              ? std::abs(beta[static_cast<std::size_t>(k - 1)])
                              : 0.0;
      residual = tail * std::abs(ritz_coeff(k - 1));
    };

    Eigen::Index k = 0;
    Eigen::Index next_check = 16;
    while (k < sweep_cap && used < max_matvec) {
      basis.push_back(v);
      Eigen::VectorXd w = shift * v - m * v;
      ++used;
      deflate(w);
      const double a = v.dot(w);
      alpha.push_back(a);
      // full reorthogonalization, twice for safety
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : basis) w -= u.dot(w) * u;
      const double b2 = w.norm();
      beta.push_back(b2);
      ++k;
      if (b2 < 1e-13) {
        exhausted = true;  // Krylov space is invariant; Ritz values exact
        break;
      }
      v = w / b2;
      if (k == next_check) {
        ritz_from(k);
        if (residual <= tol) break;
        next_check = std::min<Eigen::Index>(next_check * 2, sweep_cap);
      }
    }
    if (k == 0) break;
    ritz_from(k);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(q);
    for (Eigen::Index i = 0; i < k; ++i) y += ritz_coeff(i) * basis[static_cast<std::size_t>(i)];
    deflate(y);
    if (y.norm() > 1e-300) y.normalize();
    best = RitzPair{theta, y};
    have_best = true;
    if (residual <= tol || exhausted) break;
  }

  best.value = shift - best.value;  // back to an eigenvalue of m
  return best;
}

}  // namespace

SpectralReport spectral_gap(const Complex& y, const SpectralOptions& options) {
  SpectralReport report;
  const Eigen::MatrixXd basis = cycle_space_basis(y);
  report.cycle_dim = basis.cols();
  if (report.cycle_dim == 0) {
    if (options.want_spectrum) report.spectrum = Eigen::VectorXd(0);
    return report;
  }

  const SpMatD lap = upper_laplacian(y, WeightScheme::combinatorial);
  Eigen::MatrixXd projected = basis.transpose() * (lap * basis);
  projected = ((projected + projected.transpose()) * 0.5).eval();

  const bool dense = !options.force_iterative && y.codim1_count() <= dense_spectral_cap;
  if (dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected);
    const Eigen::VectorXd& eigs = es.eigenvalues();
    report.lambda = eigs(0);
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      if (eigs(i) < zero_eig_tol) ++report.harmonic_dim;
    if (options.want_spectrum) report.spectrum = eigs;
    return report;
  }

  report.iterative = true;
  const double shift = projected.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  const std::int64_t budget = 10 * static_cast<std::int64_t>(report.cycle_dim);
  const double tol = 1e-8 * std::max(1.0, shift);

  std::vector<Eigen::VectorXd> locked;
  RitzPair pair = lanczos_smallest(projected, shift, locked, tol, budget, 0x5eed);
  report.lambda = pair.value;
  while (pair.value < zero_eig_tol &&
         report.harmonic_dim < report.cycle_dim) {
    ++report.harmonic_dim;
    if (report.harmonic_dim == report.cycle_dim) break;
    locked.push_back(pair.vector);
    pair = lanczos_smallest(projected, shift, locked, tol, budget,
                            0x5eed + static_cast<std::uint64_t>(report.harmonic_dim));
  }
  return report;
}

std::string spectral_report_json(const SpectralReport& report) {
  nlohmann::json j{{"lambda", report.lambda},
                   {"cycle_dim", report.cycle_dim},
                   {"harmonic_dim", report.harmonic_dim}};
  if (report.spectrum) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < report.spectrum->size(); ++i) arr.push_back((*report.spectrum)(i));
    j["spectrum"] = std::move(arr);
  }
  return j.dump(2);
}

namespace {

struct bareiss_overflow : std::exception {};

using int128 = __int128;

std::int64_t bareiss_rank(std::vector<int128> a, std::int64_t rows, std::int64_t cols) {
  constexpr int128 limit = int128{1} << 62;
  auto at = [&](std::int64_t r, std::int64_t c) -> int128& {
    return a[static_cast<std::size_t>(r * cols + c)];
  };
  auto checked = [&](int128 v) {
    if (v >= limit || v <= -limit) throw bareiss_overflow{};
    return v;
  };

  std::int64_t rank = 0;
  int128 prev = 1;
  for (std::int64_t col = 0; col < cols && rank < rows; ++col) {
    std::int64_t pivot = -1;
    for (std::int64_t r = rank; r < rows; ++r)
      if (at(r, col) != 0) { pivot = r; break; }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (std::int64_t c = col; c < cols; ++c) std::swap(at(pivot, c), at(rank, c));
    const int128 piv = at(rank, col);
    for (std::int64_t r = rank + 1; r < rows; ++r) {
      const int128 factor = at(r, col);
      // the division by the previous pivot is exact (Sylvester's identity)
      for (std::int64_t c = col + 1; c < cols; ++c)
        at(r, c) = (checked(at(r, c)) * checked(piv) - checked(factor) * checked(at(rank, c))) / prev;
      at(r, col) = 0;
    }
    prev = piv;
    ++rank;
  }
  return rank;
}

std::int64_t modp_rank(const std::vector<std::int64_t>& entries, std::int64_t rows,
                       std::int64_t cols, std::int64_t p) {
  std::vector<std::int64_t> a(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::int64_t v = entries[i] % p;
    a[i] = v < 0 ? v + p : v;
  }
  auto at = [&](std::int64_t r, std::int64_t c) -> std::int64_t& {
    return a[static_cast<std::size_t>(r * cols + c)];
  };
  auto inv = [&](std::int64_t x) {  // Fermat
    std::int64_t result = 1, base = x, e = p - 2;
    while (e > 0) {
      if (e & 1) result = result * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return result;
  };

  std::int64_t rank = 0;
  for (std::int64_t col = 0; col < cols && rank < rows; ++col) {
    std::int64_t pivot = -1;
    for (std::int64_t r = rank; r < rows; ++r)
      if (at(r, col) != 0) { pivot = r; break; }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (std::int64_t c = col; c < cols; ++c) std::swap(at(pivot, c), at(rank, c));
    const std::int64_t piv_inv = inv(at(rank, col));
    for (std::int64_t r = rank + 1; r < rows; ++r) {
      if (at(r, col) == 0) continue;
      const std::int64_t factor = at(r, col) * piv_inv % p;
      for (std::int64_t c = col; c < cols; ++c) {
        at(r, c) = (at(r, c) - factor * at(rank, c)) % p;
        if (at(r, c) < 0) at(r, c) += p;
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::int64_t integer_rank(const Eigen::SparseMatrix<std::int64_t>& m) {
  const std::int64_t rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return 0;

  std::vector<int128> dense(static_cast<std::size_t>(rows * cols), 0);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(m, k); it; ++it)
      dense[static_cast<std::size_t>(it.row() * cols + it.col())] = it.value();

  try {
    return bareiss_rank(std::move(dense), rows, cols);
  } catch (const bareiss_overflow&) {
    std::vector<std::int64_t> flat(static_cast<std::size_t>(rows * cols), 0);
    for (int k = 0; k < m.outerSize(); ++k)
      for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(m, k); it; ++it)
        flat[static_cast<std::size_t>(it.row() * cols + it.col())] = it.value();
    // rank can only drop modulo a prime, so take the max of two large primes
    return std::max(modp_rank(flat, rows, cols, 2147483647), modp_rank(flat, rows, cols, 2147483629));
  }
}

namespace {

std::int64_t numeric_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0) return 0;
  const double cut = rank_rel_tol * sv(0);
  std::int64_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

std::int64_t rank_exact_or_numeric(const SpMatI& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  if (m.cols() <= exact_rank_cap && m.rows() * m.cols() <= 8'000'000)
    return integer_rank(m);
  return numeric_rank(Eigen::MatrixXd(m.cast<double>()));
}

}  // namespace

std::int64_t harmonic_dimension(const Complex& y) {
  std::int64_t rank_low;  // rank of boundary_{d-1}
  if (y.d() == 1) {
    rank_low = 1;  // all-ones row
  } else {
    rank_low = rank_exact_or_numeric(boundary_matrix_int(y, y.d() - 1));
  }
  const std::int64_t cycle_dim = y.codim1_count() - rank_low;
  const std::int64_t rank_top =
      (y.top_count() == 0) ? 0 : rank_exact_or_numeric(boundary_matrix_int(y, y.d()));
  return cycle_dim - rank_top;
}

double GarlandReport::max_residual() const {
  double m = std::max({decomposition, link_quadratic, norm_identity, degree_split});
  if (cycle_sums) m = std::max(m, *cycle_sums);
  return m;
}

GarlandReport garland_check(const Complex& y, const Cochain& f) {
  if (y.d() < 2) throw std::invalid_argument("garland_check requires d >= 2");
  if (f.size() != y.codim1_count())
    throw std::invalid_argument("cochain length must be C(n, d)");

  const int d = y.d();
  const SpMatD lap = upper_laplacian(y, WeightScheme::combinatorial);
  const Eigen::VectorXd lap_f = lap * f;

  // degree form <Df, f> straight from the co-degree table
  Eigen::VectorXd deg_f(f.size());
  for (std::int64_t r = 0; r < y.codim1_count(); ++r)
    deg_f(r) = static_cast<double>(y.codegree_by_rank(r)) * f(r);
  const double deg_form = deg_f.dot(f);

  Eigen::VectorXd local_sum = Eigen::VectorXd::Zero(f.size());
  double max_quadratic = 0.0, max_cycle_sum = 0.0;
  double sum_restricted_norm = 0.0, sum_link_degree_form = 0.0;

  const std::int64_t tau_count = binom(y.n(), d - 1);
  Face tau = first_subset(d - 1);
  Face sigma(static_cast<std::size_t>(d)), sigma_prime(static_cast<std::size_t>(d));
  for (std::int64_t t = 0; t < tau_count; ++t, next_subset_colex(tau, y.n())) {
    const LinkGraph link = y.link_graph(tau);
    const int lv = link.vertex_count();

    // restriction f_tau and the rank/sign of tau + v for each link vertex
    std::vector<double> g(static_cast<std::size_t>(lv));
    std::vector<std::int64_t> srank(static_cast<std::size_t>(lv));
    std::vector<int> ssign(static_cast<std::size_t>(lv));
    for (int i = 0; i < lv; ++i) {
      const int v = link.vertices[static_cast<std::size_t>(i)];
      std::merge(tau.begin(), tau.end(), &v, &v + 1, sigma.begin());
      const int pos = static_cast<int>(std::lower_bound(sigma.begin(), sigma.end(), v) - sigma.begin());
      srank[static_cast<std::size_t>(i)] = colex_rank(sigma);
      ssign[static_cast<std::size_t>(i)] = (pos % 2 == 0) ? 1 : -1;
      g[static_cast<std::size_t>(i)] = ssign[static_cast<std::size_t>(i)] * f(srank[static_cast<std::size_t>(i)]);
    }

    // localized Laplacian applied through the global coface lists
    double quad_global = 0.0;
    for (int i = 0; i < lv; ++i) {
      const int v = link.vertices[static_cast<std::size_t>(i)];
      std::merge(tau.begin(), tau.end(), &v, &v + 1, sigma.begin());
      const std::int64_t sr = srank[static_cast<std::size_t>(i)];
      double value = static_cast<double>(y.codegree_by_rank(sr)) * f(sr);
      for (int u : y.coface_vertices(sr)) {
        std::merge(tau.begin(), tau.end(), &u, &u + 1, sigma_prime.begin());
        const int upos =
            static_cast<int>(std::lower_bound(sigma_prime.begin(), sigma_prime.end(), u) - sigma_prime.begin());
        const int usign = (upos % 2 == 0) ? 1 : -1;
        value -= ssign[static_cast<std::size_t>(i)] * usign * f(colex_rank(sigma_prime));
      }
      local_sum(sr) += value;
      quad_global += value * f(sr);
    }

    // link-graph side: quadratic form as a sum over edges
    double quad_link = 0.0;
    for (const auto& [a, b] : link.edges) {
      const double diff = g[static_cast<std::size_t>(link.local_index(a))] -
                          g[static_cast<std::size_t>(link.local_index(b))];
      quad_link += diff * diff;
    }
    max_quadratic = std::max(max_quadratic, std::abs(quad_global - quad_link));

    double colsum = 0.0, norm2 = 0.0;
    for (double gv : g) colsum += gv, norm2 += gv * gv;
    max_cycle_sum = std::max(max_cycle_sum, std::abs(colsum));
    sum_restricted_norm += norm2;

    const std::vector<int> link_deg = link.degrees();
    for (int i = 0; i < lv; ++i)
      sum_link_degree_form +=
          static_cast<double>(link_deg[static_cast<std::size_t>(i)]) * g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
  }

  GarlandReport report;
  report.decomposition =
      (lap_f - (local_sum - static_cast<double>(d - 1) * deg_f)).cwiseAbs().maxCoeff();
  report.link_quadratic = max_quadratic;
  report.norm_identity = std::abs(sum_restricted_norm - d * f.dot(f));
  report.degree_split = std::abs(deg_form - sum_link_degree_form / d);

  // part 3 only applies to cycles; detect membership numerically
  const Eigen::MatrixXd bd = codim1_boundary_dense(y);
  const double boundary_norm = (bd * f).cwiseAbs().maxCoeff();
  const double f_scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  if (boundary_norm <= 1e-9 * f_scale) report.cycle_sums = max_cycle_sum;
  return report;
}

double adjacency_form_bound(const LinkGraph& g) {
  const int m = g.vertex_count();
  if (m < 2) return 0.0;
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [a, b] : g.edges) {
    const int i = g.local_index(a), j = g.local_index(b);
    adj(i, j) = adj(j, i) = 1.0;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::VectorXd::Ones(m));
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).rightCols(m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.transpose() * adj * q);
  return es.eigenvalues().maxCoeff();
}

Cochain random_cycle_cochain(const Complex& y, std::uint64_t seed) {
  const Eigen::MatrixXd basis = cycle_space_basis(y);
  if (basis.cols() == 0) return Cochain::Zero(y.codim1_count());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd coeff(basis.cols());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = gauss(rng);
  Cochain f = basis * coeff;
  const double norm = f.norm();
  if (norm > 0) f /= norm;
  return f;
}

}  // namespace lmexp
