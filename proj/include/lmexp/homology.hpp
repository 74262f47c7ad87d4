#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <string>

#include "lmexp/complex.hpp"

namespace lmexp {

/// Values of a (d-1)-form on canonical (ascending) representatives,
/// indexed by colex rank. The reversed orientation carries the negated value;
/// operators apply the sign flips at assembly time.
using Cochain = Eigen::VectorXd;

enum class WeightScheme { combinatorial, normalized };

/// Above this many (d-1)-faces the spectral solve switches to the iterative path.
inline constexpr std::int64_t dense_spectral_cap = 3000;
/// Above this many columns ranks are computed numerically instead of exactly.
inline constexpr std::int64_t exact_rank_cap = 5000;

/// Matrix of the boundary operator from j-faces to (j-1)-faces, 1 <= j <= d.
/// Columns are top faces (list order) when j == d, complete colex levels below.
/// Entry for dropping the i-th vertex of a column face is (-1)^i.
Eigen::SparseMatrix<std::int64_t> boundary_matrix_int(const Complex& y, int j);
Eigen::SparseMatrix<double> boundary_matrix(const Complex& y, int j);

/// Matrix of the coboundary operator from j-faces to (j+1)-faces, 0 <= j <= d-1:
/// (delta_j f)(s) = (1/w(s)) sum_i (-1)^i w(s minus v_i) f(s minus v_i).
/// The normalized scheme puts weight 1/deg on (d-1)-faces, 1 elsewhere;
/// under unit weights this is the transpose of boundary_matrix(y, j+1).
Eigen::SparseMatrix<double> coboundary_matrix(const Complex& y, int j, WeightScheme scheme);

/// Upper Laplacian of top-adjacent (d-1)-forms: boundary_d composed with
/// coboundary_{d-1}. Combinatorial scheme is symmetric PSD with exact integer
/// entries; the normalized scheme requires every co-degree positive.
Eigen::SparseMatrix<double> upper_laplacian(const Complex& y, WeightScheme scheme);

/// Orthonormal columns spanning the cycle space ker boundary_{d-1}.
/// Rank cut at singular values above 1e-10 of the largest.
Eigen::MatrixXd cycle_space_basis(const Complex& y);

struct SpectralOptions {
  bool force_iterative = false;  // exercise the iterative path below the cap
  bool want_spectrum = true;     // dense path only
};

struct SpectralReport {
  double lambda = 0.0;
  std::int64_t cycle_dim = 0;
  std::int64_t harmonic_dim = 0;
  std::optional<Eigen::VectorXd> spectrum;  // ascending eigenvalues of the projected operator
  bool iterative = false;
};

/// Smallest eigenvalue of the upper Laplacian restricted to the cycle space,
/// via the explicit projected matrix B^T L B. Dense symmetric eigensolve up to
/// dense_spectral_cap (d-1)-faces, Lanczos with deflation beyond it.
SpectralReport spectral_gap(const Complex& y, const SpectralOptions& options = {});

/// {"lambda": float, "cycle_dim": int, "harmonic_dim": int, "spectrum": [...]?}
std::string spectral_report_json(const SpectralReport& report);

/// dim of the (d-1)-st real (co)homology: dim ker boundary_{d-1} - rank boundary_d.
/// Uses exact integer ranks within exact_rank_cap, numerical ranks beyond.
std::int64_t harmonic_dimension(const Complex& y);

/// Exact rank over the integers: fraction-free (Bareiss) elimination in 128-bit
/// arithmetic, falling back to Gaussian elimination modulo two 31-bit primes if
/// the minors overflow.
std::int64_t integer_rank(const Eigen::SparseMatrix<std::int64_t>& m);

/// Residuals of the local-to-global Laplacian decomposition. Each side of every
/// identity is assembled through an independent route (boundary-product matrix
/// vs. per-link accumulation), so agreement is evidence, not tautology.
struct GarlandReport {
  double decomposition = 0.0;          // global Laplacian vs. link sum minus (d-1) * degree term
  double link_quadratic = 0.0;         // localized quadratic form vs. link-graph quadratic form
  std::optional<double> cycle_sums;    // restriction column sums; present when f is a cycle
  double norm_identity = 0.0;          // sum of restricted norms vs. d * |f|^2
  double degree_split = 0.0;           // degree form vs. mean of link degree forms
  double max_residual() const;
};

GarlandReport garland_check(const Complex& y, const Cochain& f);

/// max over f orthogonal to the all-ones vector, |f| = 1, of the adjacency form
/// <Af, f> of a link graph: the top eigenvalue off the all-ones direction.
double adjacency_form_bound(const LinkGraph& g);

/// Unit-norm random element of the cycle space (zero vector if the space is trivial).
Cochain random_cycle_cochain(const Complex& y, std::uint64_t seed);

}  // namespace lmexp
