#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lmexp/complex.hpp"

namespace lmexp {

/// Lazy random walk on the positive-co-degree (d-1)-faces: stays put with
/// probability gamma, otherwise moves to a uniformly chosen face sharing a
/// top face, each with probability (1-gamma)/(d * deg sigma).
struct WalkKernel {
  double gamma = 0;
  std::vector<std::int64_t> support;       ///< colex ranks, ascending
  Eigen::SparseMatrix<double> transition;  ///< row-stochastic, support-indexed

  /// Position of a face rank inside the support, -1 when absent.
  std::int64_t index_of(std::int64_t rank) const;
};

/// Stationary distribution pi(sigma) = deg(sigma) / ((d+1) |Y^(d)|),
/// indexed by colex rank over the full (d-1)-face level.
struct StationaryDist {
  Eigen::VectorXd pi;
};

/// Visit counts for one trajectory plus total-variation distance between the
/// empirical distribution and pi at doubling checkpoints.
struct TrajectoryStats {
  std::vector<std::int64_t> support;  ///< state space, colex ranks
  std::vector<std::int64_t> visits;   ///< per support index, X_0..X_steps
  std::vector<std::pair<std::int64_t, double>> tv_checkpoints;
};

/// Coface census of a set S of (d-1)-faces: f[i-1] counts the potential
/// cofaces meeting S in exactly i of their d+1 boundary faces; `realized`
/// restricts the same census to the top faces actually present.
struct ShadowProfile {
  std::int64_t m = 0;
  std::vector<std::int64_t> f;
  std::int64_t B_count = 0;  ///< potential cofaces with full boundary in S
  std::vector<std::int64_t> realized;
};

/// Conductance outcome: exact minimum or sampled lower-bound estimate.
struct ConductanceResult {
  double phi = 0;
  std::vector<Face> argmin;
  std::string method;  ///< "exact" or "estimate"
  std::int64_t samples = 0;
  double raw_ratio = 0;  ///< estimator only: worst realized exit ratio
};

/// Builds the gamma-lazy kernel. Faces of co-degree 0 are excluded; throws
/// std::domain_error when nothing remains and std::invalid_argument for
/// gamma outside [0, 1).
WalkKernel transition_kernel(const Complex& y, double gamma);

/// Requires at least one top face.
StationaryDist stationary(const Complex& y);

/// Runs one trajectory of `steps` moves from `start` (which must have
/// positive co-degree). steps = 0 records the point mass at the start.
TrajectoryStats simulate(const Complex& y, double gamma, const Face& start,
                         std::int64_t steps, std::uint64_t seed);

/// Normalized cut count Q(S, S-bar) = cut / (d (d+1) |Y^(d)|) for a set of
/// positive-co-degree faces.
double flow_Q(const Complex& y, const std::vector<Face>& s);

/// Q(S, S-bar) / (pi(S) pi(S-bar)); rejects pi(S) in {0, 1}.
double phi_set(const Complex& y, const std::vector<Face>& s);

/// Exact conductance: minimum of phi_set over all S with 0 < pi(S) <= 1/2.
/// Enumerates every subset of the support; refuses supports larger than 25
/// faces. Ties resolve to the lexicographically smallest index set, making
/// the argmin deterministic under any worker count.
ConductanceResult conductance_exact(const Complex& y);

/// Lower-bound estimate: grows tightly connected sets by randomized BFS
/// (geometric target sizes, pi(S) kept <= 1/2) and returns the worst realized
/// exit ratio scaled by 1/(d(d+1)).
ConductanceResult conductance_estimate(const Complex& y, std::int64_t trials,
                                       std::uint64_t seed);

/// Census of potential cofaces of S against the complete (d+1)-level on [n],
/// with realized counts against `y` when given.
ShadowProfile coface_profile(int n, int d, const std::vector<Face>& s,
                             const Complex* y = nullptr);

/// Splits S into maximal classes connected through shared top faces of `y`.
/// Components and their members come back sorted by colex rank.
std::vector<std::vector<Face>> tight_components(const Complex& y,
                                                const std::vector<Face>& s);

/// Weak Kruskal-Katona: solves m = C(x, r) for real x by bisection and
/// returns the generalized binomial C(x, r+1), an upper bound on the number
/// of (r+1)-cliques in an r-uniform family of m sets.
double kruskal_katona_bound(int r, std::int64_t m);

/// {"phi": ..., "argmin": [[...], ...], "method": ..., "samples": ...}
std::string conductance_report_json(const ConductanceResult& r);

}  // namespace lmexp
