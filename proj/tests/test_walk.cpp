#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <vector>

#include <json.hpp>

#include "lmexp/combinatorics.hpp"
#include "lmexp/complex.hpp"
#include "lmexp/walk.hpp"

using namespace lmexp;

namespace {

const Complex& two_triangles() {
  static const Complex y = Complex::from_faces(4, 2, {{0, 1, 2}, {0, 1, 3}});
  return y;
}

// oracle adjacency: sigma ~ sigma' iff their union is a top face
bool adjacent(const Complex& y, const Face& a, const Face& b) {
  Face u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return static_cast<int>(u.size()) == y.d() + 1 && y.has_top(u);
}

std::vector<Face> support_faces(const Complex& y) {
  std::vector<Face> faces;
  for (std::int64_t r = 0; r < y.codim1_count(); ++r)
    if (y.codegree_by_rank(r) > 0) faces.push_back(colex_unrank(r, y.d()));
  return faces;
}

// oracle conductance ratio computed from first principles
double phi_oracle(const Complex& y, const std::vector<Face>& s) {
  const std::vector<Face> all = support_faces(y);
  const auto in_s = [&](const Face& f) {
    return std::find(s.begin(), s.end(), f) != s.end();
  };
  std::int64_t cut = 0;
  double deg_s = 0;
  for (const Face& a : all) {
    if (!in_s(a)) continue;
    deg_s += y.codegree(a);
    for (const Face& b : all)
      if (!in_s(b) && adjacent(y, a, b)) ++cut;
  }
  const double m = static_cast<double>(y.top_count());
  const double d = y.d();
  const double q = static_cast<double>(cut) / (d * (d + 1) * m);
  const double pi = deg_s / ((d + 1) * m);
  return q / (pi * (1 - pi));
}

}  // namespace

TEST_CASE("transition kernel rows, unrolled") {
  const WalkKernel k = transition_kernel(two_triangles(), 0.0);
  REQUIRE(k.support == std::vector<std::int64_t>{0, 1, 2, 3, 4});  // {2,3} has degree 0

  const Eigen::MatrixXd p(k.transition);
  const auto row_of = [&](const Face& f) { return k.index_of(colex_rank(f)); };
  const Eigen::Index r02 = row_of({0, 2});
  CHECK(p(r02, row_of({0, 1})) == doctest::Approx(0.5));
  CHECK(p(r02, row_of({1, 2})) == doctest::Approx(0.5));
  CHECK(p.row(r02).sum() == doctest::Approx(1.0));

  const Eigen::Index r01 = row_of({0, 1});
  for (const Face& f : {Face{0, 2}, Face{1, 2}, Face{0, 3}, Face{1, 3}})
    CHECK(p(r01, row_of(f)) == doctest::Approx(0.25));
  CHECK(p(r01, r01) == 0.0);

  const Eigen::MatrixXd lazy(transition_kernel(two_triangles(), 0.5).transition);
  CHECK(lazy(r02, row_of({0, 1})) == doctest::Approx(0.25));
  CHECK(lazy(r02, r02) == doctest::Approx(0.5));
  CHECK(lazy(r01, r01) == doctest::Approx(0.5));
}

TEST_CASE("kernel rejects bad inputs") {
  CHECK_THROWS_AS(transition_kernel(two_triangles(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(transition_kernel(two_triangles(), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(transition_kernel(Complex::generate(6, 2, 0.0, 0), 0.0), std::domain_error);
}

TEST_CASE("kernel structure on random instances") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int d = 2 + static_cast<int>(seed % 2);
    const Complex y = Complex::generate(8, d, 0.5, seed);
    if (y.top_count() == 0) continue;
    for (const double gamma : {0.0, 0.3, 0.9}) {
      const WalkKernel k = transition_kernel(y, gamma);
      const Eigen::VectorXd sums = k.transition * Eigen::VectorXd::Ones(k.transition.cols());
      CHECK((sums.array() - 1.0).abs().maxCoeff() <= 1e-12);
      // off-diagonal positivity pattern = walk adjacency
      const Eigen::MatrixXd p(k.transition);
      for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
          if (i == j) continue;
          const bool adj = adjacent(y, colex_unrank(k.support[static_cast<std::size_t>(i)], d),
                                    colex_unrank(k.support[static_cast<std::size_t>(j)], d));
          CHECK((p(i, j) > 0) == adj);
        }
    }
  }
}

TEST_CASE("stationary distribution") {
  const StationaryDist dist = stationary(two_triangles());
  CHECK(dist.pi(colex_rank({0, 1})) == doctest::Approx(2.0 / 6.0));
  CHECK(dist.pi(colex_rank({0, 2})) == doctest::Approx(1.0 / 6.0));
  CHECK(dist.pi(colex_rank({2, 3})) == 0.0);
  CHECK(dist.pi.sum() == doctest::Approx(1.0));

  const Complex full = Complex::generate(5, 2, 1.0, 0);
  const StationaryDist uniform = stationary(full);
  CHECK(uniform.pi.minCoeff() == doctest::Approx(0.1));
  CHECK(uniform.pi.maxCoeff() == doctest::Approx(0.1));

  CHECK_THROWS_AS(stationary(Complex::generate(6, 2, 0.0, 0)), std::domain_error);
}

TEST_CASE("stationary vector is a fixed point of every kernel") {
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 30; ++seed) {
    const int d = 2 + static_cast<int>(seed % 2);
    const Complex y = Complex::generate(7 + static_cast<int>(seed % 3), d, 0.5, seed);
    if (y.top_count() == 0) continue;
    const StationaryDist dist = stationary(y);
    for (const double gamma : {0.0, 0.3}) {
      const WalkKernel k = transition_kernel(y, gamma);
      Eigen::VectorXd pi(k.support.size());
      for (std::size_t i = 0; i < k.support.size(); ++i)
        pi(static_cast<Eigen::Index>(i)) = dist.pi(k.support[i]);
      CHECK((k.transition.transpose() * pi - pi).cwiseAbs().maxCoeff() <= 1e-12);
    }
    ++tested;
  }
}

TEST_CASE("trajectories mix toward the stationary distribution") {
  const TrajectoryStats run =
      simulate(Complex::generate(5, 2, 1.0, 0), 0.0, {0, 1}, 100000, 42);
  REQUIRE(!run.tv_checkpoints.empty());
  CHECK(run.tv_checkpoints.back().first == 100000);
  CHECK(run.tv_checkpoints.back().second < 0.02);

  const TrajectoryStats a = simulate(two_triangles(), 0.0, {0, 1}, 100000, 1);
  const TrajectoryStats b = simulate(two_triangles(), 0.0, {0, 1}, 100000, 2);
  CHECK(a.tv_checkpoints.back().second < 0.05);
  CHECK(b.tv_checkpoints.back().second < 0.05);
  CHECK(a.visits != b.visits);

  const TrajectoryStats c = simulate(two_triangles(), 0.3, {0, 1}, 5000, 9);
  const TrajectoryStats c2 = simulate(two_triangles(), 0.3, {0, 1}, 5000, 9);
  CHECK(c.visits == c2.visits);  // one deterministic stream per trajectory
}

TEST_CASE("zero-step trajectory is a point mass") {
  const TrajectoryStats run = simulate(two_triangles(), 0.2, {0, 2}, 0, 7);
  std::int64_t total = 0;
  for (const std::int64_t v : run.visits) total += v;
  CHECK(total == 1);
  CHECK(run.visits[1] == 1);  // rank({0,2}) = 1 sits at support index 1
  REQUIRE(run.tv_checkpoints.size() == 1);
  CHECK(run.tv_checkpoints[0].first == 0);

  CHECK_THROWS_AS(simulate(two_triangles(), 0.0, {2, 3}, 10, 0), std::invalid_argument);
}

TEST_CASE("flow examples") {
  const std::vector<Face> all = support_faces(two_triangles());
  CHECK(flow_Q(two_triangles(), all) == 0.0);
  CHECK(flow_Q(two_triangles(), {{0, 2}}) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

  // crossing counts are symmetric in S and its complement
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex y = Complex::generate(7, 2, 0.6, static_cast<std::uint64_t>(trial));
    if (y.top_count() == 0) continue;
    const std::vector<Face> support = support_faces(y);
    std::vector<Face> s, complement;
    for (const Face& f : support)
      (rng() & 1 ? s : complement).push_back(f);
    if (s.empty() || complement.empty()) continue;
    CHECK(flow_Q(y, s) == doctest::Approx(flow_Q(y, complement)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(flow_Q(two_triangles(), {{2, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(flow_Q(two_triangles(), {{0, 1}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("phi of a set") {
  CHECK(phi_set(two_triangles(), {{0, 2}}) == doctest::Approx(1.2).epsilon(1e-13));

  // complement invariance and agreement with a from-scratch oracle
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Complex y = Complex::generate(6, 2, 0.7, seed);
    if (y.top_count() < 2) continue;
    const std::vector<Face> support = support_faces(y);
    std::mt19937_64 rng(seed + 100);
    std::vector<Face> s, complement;
    for (const Face& f : support)
      (rng() & 1 ? s : complement).push_back(f);
    if (s.empty() || complement.empty()) continue;
    CHECK(phi_set(y, s) == doctest::Approx(phi_set(y, complement)).epsilon(1e-12));
    CHECK(phi_set(y, s) == doctest::Approx(phi_oracle(y, s)).epsilon(1e-12));
  }

  const Complex full4 = Complex::generate(4, 2, 1.0, 0);
  CHECK(phi_set(full4, {{0, 1}}) == doctest::Approx(phi_oracle(full4, {{0, 1}})).epsilon(1e-12));

  CHECK_THROWS_AS(phi_set(two_triangles(), support_faces(two_triangles())), std::domain_error);
}

TEST_CASE("exact conductance matches a double enumeration") {
  const Complex y = two_triangles();
  const ConductanceResult got = conductance_exact(y);

  // independent oracle: subsets of the 5 support faces via phi_set
  const std::vector<Face> support = support_faces(y);
  const std::int64_t total_deg = 3 * y.top_count();
  double best = std::numeric_limits<double>::infinity();
  std::int64_t admissible = 0;
  for (std::uint32_t mask = 1; mask + 1 < (1u << support.size()); ++mask) {
    std::vector<Face> s;
    std::int64_t deg = 0;
    for (std::size_t i = 0; i < support.size(); ++i)
      if (mask >> i & 1) {
        s.push_back(support[i]);
        deg += y.codegree(support[i]);
      }
    if (2 * deg > total_deg) continue;
    ++admissible;
    best = std::min(best, phi_set(y, s));
  }
  CHECK(got.phi == doctest::Approx(best).epsilon(1e-12));
  CHECK(got.samples == admissible);
  CHECK(got.method == "exact");
  CHECK(phi_set(y, got.argmin) == doctest::Approx(got.phi).epsilon(1e-12));

  CHECK(conductance_exact(Complex::generate(4, 2, 1.0, 0)).phi > 0.0);
}

TEST_CASE("exact conductance determinism") {
  const Complex y = Complex::generate(6, 2, 0.65, 9);
  const ConductanceResult first = conductance_exact(y);
  for (int run = 0; run < 4; ++run) {
    const ConductanceResult again = conductance_exact(y);
    CHECK(again.phi == first.phi);
    CHECK(again.argmin == first.argmin);
  }
  setenv("LMEXP_WORKERS", "5", 1);
  const ConductanceResult parallel = conductance_exact(y);
  unsetenv("LMEXP_WORKERS");
  CHECK(parallel.phi == first.phi);
  CHECK(parallel.argmin == first.argmin);
}

TEST_CASE("exact conductance refuses large supports") {
  const Complex y = Complex::generate(8, 2, 1.0, 0);  // 28 edges
  CHECK_THROWS_AS(conductance_exact(y), instance_too_large);
  try {
    conductance_exact(y);
  } catch (const instance_too_large& e) {
    CHECK(e.count() == 28);
  }
}

TEST_CASE("estimator yields a valid lower bound") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Complex y = Complex::generate(7, 2, 0.75, seed);
    if (y.top_count() == 0) continue;
    if (static_cast<std::int64_t>(support_faces(y).size()) > 25) continue;
    const ConductanceResult exact = conductance_exact(y);
    const ConductanceResult est = conductance_estimate(y, 50, seed);
    CHECK(est.method == "estimate");
    CHECK(est.phi <= exact.phi + 1e-12);
    CHECK(est.phi == doctest::Approx(est.raw_ratio / 6.0));
    CHECK(est.samples <= 50);
    CHECK(est.samples >= 1);
  }
  const ConductanceResult a = conductance_estimate(two_triangles(), 30, 5);
  const ConductanceResult b = conductance_estimate(two_triangles(), 30, 5);
  CHECK(a.phi == b.phi);
  CHECK(a.argmin == b.argmin);
}

TEST_CASE("sampled tight sets keep a healthy exit ratio at scale") {
  const double p = 2.0 * 2.0 * std::log(30.0) / 30.0;
  const Complex y = Complex::generate(30, 2, p, 2024);
  const ConductanceResult est = conductance_estimate(y, 40, 7);
  CHECK(est.raw_ratio > 0.05);
}

TEST_CASE("coface profile, hand-checked") {
  const ShadowProfile prof = coface_profile(5, 2, {{0, 1}, {0, 2}});
  CHECK(prof.m == 2);
  CHECK(prof.f == std::vector<std::int64_t>{4, 1, 0});
  CHECK(prof.B_count == 0);

  const ShadowProfile single = coface_profile(7, 2, {{2, 4}});
  CHECK(single.f == std::vector<std::int64_t>{5, 0, 0});

  std::vector<Face> all_edges;
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) all_edges.push_back({u, v});
  const ShadowProfile full = coface_profile(4, 2, all_edges);
  CHECK(full.f == std::vector<std::int64_t>{0, 0, 4});
  CHECK(full.B_count == 4);
}

TEST_CASE("coface census identity on random sets") {
  std::mt19937_64 rng(6);
  int tested = 0;
  while (tested < 200) {
    const int d = 2 + static_cast<int>(rng() % 2);
    const int n = d + 2 + static_cast<int>(rng() % (10 - d));
    const std::int64_t level = binom(n, d);
    std::vector<Face> s;
    for (std::int64_t r = 0; r < level; ++r)
      if (rng() % 3 == 0) s.push_back(colex_unrank(r, d));
    if (s.empty()) continue;
    const ShadowProfile prof = coface_profile(n, d, s);
    std::int64_t weighted = 0;
    for (int i = 1; i <= d + 1; ++i) weighted += i * prof.f[static_cast<std::size_t>(i - 1)];
    CHECK(weighted == prof.m * (n - d));
    ++tested;
  }
}

TEST_CASE("realized profile stays below the potential one") {
  const Complex y = Complex::generate(8, 2, 0.5, 3);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Face> s;
    for (std::int64_t r = 0; r < y.codim1_count(); ++r)
      if (rng() % 4 == 0) s.push_back(colex_unrank(r, 2));
    if (s.empty()) continue;
    const ShadowProfile prof = coface_profile(8, 2, s, &y);
    for (std::size_t i = 0; i < prof.f.size(); ++i) CHECK(prof.realized[i] <= prof.f[i]);
  }

  // a single face has no interior cofaces, so every realized coface exits
  const Complex full = Complex::generate(6, 2, 1.0, 0);
  const ShadowProfile single = coface_profile(6, 2, {{0, 1}}, &full);
  CHECK(single.realized == std::vector<std::int64_t>{4, 0, 0});
}

TEST_CASE("tight components") {
  const Complex tri = Complex::from_faces(3, 2, {{0, 1, 2}});
  CHECK(tight_components(tri, {{0, 1}, {0, 2}}).size() == 1);

  const Complex one = Complex::from_faces(4, 2, {{0, 1, 2}});
  const auto split = tight_components(one, {{0, 1}, {1, 3}});
  CHECK(split.size() == 2);

  // every realized top face meets at most one component
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Complex y = Complex::generate(8, 2, 0.4, seed);
    std::mt19937_64 rng(seed);
    std::vector<Face> s;
    for (std::int64_t r = 0; r < y.codim1_count(); ++r)
      if (rng() % 3 == 0) s.push_back(colex_unrank(r, 2));
    if (s.empty()) continue;
    const auto components = tight_components(y, s);
    for (std::int64_t i = 0; i < y.top_count(); ++i) {
      const Face top = y.top_face(i);
      int touched = 0;
      for (const auto& comp : components) {
        const bool meets = std::any_of(comp.begin(), comp.end(), [&](const Face& f) {
          return std::includes(top.begin(), top.end(), f.begin(), f.end());
        });
        touched += meets;
      }
      CHECK(touched <= 1);
    }
  }
}

TEST_CASE("weak Kruskal-Katona bound") {
  CHECK(kruskal_katona_bound(2, 6) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(kruskal_katona_bound(2, 3) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(kruskal_katona_bound(2, 10) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK_THROWS_AS(kruskal_katona_bound(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(kruskal_katona_bound(2, 0), std::invalid_argument);

  // random 10-edge graphs never beat the m=10 triangle bound
  std::mt19937_64 rng(11);
  double max_triangles = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 4);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    std::shuffle(edges.begin(), edges.end(), rng);
    if (edges.size() < 10) continue;
    edges.resize(10);
    std::set<std::pair<int, int>> set(edges.begin(), edges.end());
    int triangles = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c)
          triangles += set.count({a, b}) && set.count({a, c}) && set.count({b, c});
    max_triangles = std::max(max_triangles, static_cast<double>(triangles));
  }
  CHECK(max_triangles <= kruskal_katona_bound(2, 10) + 1e-9);
}

TEST_CASE("realized interior counts respect Kruskal-Katona") {
  const Complex y = Complex::generate(9, 2, 0.6, 12);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Face> s;
    for (std::int64_t r = 0; r < y.codim1_count(); ++r)
      if (rng() % 3 == 0) s.push_back(colex_unrank(r, 2));
    if (s.empty()) continue;
    const ShadowProfile prof = coface_profile(9, 2, s, &y);
    CHECK(static_cast<double>(prof.realized[2]) <=
          kruskal_katona_bound(2, prof.m) + 1e-9);
  }
}

TEST_CASE("conductance report json") {
  const ConductanceResult r = conductance_exact(two_triangles());
  const auto j = nlohmann::json::parse(conductance_report_json(r));
  CHECK(j["phi"].get<double>() == doctest::Approx(r.phi));
  CHECK(j["method"].get<std::string>() == "exact");
  CHECK(j["samples"].get<std::int64_t>() == r.samples);
  CHECK(j["argmin"].size() == r.argmin.size());
}
