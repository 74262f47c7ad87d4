#include "lmexp/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "lmexp/combinatorics.hpp"
#include "lmexp/parallel.hpp"

namespace lmexp {
namespace {

std::vector<std::int64_t> positive_support(const Complex& y) {
  std::vector<std::int64_t> support;
  for (std::int64_t r = 0; r < y.codim1_count(); ++r)
    if (y.codegree_by_rank(r) > 0) support.push_back(r);
  return support;
}

// support-indexed adjacency; walk neighbors always have positive co-degree
struct SupportGraph {
  std::vector<std::int64_t> support;  // ascending colex ranks
  std::vector<std::int64_t> offset;   // CSR into adj
  std::vector<std::int32_t> adj;      // support indices
  std::vector<std::int64_t> deg;      // co-degrees aligned with support

  std::int64_t index_of(std::int64_t rank) const {
    const auto it = std::lower_bound(support.begin(), support.end(), rank);
    if (it == support.end() || *it != rank) return -1;
    return it - support.begin();
  }
};

SupportGraph build_support_graph(const Complex& y) {
  SupportGraph g;
  g.support = positive_support(y);
  const std::size_t s = g.support.size();
  g.deg.resize(s);
  g.offset.assign(s + 1, 0);
  std::vector<std::vector<std::int32_t>> lists(s);
  for (std::size_t i = 0; i < s; ++i) {
    g.deg[i] = y.codegree_by_rank(g.support[i]);
    for (const Face& nb : y.neighbors(colex_unrank(g.support[i], y.d())))
      lists[i].push_back(static_cast<std::int32_t>(g.index_of(colex_rank(nb))));
    g.offset[i + 1] = g.offset[i] + static_cast<std::int64_t>(lists[i].size());
  }
  g.adj.reserve(static_cast<std::size_t>(g.offset[s]));
  for (const auto& list : lists) g.adj.insert(g.adj.end(), list.begin(), list.end());
  return g;
}

void require_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in [0, 1)");
}

// validated sorted ranks of a duplicate-free set of (d-1)-faces
std::vector<std::int64_t> ranks_of_set(const Complex& y, const std::vector<Face>& s,
                                       bool require_support) {
  std::vector<std::int64_t> ranks;
  ranks.reserve(s.size());
  for (const Face& f : s) {
    const Face face = make_face(f, y.n());
    if (static_cast<int>(face.size()) != y.d())
      throw std::invalid_argument("set members must be (d-1)-faces");
    const std::int64_t r = colex_rank(face);
    if (require_support && y.codegree_by_rank(r) == 0)
      throw std::invalid_argument("face outside the positive-co-degree support");
    ranks.push_back(r);
  }
  std::sort(ranks.begin(), ranks.end());
  if (std::adjacent_find(ranks.begin(), ranks.end()) != ranks.end())
    throw std::invalid_argument("duplicate face in set");
  return ranks;
}

std::int64_t cut_size(const Complex& y, const std::vector<std::int64_t>& ranks) {
  std::int64_t cut = 0;
  for (const std::int64_t r : ranks)
    for (const Face& nb : y.neighbors(colex_unrank(r, y.d())))
      if (!std::binary_search(ranks.begin(), ranks.end(), colex_rank(nb))) ++cut;
  return cut;
}

std::int64_t degree_sum(const Complex& y, const std::vector<std::int64_t>& ranks) {
  std::int64_t total = 0;
  for (const std::int64_t r : ranks) total += y.codegree_by_rank(r);
  return total;
}

// realized cofaces of S keyed by top rank, value = |boundary of top within S|
std::unordered_map<std::int64_t, int> realized_cofaces(const Complex& y,
                                                       const std::vector<std::int64_t>& ranks) {
  std::unordered_map<std::int64_t, int> census;
  for (const std::int64_t r : ranks) {
    const Face sigma = colex_unrank(r, y.d());
    for (const int w : y.coface_vertices(r)) {
      Face rho = sigma;
      rho.insert(std::upper_bound(rho.begin(), rho.end(), w), w);
      ++census[colex_rank(rho)];
    }
  }
  return census;
}

double realized_exit_ratio(const Complex& y, const std::vector<std::int64_t>& ranks) {
  const auto census = realized_cofaces(y, ranks);
  std::int64_t interior = 0;
  for (const auto& [rank, in_s] : census) interior += in_s == y.d() + 1;
  return static_cast<double>(static_cast<std::int64_t>(census.size()) - interior) /
         static_cast<double>(census.size());
}

std::vector<Face> faces_of_mask(const SupportGraph& g, std::uint32_t mask, int d) {
  std::vector<Face> faces;
  for (int i = 0; i < static_cast<int>(g.support.size()); ++i)
    if (mask >> i & 1) faces.push_back(colex_unrank(g.support[static_cast<std::size_t>(i)], d));
  return faces;
}

}  // namespace

std::int64_t WalkKernel::index_of(std::int64_t rank) const {
  const auto it = std::lower_bound(support.begin(), support.end(), rank);
  if (it == support.end() || *it != rank) return -1;
  return it - support.begin();
}

WalkKernel transition_kernel(const Complex& y, double gamma) {
  require_gamma(gamma);
  const SupportGraph g = build_support_graph(y);
  if (g.support.empty()) throw std::domain_error("no faces with positive co-degree");
  WalkKernel kernel;
  kernel.gamma = gamma;
  kernel.support = g.support;
  const std::int64_t s = static_cast<std::int64_t>(g.support.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(g.offset.back()) + static_cast<std::size_t>(s));
  for (std::int64_t i = 0; i < s; ++i) {
    const double move =
        (1.0 - gamma) / (static_cast<double>(y.d()) * static_cast<double>(g.deg[static_cast<std::size_t>(i)]));
    for (std::int64_t e = g.offset[static_cast<std::size_t>(i)]; e < g.offset[static_cast<std::size_t>(i) + 1]; ++e)
      trip.emplace_back(i, g.adj[static_cast<std::size_t>(e)], move);
    if (gamma > 0) trip.emplace_back(i, i, gamma);
  }
  kernel.transition.resize(s, s);
  kernel.transition.setFromTriplets(trip.begin(), trip.end());
  return kernel;
}

StationaryDist stationary(const Complex& y) {
  if (y.top_count() == 0) throw std::domain_error("stationary distribution needs top faces");
  const double denom = static_cast<double>(y.d() + 1) * static_cast<double>(y.top_count());
  StationaryDist dist;
  dist.pi.resize(y.codim1_count());
  for (std::int64_t r = 0; r < y.codim1_count(); ++r)
    dist.pi(r) = static_cast<double>(y.codegree_by_rank(r)) / denom;
  return dist;
}

TrajectoryStats simulate(const Complex& y, double gamma, const Face& start,
                         std::int64_t steps, std::uint64_t seed) {
  require_gamma(gamma);
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  const Face s0 = make_face(start, y.n());
  if (static_cast<int>(s0.size()) != y.d())
    throw std::invalid_argument("start must be a (d-1)-face");
  const SupportGraph g = build_support_graph(y);
  std::int64_t cur = g.index_of(colex_rank(s0));
  if (cur < 0) throw std::invalid_argument("start face has co-degree 0");

  TrajectoryStats out;
  out.support = g.support;
  out.visits.assign(g.support.size(), 0);
  ++out.visits[static_cast<std::size_t>(cur)];

  const double denom = static_cast<double>(y.d() + 1) * static_cast<double>(y.top_count());
  const auto tv_to_pi = [&](std::int64_t samples) {
    double acc = 0;
    for (std::size_t i = 0; i < g.support.size(); ++i)
      acc += std::abs(static_cast<double>(out.visits[i]) / static_cast<double>(samples) -
                      static_cast<double>(g.deg[i]) / denom);
    return acc / 2;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::int64_t next_checkpoint = 1;
  for (std::int64_t t = 1; t <= steps; ++t) {
    if (!(gamma > 0.0) || unif(rng) >= gamma) {
      const std::int64_t lo = g.offset[static_cast<std::size_t>(cur)];
      const std::int64_t count = g.offset[static_cast<std::size_t>(cur) + 1] - lo;
      std::uniform_int_distribution<std::int64_t> pick(0, count - 1);
      cur = g.adj[static_cast<std::size_t>(lo + pick(rng))];
    }
    ++out.visits[static_cast<std::size_t>(cur)];
    if (t == next_checkpoint || t == steps) {
      out.tv_checkpoints.emplace_back(t, tv_to_pi(t + 1));
      while (next_checkpoint <= t) next_checkpoint *= 2;
    }
  }
  if (steps == 0) out.tv_checkpoints.emplace_back(0, tv_to_pi(1));
  return out;
}

double flow_Q(const Complex& y, const std::vector<Face>& s) {
  const auto ranks = ranks_of_set(y, s, true);
  if (ranks.empty() || y.top_count() == 0) return 0.0;
  const double denom = static_cast<double>(y.d()) * static_cast<double>(y.d() + 1) *
                       static_cast<double>(y.top_count());
  return static_cast<double>(cut_size(y, ranks)) / denom;
}

double phi_set(const Complex& y, const std::vector<Face>& s) {
  const auto ranks = ranks_of_set(y, s, true);
  if (y.top_count() == 0) throw std::domain_error("phi needs top faces");
  const std::int64_t total = (y.d() + 1) * y.top_count();
  const std::int64_t deg_s = degree_sum(y, ranks);
  if (deg_s == 0 || deg_s == total)
    throw std::domain_error("phi needs 0 < pi(S) < 1");
  const double pi_s = static_cast<double>(deg_s) / static_cast<double>(total);
  const double q = static_cast<double>(cut_size(y, ranks)) /
                   (static_cast<double>(y.d()) * static_cast<double>(y.d() + 1) *
                    static_cast<double>(y.top_count()));
  return q / (pi_s * (1.0 - pi_s));
}

ConductanceResult conductance_exact(const Complex& y) {
  const SupportGraph g = build_support_graph(y);
  const int s = static_cast<int>(g.support.size());
  if (s == 0) throw std::domain_error("no faces with positive co-degree");
  if (s > 25) throw instance_too_large("conductance_exact: support too large", s);
  const std::int64_t T = (y.d() + 1) * y.top_count();

  struct Candidate {
    std::int64_t cut = 0;
    std::int64_t deg = 0;
    std::uint32_t mask = 0;
    bool valid = false;
  };
  const auto indices_of = [s](std::uint32_t mask) {
    std::vector<int> idx;
    for (int i = 0; i < s; ++i)
      if (mask >> i & 1) idx.push_back(i);
    return idx;
  };
  // phi order without division; ties go to the lexicographically smallest
  // ascending index set so the argmin is reproducible
  const auto better = [&](const Candidate& a, const Candidate& b) {
    if (!b.valid) return a.valid;
    if (!a.valid) return false;
    const __int128 l = static_cast<__int128>(a.cut) * b.deg * (T - b.deg);
    const __int128 r = static_cast<__int128>(b.cut) * a.deg * (T - a.deg);
    if (l != r) return l < r;
    if (a.mask == b.mask) return false;
    const std::vector<int> ia = indices_of(a.mask), ib = indices_of(b.mask);
    return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
  };

  const std::int64_t total = std::int64_t{1} << s;
  std::vector<Candidate> best(static_cast<std::size_t>(worker_count()));
  std::vector<std::int64_t> admissible(static_cast<std::size_t>(worker_count()), 0);
  for_each_chunk(total - 1, [&](std::int64_t lo, std::int64_t hi, int worker) {
    // Gray-code walk over sequence positions [lo+1, hi+1): one bit flips per step
    std::uint32_t mask = static_cast<std::uint32_t>((lo + 1) ^ ((lo + 1) >> 1));
    std::int64_t cut = 0, deg_s = 0;
    for (int i = 0; i < s; ++i) {
      if (!(mask >> i & 1)) continue;
      deg_s += g.deg[static_cast<std::size_t>(i)];
      for (std::int64_t e = g.offset[static_cast<std::size_t>(i)]; e < g.offset[static_cast<std::size_t>(i) + 1]; ++e)
        cut += !(mask >> g.adj[static_cast<std::size_t>(e)] & 1);
    }
    Candidate local;
    for (std::int64_t gg = lo + 1;;) {
      if (deg_s > 0 && 2 * deg_s <= T) {
        ++admissible[static_cast<std::size_t>(worker)];
        const Candidate cand{cut, deg_s, mask, true};
        if (better(cand, local)) local = cand;
      }
      ++gg;
      if (gg >= hi + 1) break;
      const int bit = __builtin_ctzll(static_cast<unsigned long long>(gg));
      const bool adding = !(mask >> bit & 1);
      mask ^= 1u << bit;
      deg_s += adding ? g.deg[static_cast<std::size_t>(bit)] : -g.deg[static_cast<std::size_t>(bit)];
      for (std::int64_t e = g.offset[static_cast<std::size_t>(bit)]; e < g.offset[static_cast<std::size_t>(bit) + 1]; ++e) {
        const bool inside = mask >> g.adj[static_cast<std::size_t>(e)] & 1;
        cut += (inside == adding) ? -1 : 1;
      }
    }
    best[static_cast<std::size_t>(worker)] = local;
  });

  Candidate overall;
  std::int64_t samples = 0;
  for (std::size_t w = 0; w < best.size(); ++w) {
    if (better(best[w], overall)) overall = best[w];
    samples += admissible[w];
  }
  if (!overall.valid) throw std::logic_error("no admissible subset");

  ConductanceResult result;
  result.method = "exact";
  result.samples = samples;
  result.argmin = faces_of_mask(g, overall.mask, y.d());
  const double q = static_cast<double>(overall.cut) /
                   (static_cast<double>(y.d()) * static_cast<double>(T));
  const double pi_s = static_cast<double>(overall.deg) / static_cast<double>(T);
  result.phi = q / (pi_s * (1.0 - pi_s));
  return result;
}

ConductanceResult conductance_estimate(const Complex& y, std::int64_t trials,
                                       std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const SupportGraph g = build_support_graph(y);
  const std::int64_t s = static_cast<std::int64_t>(g.support.size());
  if (s == 0) throw std::domain_error("no faces with positive co-degree");
  const std::int64_t T = (y.d() + 1) * y.top_count();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> pick_start(0, s - 1);
  std::geometric_distribution<std::int64_t> size_tail(0.125);

  double best_ratio = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> best_ranks;
  std::int64_t valid = 0;
  std::vector<char> in_set(static_cast<std::size_t>(s));
  std::vector<char> in_frontier(static_cast<std::size_t>(s));
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const std::int64_t target = 1 + size_tail(rng);
    std::fill(in_set.begin(), in_set.end(), 0);
    std::fill(in_frontier.begin(), in_frontier.end(), 0);
    std::vector<std::int32_t> members, frontier;
    std::int64_t deg_s = 0;

    const auto absorb = [&](std::int32_t idx) {
      in_set[static_cast<std::size_t>(idx)] = 1;
      members.push_back(idx);
      deg_s += g.deg[static_cast<std::size_t>(idx)];
      for (std::int64_t e = g.offset[static_cast<std::size_t>(idx)]; e < g.offset[static_cast<std::size_t>(idx) + 1]; ++e) {
        const std::int32_t nb = g.adj[static_cast<std::size_t>(e)];
        if (!in_set[static_cast<std::size_t>(nb)] && !in_frontier[static_cast<std::size_t>(nb)]) {
          in_frontier[static_cast<std::size_t>(nb)] = 1;
          frontier.push_back(nb);
        }
      }
    };

    const std::int32_t start = static_cast<std::int32_t>(pick_start(rng));
    if (2 * g.deg[static_cast<std::size_t>(start)] > T) continue;  // singleton already too heavy
    absorb(start);
    while (static_cast<std::int64_t>(members.size()) < target && !frontier.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
      const std::size_t at = pick(rng);
      const std::int32_t next = frontier[at];
      if (2 * (deg_s + g.deg[static_cast<std::size_t>(next)]) > T) break;
      frontier[at] = frontier.back();
      frontier.pop_back();
      in_frontier[static_cast<std::size_t>(next)] = 0;
      absorb(next);
    }

    std::vector<std::int64_t> ranks;
    ranks.reserve(members.size());
    for (const std::int32_t i : members) ranks.push_back(g.support[static_cast<std::size_t>(i)]);
    std::sort(ranks.begin(), ranks.end());
    const double ratio = realized_exit_ratio(y, ranks);
    ++valid;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_ranks = ranks;
    }
  }
  if (valid == 0) throw std::domain_error("no admissible set sampled");

  ConductanceResult result;
  result.method = "estimate";
  result.samples = valid;
  result.raw_ratio = best_ratio;
  result.phi = best_ratio / (static_cast<double>(y.d()) * static_cast<double>(y.d() + 1));
  for (const std::int64_t r : best_ranks) result.argmin.push_back(colex_unrank(r, y.d()));
  return result;
}

ShadowProfile coface_profile(int n, int d, const std::vector<Face>& s, const Complex* y) {
  if (s.empty()) throw std::invalid_argument("coface profile needs a non-empty set");
  if (y != nullptr && (y->n() != n || y->d() != d))
    throw std::invalid_argument("ambient complex dimensions mismatch");
  std::vector<std::int64_t> ranks;
  for (const Face& f : s) {
    const Face face = make_face(f, n);
    if (static_cast<int>(face.size()) != d)
      throw std::invalid_argument("set members must be d-subsets");
    ranks.push_back(colex_rank(face));
  }
  std::sort(ranks.begin(), ranks.end());
  if (std::adjacent_find(ranks.begin(), ranks.end()) != ranks.end())
    throw std::invalid_argument("duplicate face in set");

  // census over potential cofaces: value = |boundary within S|
  std::unordered_map<std::int64_t, int> census;
  for (const std::int64_t r : ranks) {
    const Face sigma = colex_unrank(r, d);
    for (int w = 0; w < n; ++w) {
      if (std::binary_search(sigma.begin(), sigma.end(), w)) continue;
      Face rho = sigma;
      rho.insert(std::upper_bound(rho.begin(), rho.end(), w), w);
      ++census[colex_rank(rho)];
    }
  }

  ShadowProfile profile;
  profile.m = static_cast<std::int64_t>(ranks.size());
  profile.f.assign(static_cast<std::size_t>(d) + 1, 0);
  profile.realized.assign(static_cast<std::size_t>(d) + 1, 0);
  for (const auto& [rank, hits] : census) {
    ++profile.f[static_cast<std::size_t>(hits - 1)];
    if (y != nullptr && y->has_top_rank(rank)) ++profile.realized[static_cast<std::size_t>(hits - 1)];
  }
  profile.B_count = profile.f[static_cast<std::size_t>(d)];

  std::int64_t weighted = 0;
  for (int i = 1; i <= d + 1; ++i) weighted += i * profile.f[static_cast<std::size_t>(i - 1)];
  if (weighted != profile.m * (n - d))
    throw std::logic_error("coface census double count failed");
  return profile;
}

std::vector<std::vector<Face>> tight_components(const Complex& y, const std::vector<Face>& s) {
  const auto ranks = ranks_of_set(y, s, false);
  const std::size_t m = ranks.size();
  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  const auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  std::vector<Face> faces;
  faces.reserve(m);
  for (const std::int64_t r : ranks) faces.push_back(colex_unrank(r, y.d()));
  Face merged;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      merged.clear();
      std::set_union(faces[i].begin(), faces[i].end(), faces[j].begin(), faces[j].end(),
                     std::back_inserter(merged));
      if (static_cast<int>(merged.size()) == y.d() + 1 && y.has_top(merged))
        parent[find(i)] = find(j);
    }

  std::vector<std::vector<Face>> components;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < m; ++i) {  // ranks ascend, so members stay sorted
    const std::size_t root = find(i);
    const auto it = slot.find(root);
    if (it == slot.end()) {
      slot.emplace(root, components.size());
      components.push_back({faces[i]});
    } else {
      components[it->second].push_back(faces[i]);
    }
  }
  return components;
}

double kruskal_katona_bound(int r, std::int64_t m) {
  if (r < 1 || m < 1) throw std::invalid_argument("need r >= 1 and m >= 1");
  const auto gen_binom = [](double x, int k) {
    double value = 1;
    for (int i = 0; i < k; ++i) value *= (x - static_cast<double>(i)) / static_cast<double>(k - i);
    return value;
  };
  double lo = static_cast<double>(r), hi = static_cast<double>(r) + 1.0;
  while (gen_binom(hi, r) < static_cast<double>(m)) hi *= 2;
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (gen_binom(mid, r) < static_cast<double>(m) ? lo : hi) = mid;
  }
  return gen_binom(0.5 * (lo + hi), r + 1);
}

std::string conductance_report_json(const ConductanceResult& r) {
  nlohmann::json j;
  j["phi"] = r.phi;
  j["argmin"] = nlohmann::json::array();
  for (const Face& f : r.argmin) j["argmin"].push_back(f);
  j["method"] = r.method;
  j["samples"] = r.samples;
  return j.dump(2);
}

}  // namespace lmexp
