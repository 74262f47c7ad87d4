#include "lmexp/cheeger.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "lmexp/combinatorics.hpp"
#include "lmexp/parallel.hpp"

namespace lmexp {
namespace {

constexpr std::int64_t partition_cap = 10'000'000;

// vertex -> block index, after full validation of the partition shape
std::vector<int> block_assignment(const Complex& y, const Partition& p) {
  const int n = y.n();
  if (static_cast<int>(p.blocks.size()) != y.d() + 1)
    throw std::invalid_argument("partition needs exactly d+1 blocks");
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (p.blocks[b].empty()) throw std::invalid_argument("empty partition block");
    for (const int v : p.blocks[b]) {
      if (v < 0 || v >= n) throw std::invalid_argument("partition vertex out of range");
      if (owner[static_cast<std::size_t>(v)] != -1)
        throw std::invalid_argument("partition blocks overlap");
      owner[static_cast<std::size_t>(v)] = static_cast<int>(b);
    }
  }
  for (int v = 0; v < n; ++v)
    if (owner[static_cast<std::size_t>(v)] == -1)
      throw std::invalid_argument("partition misses a vertex");
  return owner;
}

std::vector<int> flatten_tops(const Complex& y) {
  const int arity = y.d() + 1;
  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(y.top_count()) * static_cast<std::size_t>(arity));
  for (std::int64_t i = 0; i < y.top_count(); ++i)
    for (const int v : y.top_face(i)) flat.push_back(v);
  return flat;
}

std::int64_t count_transversal(const std::vector<int>& flat, int arity,
                               const std::vector<int>& owner) {
  const std::uint32_t full = (1u << arity) - 1;
  std::int64_t crossing = 0;
  for (std::size_t base = 0; base < flat.size(); base += static_cast<std::size_t>(arity)) {
    std::uint32_t mask = 0;
    for (int i = 0; i < arity; ++i)
      mask |= 1u << owner[static_cast<std::size_t>(flat[base + static_cast<std::size_t>(i)])];
    crossing += mask == full;  // d+1 vertices hitting d+1 distinct blocks
  }
  return crossing;
}

// odometer over restricted-growth strings with values capped at `cap`
struct RgsWalker {
  std::vector<int> a;     // a[0] = 0 always
  std::vector<int> pmax;  // pmax[i] = max of a[0..i-1]
  int cap;

  RgsWalker(int n, int cap)
      : a(static_cast<std::size_t>(n), 0), pmax(static_cast<std::size_t>(n), 0), cap(cap) {}

  int current_max() const { return std::max(pmax.back(), a.back()); }

  bool advance() {
    const int n = static_cast<int>(a.size());
    for (int i = n - 1; i >= 1; --i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      if (a[ui] < std::min(pmax[ui] + 1, cap)) {
        ++a[ui];
        for (std::size_t j = ui + 1; j < a.size(); ++j) {
          a[j] = 0;
          pmax[j] = std::max(pmax[j - 1], a[j - 1]);
        }
        return true;
      }
    }
    return false;
  }
};

struct Candidate {
  std::int64_t crossing = 0;
  std::int64_t prod = 1;
  std::int64_t index = -1;  // position in the enumeration, -1 = none yet
  std::vector<int> rgs;

  bool valid() const { return index >= 0; }
};

// orders by score crossing/prod without division; ties go to the earlier
// (lexicographically smaller) string
bool better(const Candidate& lhs, const Candidate& rhs) {
  if (!rhs.valid()) return lhs.valid();
  if (!lhs.valid()) return false;
  const __int128 l = static_cast<__int128>(lhs.crossing) * rhs.prod;
  const __int128 r = static_cast<__int128>(rhs.crossing) * lhs.prod;
  if (l != r) return l < r;
  return lhs.index < rhs.index;
}

Partition partition_from_rgs(const std::vector<int>& rgs, int blocks) {
  Partition p;
  p.blocks.assign(static_cast<std::size_t>(blocks), {});
  for (std::size_t v = 0; v < rgs.size(); ++v)
    p.blocks[static_cast<std::size_t>(rgs[v])].push_back(static_cast<int>(v));
  return p;
}

}  // namespace

std::int64_t crossing_faces(const Complex& y, const Partition& p) {
  const std::vector<int> owner = block_assignment(y, p);
  return count_transversal(flatten_tops(y), y.d() + 1, owner);
}

double partition_score(const Complex& y, const Partition& p) {
  const std::int64_t crossing = crossing_faces(y, p);
  std::int64_t prod = 1;
  for (const auto& block : p.blocks) prod *= static_cast<std::int64_t>(block.size());
  return static_cast<double>(y.n()) * static_cast<double>(crossing) / static_cast<double>(prod);
}

CheegerResult cheeger_exact(const Complex& y) {
  const int n = y.n();
  const int d = y.d();
  const std::int64_t total = stirling_second(n, d + 1);
  if (total > partition_cap)
    throw instance_too_large("cheeger_exact: too many partitions", total);

  const std::vector<int> flat = flatten_tops(y);
  const int arity = d + 1;

  // every worker walks the cheap odometer from the start but scores only the
  // partitions whose enumeration index falls in its chunk
  std::vector<Candidate> best(static_cast<std::size_t>(worker_count()));
  for_each_chunk(total, [&](std::int64_t lo, std::int64_t hi, int worker) {
    RgsWalker walk(n, d);
    Candidate local;
    std::vector<int> counts(static_cast<std::size_t>(arity));
    std::int64_t index = -1;
    do {
      if (walk.current_max() != d) continue;
      ++index;
      if (index >= hi) break;
      if (index < lo) continue;
      std::fill(counts.begin(), counts.end(), 0);
      for (const int b : walk.a) ++counts[static_cast<std::size_t>(b)];
      std::int64_t prod = 1;
      for (const int c : counts) prod *= c;
      Candidate cand{count_transversal(flat, arity, walk.a), prod, index, {}};
      if (better(cand, local)) {
        cand.rgs = walk.a;
        local = std::move(cand);
      }
    } while (walk.advance());
    best[static_cast<std::size_t>(worker)] = std::move(local);
  });

  Candidate overall;
  for (const Candidate& c : best)
    if (better(c, overall)) overall = c;

  CheegerResult result;
  result.crossing = overall.crossing;
  result.witness = partition_from_rgs(overall.rgs, arity);
  result.value = static_cast<double>(n) * static_cast<double>(overall.crossing) /
                 static_cast<double>(overall.prod);
  return result;
}

std::pair<double, Partition> cheeger_from_min_codegree(const Complex& y) {
  const int n = y.n();
  const int d = y.d();
  std::int64_t argmin = 0;
  for (std::int64_t r = 1; r < y.codim1_count(); ++r)
    if (y.codegree_by_rank(r) < y.codegree_by_rank(argmin)) argmin = r;
  const Face sigma = colex_unrank(argmin, d);

  Partition p;
  p.blocks.assign(static_cast<std::size_t>(d) + 1, {});
  for (int i = 0; i < d; ++i) p.blocks[static_cast<std::size_t>(i)] = {sigma[static_cast<std::size_t>(i)]};
  for (int v = 0; v < n; ++v)
    if (!std::binary_search(sigma.begin(), sigma.end(), v))
      p.blocks[static_cast<std::size_t>(d)].push_back(v);

  const double bound = static_cast<double>(n) *
                       static_cast<double>(y.codegree_by_rank(argmin)) /
                       static_cast<double>(n - d);
  return {bound, std::move(p)};
}

std::string cheeger_result_json(const CheegerResult& r) {
  nlohmann::json j;
  j["h"] = r.value;
  j["witness"] = nlohmann::json::array();
  for (const auto& block : r.witness.blocks) j["witness"].push_back(block);
  j["crossing"] = r.crossing;
  return j.dump(2);
}

}  // namespace lmexp
