#include "lmexp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace lmexp {
namespace {

constexpr double branch_point = -0.36787944117144233;  // -1/e

// Halley steps for f(w) = w e^w - x from a caller-chosen start
double halley(double w, double x) {
  for (int iter = 0; iter < 50; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(x))) break;
    const double fp = ew * (1.0 + w);
    const double fpp = ew * (2.0 + w);
    const double denom = fp - 0.5 * f * fpp / fp;
    if (denom == 0.0 || !std::isfinite(denom)) break;
    w -= f / denom;
  }
  return w;
}

// series around the branch point w = -1, accurate for small |x + 1/e|
double branch_series(int branch, double x) {
  const double s = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
  const double sign = branch == 0 ? 1.0 : -1.0;
  const double t = sign * s;
  return -1.0 + t - t * t / 3.0 + 11.0 * t * t * t / 72.0;
}

}  // namespace

double lambert_w(int branch, double x) {
  if (branch != 0 && branch != -1) throw std::invalid_argument("branch must be 0 or -1");
  if (x < branch_point) {
    if (x > branch_point - 1e-15) {
      x = branch_point;  // absorb one-ulp rounding from callers
    } else {
      throw std::domain_error("x below -1/e has no real Lambert-W value");
    }
  }
  if (branch == -1 && x >= 0) throw std::domain_error("branch -1 needs x in [-1/e, 0)");

  if (branch == 0 && x == 0) return 0;
  if (x - branch_point < 1e-6) {
    const double w = branch_series(branch, x);
    // Halley is ill-conditioned at the fold; the series is already closer
    // than the residual target there
    return x - branch_point < 1e-12 ? w : halley(w, x);
  }

  // try branch-appropriate starts until the residual target holds; the
  // quadratic guess for branch 0 only converges near the origin
  std::vector<double> starts;
  if (branch == 0) {
    if (x < 0.5) starts.push_back(x * (1.0 - x));
    if (x > 0) starts.push_back(std::log1p(x));
    if (x > std::exp(1.0)) starts.push_back(std::log(x) - std::log(std::log(x)));
    starts.push_back(0.0);
  } else {
    const double l1 = std::log(-x);
    starts.push_back(l1 - std::log(-l1));
    starts.push_back(branch_series(-1, x));
  }
  double best = starts.front();
  double best_residual = std::numeric_limits<double>::infinity();
  for (const double start : starts) {
    const double w = halley(start, x);
    const double residual = std::abs(w * std::exp(w) - x);
    const bool right_branch = branch == 0 ? w >= -1.0 - 1e-9 : w <= -1.0 + 1e-9;
    if (right_branch && residual < best_residual) {
      best_residual = residual;
      best = w;
    }
    if (best_residual <= 1e-14 * std::max(1.0, std::abs(x))) break;
  }
  return best;
}

double a_eps(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const double x = -eps / (std::exp(1.0) * (1.0 + eps));
  return std::exp(1.0 + lambert_w(-1, x));
}

double entropy_H(double c) {
  if (!(c > 0)) throw std::invalid_argument("H(c) needs c > 0");
  return c - c * std::log(c) - 1.0;
}

double binomial_lower_tail(std::int64_t N, double p, double c) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie in (0, 1)");
  if (!(c >= 0)) throw std::invalid_argument("c must be non-negative");
  const std::int64_t cap =
      std::min<std::int64_t>(N, static_cast<std::int64_t>(std::floor(c * static_cast<double>(N) * p)));
  if (cap >= N) return 1.0;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n1 = std::lgamma(static_cast<double>(N) + 1.0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(cap) + 1);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i <= cap; ++i) {
    const double di = static_cast<double>(i);
    const double term = log_n1 - std::lgamma(di + 1.0) -
                        std::lgamma(static_cast<double>(N - i) + 1.0) + di * log_p +
                        (static_cast<double>(N) - di) * log_q;
    terms.push_back(term);
    peak = std::max(peak, term);
  }
  double acc = 0;
  for (const double term : terms) acc += std::exp(term - peak);
  return std::exp(peak + std::log(acc));
}

double chernoff_bound(std::int64_t N, double p, double eps, TailSide side) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const double exponent = eps * eps * static_cast<double>(N) * p;
  return std::exp(side == TailSide::upper ? -exponent / 3.0 : -exponent / 2.0);
}

Prediction predict(int n, int d, double eps, double band_constant) {
  if (d < 1 || n <= d) throw std::invalid_argument("need n > d >= 1");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (!(band_constant > 0)) throw std::invalid_argument("band constant must be positive");
  Prediction out;
  out.n = n;
  out.d = d;
  out.eps = eps;
  out.a = a_eps(eps);
  const double log_n = std::log(static_cast<double>(n));
  out.center = (1.0 + eps) * out.a * static_cast<double>(d) * log_n;
  out.band_halfwidth = band_constant * std::sqrt(log_n);
  const double big_d = (1.0 + eps) * static_cast<double>(d);
  out.large_eps_center = (big_d - std::sqrt(2.0 * big_d)) * log_n;
  return out;
}

std::string prediction_json(const Prediction& p) {
  nlohmann::json j;
  j["n"] = p.n;
  j["d"] = p.d;
  j["eps"] = p.eps;
  j["a"] = p.a;
  j["center"] = p.center;
  j["band"] = p.band_halfwidth;
  return j.dump(2);
}

}  // namespace lmexp
