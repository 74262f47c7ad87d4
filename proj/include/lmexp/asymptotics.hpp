#pragma once

#include <cstdint>
#include <string>

namespace lmexp {

/// Concentration forecast for the minimum co-degree of Y(n, p; d) at
/// p = (1+eps) d log(n) / n: center (1+eps) a d log n with halfwidth
/// C sqrt(log n), plus the large-eps comparison value (D - sqrt(2D)) log n
/// for D = (1+eps) d.
struct Prediction {
  int n = 0;
  int d = 0;
  double eps = 0;
  double a = 0;
  double center = 0;
  double band_halfwidth = 0;
  double large_eps_center = 0;
};

/// Real branches of w e^w = x. Branch 0 lives on [-1/e, inf) with w >= -1;
/// branch -1 lives on [-1/e, 0) with w <= -1. Residual stays within
/// 1e-13 * max(1, |x|).
double lambert_w(int branch, double x);

/// a(eps) = exp(1 + W_{-1}(-eps / (e (1+eps)))): the root in (0, 1) of
/// (1+eps)(1 - log a) a = eps. Requires eps > 0.
double a_eps(double eps);

/// H(c) = c - c log c - 1 for c > 0.
double entropy_H(double c);

/// P[Bin(N, p) <= floor(c N p)] by exact log-space summation.
double binomial_lower_tail(std::int64_t N, double p, double c);

enum class TailSide { upper, lower };

/// exp(-eps^2 N p / 3) bounding the upper tail beyond (1+eps) N p, or
/// exp(-eps^2 N p / 2) bounding the lower tail below (1-eps) N p.
double chernoff_bound(std::int64_t N, double p, double eps, TailSide side);

/// Assembles the Prediction for given parameters; the band constant
/// defaults to 3 and is reported, not derived.
Prediction predict(int n, int d, double eps, double band_constant = 3.0);

/// {"n":..., "d":..., "eps":..., "a":..., "center":..., "band":...}
std::string prediction_json(const Prediction& p);

}  // namespace lmexp
