#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "kc/errors.hpp"

namespace kc {

/// Probability tail bound queries, evaluated in log-space.
///   chernoff_lower : Pr(X <= a*mu) <= exp(-mu (a ln a - a + 1)),  0 < a <= 1
///   chernoff_upper : Pr(X >= b*mu) <= exp(-mu (b ln b - b + 1)),  b >= 1
///   binomial_upper : Pr(X >= k) <= (e n p / k)^k,                 1 <= k <= n
///   binomial_lower : Pr(X <= k) <= (e n p / (k q))^k e^{-np},     1 <= k <= np/q
struct TailBoundQuery {
  enum class Kind { chernoff_lower, chernoff_upper, binomial_upper, binomial_lower };
  Kind kind;
  double mu = 0.0;    // Chernoff mean
  double ratio = 0.0; // alpha or beta
  double n = 0.0;     // binomial trials
  double p = 0.0;     // binomial success probability
  double k = 0.0;     // binomial point

  static TailBoundQuery chernoff_lower(double mu, double alpha) {
    return {Kind::chernoff_lower, mu, alpha, 0, 0, 0};
  }
  static TailBoundQuery chernoff_upper(double mu, double beta) {
    return {Kind::chernoff_upper, mu, beta, 0, 0, 0};
  }
  static TailBoundQuery binomial_upper(double n, double p, double k) {
    return {Kind::binomial_upper, 0, 0, n, p, k};
  }
  static TailBoundQuery binomial_lower(double n, double p, double k) {
    return {Kind::binomial_lower, 0, 0, n, p, k};
  }
};

/// log of the bound (may be -inf); not clamped to log(1).
inline double log_tail_bound(const TailBoundQuery& q) {
  using Kind = TailBoundQuery::Kind;
  switch (q.kind) {
    case Kind::chernoff_lower: {
      if (!(q.mu >= 0)) throw parameter_error("tail bound: mu >= 0 required");
      if (!(q.ratio > 0.0 && q.ratio <= 1.0))
        throw parameter_error("tail bound: alpha in (0,1] required");
      double a = q.ratio;
      // a ln a -> 0 as a -> 0
      double alna = (a == 0.0) ? 0.0 : a * std::log(a);
      return -q.mu * (alna - a + 1.0);
    }
    case Kind::chernoff_upper: {
      if (!(q.mu >= 0)) throw parameter_error("tail bound: mu >= 0 required");
      if (!(q.ratio >= 1.0))
        throw parameter_error("tail bound: beta >= 1 required");
      double b = q.ratio;
      return -q.mu * (b * std::log(b) - b + 1.0);
    }
    case Kind::binomial_upper: {
      if (!(q.k >= 1.0 && q.k <= q.n))
        throw parameter_error("tail bound: 1 <= k <= n required");
      if (!(q.p >= 0.0 && q.p <= 1.0))
        throw parameter_error("tail bound: p in [0,1] required");
      if (q.p == 0.0) return -std::numeric_limits<double>::infinity();
      return q.k * (1.0 + std::log(q.n * q.p) - std::log(q.k));
    }
    case Kind::binomial_lower: {
      if (!(q.p >= 0.0 && q.p < 1.0))
        throw parameter_error("tail bound: p in [0,1) required");
      double np = q.n * q.p;
      double qq = 1.0 - q.p;
      if (!(q.k >= 1.0 && q.k <= np / qq))
        throw parameter_error("tail bound: 1 <= k <= np/q required");
      return q.k * (1.0 + std::log(np) - std::log(q.k * qq)) - np;
    }
  }
  throw parameter_error("tail bound: unknown kind");
}

/// min(1, exp(log bound)).
inline double tail_bound_eval(const TailBoundQuery& q) {
  double lg = log_tail_bound(q);
  if (lg >= 0.0) return 1.0;
  return std::exp(lg);
}

} // namespace kc
