#pragma once

#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "kc/errors.hpp"

namespace kc {

using Bigint = boost::multiprecision::cpp_int;
using Bigfloat = boost::multiprecision::cpp_bin_float_100;

enum class Profile { paper, desk };

/// KeyChain parameters (n, t, ell) plus, when derived by
/// compute_parameters, the growth sequence a_1..a_{j0} and j0.
/// t and ell always fit machine integers (t = floor(ln n)); n and the
/// a_j may be astronomically large under the paper profile.
struct KeyChainParams {
  Bigint n = 0;
  long t = 0;
  long ell = 0;
  long j0 = 0;                // 0 when a_seq was not derived
  std::vector<Bigint> a_seq;  // empty for manually-specified params

  /// Throws parameter_error naming the first violated constraint.
  void validate() const {
    if (n < 3) throw parameter_error("params: n >= 3 violated");
    if (t < 0) throw parameter_error("params: t >= 0 violated");
    if (t > 0 && ell < 1) throw parameter_error("params: ell >= 1 violated");
    if (Bigint(t) * (ell + 1) > n)
      throw parameter_error("params: t*(ell+1) <= n violated");
    if (Bigint(t) * ell > n - t)
      throw parameter_error("params: t*ell <= n-t violated");
    if (n - t < 3)
      throw parameter_error("params: cycle length n-t >= 3 violated");
  }

  /// Checked narrowing for template construction and the pipeline.
  int n_int() const {
    if (n > std::numeric_limits<int>::max())
      throw capacity_error("params: n too large for concrete graph construction");
    return static_cast<int>(n);
  }
};

namespace detail {

constexpr unsigned kFracBits = 128;

/// floor(x * 2^128) of a positive Bigfloat, as a Bigint.
inline Bigint fixed_point(const Bigfloat& x) {
  Bigfloat scaled = x * boost::multiprecision::pow(Bigfloat(2), kFracBits);
  return Bigint(boost::multiprecision::floor(scaled).convert_to<Bigint>());
}

inline Bigfloat log_big(const Bigint& n) {
  return boost::multiprecision::log(Bigfloat(n));
}

} // namespace detail

/// floor(ln n) for a big integer.
inline long floor_log_big(const Bigint& n) {
  if (n < 1) throw parameter_error("floor_log_big: n >= 1 required");
  return detail::log_big(n).convert_to<long>(); // ln n < 2^63 for any input
}

struct ParamOptions {
  Profile profile = Profile::desk;
  /// Desk growth factor; 0 means the desk default max(ln n / 100, 2).
  /// Ignored under the paper profile (which uses g = ln n / 100).
  double growth = 0.0;
};

/// Derives (t, ell, a_seq) from n:
///   t = floor(ln n); a_1 = 1, a_{j+1} = ceil(a_j * g);
///   j0 = min j with a_j >= ceil(10 n / ln n); ell = 2*j0.
/// The growth factor is quantized to 128 fractional bits once, and the
/// recurrence then runs in exact integer arithmetic, so results are
/// reproducible for n at least up to 2^512.
inline KeyChainParams compute_parameters(const Bigint& n, const ParamOptions& opt) {
  if (n < 3) throw parameter_error("compute_parameters: n >= 3 required");

  const Bigfloat ln_n = detail::log_big(n);
  Bigfloat g;
  if (opt.profile == Profile::paper) {
    g = ln_n / 100;
  } else if (opt.growth > 0.0) {
    g = Bigfloat(opt.growth);
  } else {
    g = ln_n / 100;
    if (g < 2) g = 2;
  }

  const Bigint one_fixed = Bigint(1) << detail::kFracBits;
  const Bigint g_fixed = detail::fixed_point(g);
  if (g_fixed <= one_fixed)
    throw nonprogress_error(
        "compute_parameters: growth factor g <= 1, recurrence cannot progress "
        "(paper profile requires ln n > 100)");

  // threshold A = ceil(10 n / ln n), via the same fixed-point ln n
  const Bigint ln_fixed = detail::fixed_point(ln_n);
  const Bigint a_threshold = ((Bigint(10) * n << detail::kFracBits) + ln_fixed - 1) / ln_fixed;

  KeyChainParams p;
  p.n = n;
  p.t = floor_log_big(n);

  Bigint a = 1;
  p.a_seq.push_back(a);
  long j = 1;
  while (a < a_threshold) {
    a = (a * g_fixed + one_fixed - 1) >> detail::kFracBits; // ceil(a*g)
    p.a_seq.push_back(a);
    ++j;
    if (j > 1000000)
      throw nonprogress_error("compute_parameters: recurrence exceeded 10^6 steps");
  }
  p.j0 = j;
  p.ell = 2 * j;

  if (Bigint(p.t) * (p.ell + 1) > n)
    throw infeasible_error("compute_parameters: derived t*(ell+1) exceeds n");
  if (Bigint(p.t) * (p.ell + 1) * 2 > n)
    throw infeasible_error(
        "compute_parameters: derived t*(ell+1) exceeds n/2; the embedding "
        "pipeline reserves half the vertices for chain closure");
  return p;
}

/// Layer growth targets a_1..a_{ell/2} for an explicitly chosen ell
/// (used when the pipeline runs with user-supplied (t, ell)).
inline std::vector<Bigint> growth_targets(double g, long half_ell) {
  if (g <= 1.0) throw nonprogress_error("growth_targets: g must exceed 1");
  const Bigint one_fixed = Bigint(1) << detail::kFracBits;
  const Bigint g_fixed = detail::fixed_point(Bigfloat(g));
  std::vector<Bigint> seq{1};
  Bigint a = 1;
  for (long j = 2; j <= half_ell; ++j) {
    a = (a * g_fixed + one_fixed - 1) >> detail::kFracBits;
    seq.push_back(a);
  }
  return seq;
}

} // namespace kc
