#pragma once

// Standard normal distribution functions used by the samplers and oracles.
//
// normal_cdf / normal_sf go through std::erfc, which glibc evaluates to
// within a couple of ulps, so both are accurate to well below 1e-15 absolute.
// normal_quantile is Wichura's AS241 (PPND16), relative error ~1e-16 over
// (0, 1); tests/test_special_functions.cpp checks it against Boost's
// erfc_inv to 1e-12 absolute.

namespace catbbm {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Phi(x).
double normal_cdf(double x);

/// 1 - Phi(x), computed without cancellation for large x.
double normal_sf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Phi^{-1}(p) for p in (0, 1). Returns -inf / +inf at 0 / 1, NaN outside.
double normal_quantile(double p);

/// e^{x^2/2} * (1 - Phi(x)) for x >= 0, stable for arbitrarily large x.
double scaled_normal_sf(double x);

}  // namespace catbbm
