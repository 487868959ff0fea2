#pragma once

namespace pilotwave {

/// Standard normal cumulative distribution F(x).
[[nodiscard]] double normal_cdf(double x);

/// Standard normal density.
[[nodiscard]] double normal_pdf(double x);

/// F^-1(p) for p in (0, 1).  Rational approximation (Acklam) followed by one
/// Halley refinement on the complementary error function; absolute error is
/// below 1e-12 over the whole open interval.  Throws std::domain_error outside.
[[nodiscard]] double normal_quantile(double p);

}  // namespace pilotwave
