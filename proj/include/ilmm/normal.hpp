#pragma once

namespace ilmm {

/// Standard normal CDF, accurate to better than 1e-15 absolute.
double norm_cdf(double x);

/// Standard normal density.
double norm_pdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
/// Valid for p in (0, 1).
double norm_inv(double p);

}  // namespace ilmm
