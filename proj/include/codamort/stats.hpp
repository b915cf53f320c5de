#pragma once

#include <vector>

namespace codamort {

/// Quantile of a sorted sample by linear interpolation of order statistics
/// (the type-7 convention: h = (n-1)p, interpolate between floor(h) and
/// floor(h)+1). The sample must be sorted ascending and non-empty.
double quantile_type7_sorted(const std::vector<double>& sorted, double p);

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// refined by one Halley step; |error| < 1e-13 over (0,1)).
double normal_quantile(double p);

double sample_mean(const std::vector<double>& v);

/// Unbiased sample variance (denominator n-1); 0 for n < 2.
double sample_variance(const std::vector<double>& v);

} // namespace codamort
