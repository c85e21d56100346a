#pragma once

namespace tibs {

// Standard normal CDF, evaluated through erfc for tail accuracy.
double normal_cdf(double x);

// Standard normal quantile. Peter Acklam's rational approximation polished
// with one Halley step against normal_cdf; absolute error is well below 1e-9
// over (0,1). Throws std::domain_error outside (0,1).
double inverse_normal_cdf(double p);

}  // namespace tibs
