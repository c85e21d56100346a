#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "tibs/error_spec.hpp"

namespace tibs {

// Which closed-form sample bound backs a plan. All three guarantee the mixed
// error criterion; they trade tightness for formula simplicity:
//   exact      -- the relative-entropy form, the smallest of the three
//   simplified -- exact's denominator relaxed to alpha*((1+beta)ln(1+beta)-beta)
//   loose      -- simplified with the beta-dependent factor replaced by its
//                 supremum over beta in (0,1); requires beta < 1
enum class BoundVariant { exact, simplified, loose };

const char* to_string(BoundVariant variant) noexcept;
std::optional<BoundVariant> bound_variant_from(std::string_view name) noexcept;

// Bernoulli relative entropy (Kullback-Leibler divergence)
//   H(u, v) = u ln(u/v) + (1-u) ln((1-u)/(1-v)),  u, v in (0,1).
// Nonnegative, zero iff u == v. Governs the exact bound:
//   bound_exact(spec) == ln(2/delta) / H(alpha/beta + alpha, alpha/beta).
double relative_entropy(double u, double v);

double bound_exact(const ErrorSpec& spec);
double bound_simplified(const ErrorSpec& spec);
double bound_loose(const ErrorSpec& spec);
double bound_for(const ErrorSpec& spec, BoundVariant variant);

// Smallest integer strictly greater than x (floor(x)+1, also when x is an
// integer). Throws std::overflow_error past the 64-bit range.
std::int64_t strictly_above(double x);

// Minimal n with n > ln(2/delta) / (2 alpha^2): the classical fixed-size
// sample bound for the absolute criterion. Computed in extended precision so
// 15-digit results are exact.
std::int64_t chernoff_hoeffding_n(double alpha, double delta);

// Central-limit-theorem suggestion round(Z^2 / (4 alpha^2)) with Z the upper
// delta/2 standard-normal quantile. Approximate, not a guarantee.
std::int64_t clt_approx_n(double alpha, double delta);

// Success-count threshold of pure inverse binomial sampling for the relative
// criterion: (1+beta) ln(2/delta) / ((1+beta)ln(1+beta) - beta). Equals the
// alpha -> 0 limit of a plan's width.
double inverse_binomial_threshold(double beta, double delta);

// Sampling budget derived from an ErrorSpec: the real-valued box (length L,
// width W) and the integer exit thresholds realizing the strict inequalities
// "n > L" and "successes > W" once, up front:
//   n_max       = floor(length) + 1   (first n with n > length)
//   k_threshold = floor(width)  + 1   (first count strictly above width)
struct Plan {
  std::optional<ErrorSpec> spec;  // absent for synthesized geometries
  BoundVariant variant = BoundVariant::simplified;
  double a_bound = 0.0;  // planning bound A for the chosen variant
  double b_bound = 0.0;  // B = (alpha/beta + alpha) * A
  double length = 0.0;   // L >= A for the guarantee to hold
  double width = 0.0;    // W >= B for the guarantee to hold
  std::int64_t n_max = 0;
  std::int64_t k_threshold = 0;
};

Plan make_plan(const ErrorSpec& spec,
               BoundVariant variant = BoundVariant::simplified);

// Negative-testing entry point: override the box geometry. When only the
// length is overridden the width is rederived from the definitional ratio
// width = (alpha/beta + alpha) * length; an explicit width override pins it
// independently. Overridden plans may violate L >= A / W >= B on purpose.
Plan make_plan(const ErrorSpec& spec, BoundVariant variant,
               std::optional<double> override_length,
               std::optional<double> override_width);

// Degenerate geometry consuming exactly n trials (height exit unreachable).
Plan fixed_size_plan(std::int64_t n);

// Geometry of the pure inverse-binomial rule truncated at cap trials.
Plan inverse_binomial_plan(double beta, double delta, std::int64_t cap);

// Worst-case saving over the classical fixed-size bound:
//   chernoff_hoeffding_n(alpha, delta) / n_max(simplified plan),
// approximately beta/(4 alpha) for small beta. Evaluated in extended
// precision so it never overflows.
double gain_ratio(const ErrorSpec& spec);

}  // namespace tibs
