#include "tibs/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "tibs/normal.hpp"

namespace tibs {

namespace {

// (1+b)ln(1+b) - b. Direct evaluation cancels to b^2/2 for small b, so
// switch to the series b^2/2 - b^3/6 + b^4/12 - b^5/20 below 1e-4.
double entropy_denominator(double beta) {
  if (beta < 1e-4) {
    return beta * beta *
           (0.5 + beta * (-1.0 / 6 + beta * (1.0 / 12 + beta * (-1.0 / 20))));
  }
  return (1.0 + beta) * std::log1p(beta) - beta;
}

long double chernoff_hoeffding_real(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("chernoff_hoeffding_n: alpha must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("chernoff_hoeffding_n: delta must lie in (0,1)");
  const long double a = alpha;
  return logl(2.0L / static_cast<long double>(delta)) / (2.0L * a * a);
}

// floor(v)+1 in extended precision; past 2^63 the +1 is absorbed, which only
// matters for ratios where the relative effect is negligible.
long double strict_ceil_real(long double v) {
  if (v < 9.0e18L) return floorl(v) + 1.0L;
  return v;
}

}  // namespace

ErrorSpec::ErrorSpec(double alpha, double beta, double delta)
    : alpha(alpha), beta(beta), delta(delta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("ErrorSpec: alpha must lie in (0,1)");
  if (!(beta > 0.0))
    throw std::domain_error("ErrorSpec: beta must be positive");
  if (!(alpha < beta))
    throw std::domain_error("ErrorSpec: alpha must be smaller than beta");
  if (!(alpha / beta + alpha / 2.0 <= 0.5))
    throw std::domain_error(
        "ErrorSpec: alpha/beta + alpha/2 must not exceed 1/2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("ErrorSpec: delta must lie in (0,1)");
}

const char* to_string(BoundVariant variant) noexcept {
  switch (variant) {
    case BoundVariant::exact:
      return "exact";
    case BoundVariant::simplified:
      return "simplified";
    case BoundVariant::loose:
      return "loose";
  }
  return "?";
}

std::optional<BoundVariant> bound_variant_from(std::string_view name) noexcept {
  if (name == "exact") return BoundVariant::exact;
  if (name == "simplified") return BoundVariant::simplified;
  if (name == "loose") return BoundVariant::loose;
  return std::nullopt;
}

double relative_entropy(double u, double v) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("relative_entropy: u must lie in (0,1)");
  if (!(v > 0.0 && v < 1.0))
    throw std::domain_error("relative_entropy: v must lie in (0,1)");
  // log1p of the offsets rather than log of the ratios: the direct form
  // loses ~1/ln(u/v) digits when u and v are close.
  const double d = u - v;
  return u * std::log1p(d / v) + (1.0 - u) * std::log1p(-d / (1.0 - v));
}

double bound_exact(const ErrorSpec& spec) {
  const double a = spec.alpha;
  const double b = spec.beta;
  const double x = a * b / (b - a);  // in (0,1) under the spec invariants
  const double denom =
      a * (1.0 + b) * std::log1p(b) + (b - a - a * b) * std::log1p(-x);
  return b * std::log(2.0 / spec.delta) / denom;
}

double bound_simplified(const ErrorSpec& spec) {
  return spec.beta / entropy_denominator(spec.beta) *
         std::log(2.0 / spec.delta) / spec.alpha;
}

double bound_loose(const ErrorSpec& spec) {
  if (!(spec.beta < 1.0))
    throw std::domain_error("bound_loose: requires beta < 1");
  return std::log(2.0 / spec.delta) /
         ((std::log(4.0) - 1.0) * spec.alpha * spec.beta);
}

double bound_for(const ErrorSpec& spec, BoundVariant variant) {
  switch (variant) {
    case BoundVariant::exact:
      return bound_exact(spec);
    case BoundVariant::simplified:
      return bound_simplified(spec);
    case BoundVariant::loose:
      return bound_loose(spec);
  }
  throw std::invalid_argument("bound_for: unknown variant");
}

std::int64_t strictly_above(double x) {
  if (!std::isfinite(x))
    throw std::domain_error("strictly_above: value is not finite");
  if (x >= 9.0e18)
    throw std::overflow_error("strictly_above: exceeds 64-bit integer range");
  return static_cast<std::int64_t>(std::floor(x)) + 1;
}

std::int64_t chernoff_hoeffding_n(double alpha, double delta) {
  const long double v = chernoff_hoeffding_real(alpha, delta);
  if (v >= 9.0e18L)
    throw std::overflow_error(
        "chernoff_hoeffding_n: sample size exceeds 64-bit integer range");
  const __int128 f = static_cast<__int128>(floorl(v));
  return static_cast<std::int64_t>(f) + 1;
}

std::int64_t clt_approx_n(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("clt_approx_n: alpha must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("clt_approx_n: delta must lie in (0,1)");
  const double z = inverse_normal_cdf(1.0 - delta / 2.0);
  const long double a = alpha;
  const long double v =
      static_cast<long double>(z) * static_cast<long double>(z) /
      (4.0L * a * a);
  if (v >= 9.0e18L)
    throw std::overflow_error(
        "clt_approx_n: sample size exceeds 64-bit integer range");
  return static_cast<std::int64_t>(llroundl(v));
}

double inverse_binomial_threshold(double beta, double delta) {
  if (!(beta > 0.0))
    throw std::domain_error("inverse_binomial_threshold: beta must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error(
        "inverse_binomial_threshold: delta must lie in (0,1)");
  return (1.0 + beta) * std::log(2.0 / delta) / entropy_denominator(beta);
}

Plan make_plan(const ErrorSpec& spec, BoundVariant variant) {
  return make_plan(spec, variant, std::nullopt, std::nullopt);
}

Plan make_plan(const ErrorSpec& spec, BoundVariant variant,
               std::optional<double> override_length,
               std::optional<double> override_width) {
  Plan plan;
  plan.spec = spec;
  plan.variant = variant;
  plan.a_bound = bound_for(spec, variant);
  const double ratio = spec.alpha / spec.beta + spec.alpha;
  plan.b_bound = ratio * plan.a_bound;
  plan.length = override_length.value_or(plan.a_bound);
  plan.width = override_width ? *override_width : ratio * plan.length;
  if (!(plan.length > 0.0) || !(plan.width > 0.0))
    throw std::domain_error("make_plan: plan geometry must be positive");
  plan.n_max = strictly_above(plan.length);
  plan.k_threshold = strictly_above(plan.width);
  return plan;
}

Plan fixed_size_plan(std::int64_t n) {
  if (n < 1) throw std::domain_error("fixed_size_plan: n must be >= 1");
  Plan plan;
  plan.length = static_cast<double>(n) - 0.5;
  plan.width = static_cast<double>(n) + 0.5;
  plan.n_max = n;
  plan.k_threshold = n + 1;  // unreachable: forces a pure fixed-size sample
  return plan;
}

Plan inverse_binomial_plan(double beta, double delta, std::int64_t cap) {
  if (cap < 1)
    throw std::domain_error("inverse_binomial_plan: cap must be >= 1");
  Plan plan;
  plan.width = inverse_binomial_threshold(beta, delta);
  plan.k_threshold = strictly_above(plan.width);
  plan.length = static_cast<double>(cap) - 0.5;
  plan.n_max = cap;
  return plan;
}

double gain_ratio(const ErrorSpec& spec) {
  const long double n_ch =
      strict_ceil_real(chernoff_hoeffding_real(spec.alpha, spec.delta));
  const long double n_max =
      strict_ceil_real(static_cast<long double>(bound_simplified(spec)));
  return static_cast<double>(n_ch / n_max);
}

}  // namespace tibs
