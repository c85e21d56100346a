#include "tibs/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

#include "tibs/engine.hpp"
#include "tibs/normal.hpp"
#include "tibs/splitmix64.hpp"

namespace tibs {

namespace {

void require_estimate(std::int64_t successes, std::int64_t m) {
  if (m < 1 || successes < 0 || successes > m)
    throw std::invalid_argument(
        "criterion: need m >= 1 and 0 <= successes <= m");
}

void require_p(double p_true, const char* where) {
  if (!(p_true > 0.0 && p_true < 1.0))
    throw std::domain_error(std::string(where) +
                            ": p_true must lie in (0,1)");
}

}  // namespace

const char* to_string(CriterionMode mode) noexcept {
  switch (mode) {
    case CriterionMode::absolute:
      return "absolute";
    case CriterionMode::relative:
      return "relative";
    case CriterionMode::mixed:
      return "mixed";
  }
  return "?";
}

CriterionSpec CriterionSpec::absolute(double alpha) {
  return {alpha, 0.0, CriterionMode::absolute};
}

CriterionSpec CriterionSpec::relative(double beta) {
  return {0.0, beta, CriterionMode::relative};
}

CriterionSpec CriterionSpec::mixed(double alpha, double beta) {
  return {alpha, beta, CriterionMode::mixed};
}

CriterionSpec CriterionSpec::mixed_from(const ErrorSpec& spec) {
  return mixed(spec.alpha, spec.beta);
}

bool criterion_holds(std::int64_t successes, std::int64_t m, double p_true,
                     const CriterionSpec& crit) {
  require_estimate(successes, m);
  const double mf = static_cast<double>(m);
  const double deviation = std::fabs(static_cast<double>(successes) -
                                     p_true * mf);
  switch (crit.mode) {
    case CriterionMode::absolute:
      return deviation < crit.alpha * mf;
    case CriterionMode::relative:
      return deviation < crit.beta * p_true * mf;
    case CriterionMode::mixed:
      return deviation < crit.alpha * mf ||
             deviation < crit.beta * p_true * mf;
  }
  return false;
}

bool criterion_boundary_ambiguous(std::int64_t successes, std::int64_t m,
                                  double p_true, const CriterionSpec& crit) {
  require_estimate(successes, m);
  const double mf = static_cast<double>(m);
  const double deviation = std::fabs(static_cast<double>(successes) -
                                     p_true * mf);
  const double band = 1e-12 * mf;
  const bool near_absolute =
      std::fabs(deviation - crit.alpha * mf) <= band;
  const bool near_relative =
      std::fabs(deviation - crit.beta * p_true * mf) <= band;
  switch (crit.mode) {
    case CriterionMode::absolute:
      return near_absolute;
    case CriterionMode::relative:
      return near_relative;
    case CriterionMode::mixed:
      return near_absolute || near_relative;
  }
  return false;
}

const char* to_string(CoverageMethod method) noexcept {
  switch (method) {
    case CoverageMethod::exact_dp:
      return "exact_dp";
    case CoverageMethod::exact_binomial:
      return "exact_binomial";
    case CoverageMethod::empirical:
      return "empirical";
  }
  return "?";
}

CoverageReport exact_walk_coverage(const Plan& plan, double p_true,
                                   const CriterionSpec& crit,
                                   const WalkCoverageOptions& options) {
  require_p(p_true, "exact_walk_coverage");
  if (plan.n_max < 1 || plan.k_threshold < 1)
    throw std::invalid_argument(
        "exact_walk_coverage: plan thresholds must be positive");
  if (static_cast<__int128>(plan.n_max) * plan.k_threshold >
      static_cast<__int128>(options.state_budget))
    throw std::runtime_error(
        "exact_walk_coverage: n_max * k_threshold exceeds the state budget "
        "of " +
        std::to_string(options.state_budget) + " states");

  const std::int64_t n_max = plan.n_max;
  const std::int64_t k_threshold = plan.k_threshold;
  const double p = p_true;
  const double q = 1.0 - p_true;

  CoverageReport report;
  report.p_true = p_true;
  report.method = CoverageMethod::exact_dp;
  report.n_max = n_max;
  report.k_threshold = k_threshold;
  report.criterion = crit;

  double coverage = 0.0;
  double expected_m = 0.0;
  auto record_exit = [&](std::int64_t m, std::int64_t successes,
                         double probability) {
    if (probability <= 0.0) return;
    report.exit_distribution.push_back({m, successes, probability});
    expected_m += static_cast<double>(m) * probability;
    if (criterion_holds(successes, m, p_true, crit)) coverage += probability;
    if (criterion_boundary_ambiguous(successes, m, p_true, crit))
      ++report.boundary_ambiguous;
  };

  // Alive states need successes <= min(k_threshold - 1, n_max - 1).
  const std::int64_t alive_size = std::min(k_threshold, n_max);
  std::vector<double> alive(static_cast<std::size_t>(alive_size), 0.0);
  alive[0] = 1.0;

  for (std::int64_t n = 1; n < n_max; ++n) {
    if (n >= k_threshold)
      record_exit(n, k_threshold,
                  alive[static_cast<std::size_t>(k_threshold - 1)] * p);
    const std::int64_t top = std::min(alive_size - 1, n);
    for (std::int64_t s = top; s >= 1; --s)
      alive[static_cast<std::size_t>(s)] =
          alive[static_cast<std::size_t>(s)] * q +
          alive[static_cast<std::size_t>(s - 1)] * p;
    alive[0] *= q;
  }

  // The n_max-th trial is performed; both outcomes leave the box.
  const std::int64_t top = std::min(alive_size - 1, n_max - 1);
  for (std::int64_t s = 0; s <= top + 1; ++s) {
    double probability = 0.0;
    if (s <= top) probability += alive[static_cast<std::size_t>(s)] * q;
    if (s >= 1 && s - 1 <= top)
      probability += alive[static_cast<std::size_t>(s - 1)] * p;
    record_exit(n_max, s, probability);
  }

  report.coverage = coverage;
  report.expected_m = expected_m;
  return report;
}

CoverageReport exact_fixed_coverage(std::int64_t n, double p_true,
                                    const CriterionSpec& crit) {
  require_p(p_true, "exact_fixed_coverage");
  if (n < 1 || n > 10'000'000)
    throw std::invalid_argument(
        "exact_fixed_coverage: n must lie in [1, 1e7]");

  CoverageReport report;
  report.p_true = p_true;
  report.method = CoverageMethod::exact_binomial;
  report.n_max = n;
  report.k_threshold = n + 1;
  report.criterion = crit;

  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  const double log_p = std::log(p_true);
  const double log_q = std::log1p(-p_true);
  double coverage = 0.0;
  double expected_m = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    const double kf = static_cast<double>(k);
    const double log_pmf = log_n_fact - std::lgamma(kf + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0) +
                           kf * log_p + static_cast<double>(n - k) * log_q;
    const double probability = std::exp(log_pmf);
    report.exit_distribution.push_back({n, k, probability});
    expected_m += static_cast<double>(n) * probability;
    if (criterion_holds(k, n, p_true, crit)) coverage += probability;
    if (criterion_boundary_ambiguous(k, n, p_true, crit))
      ++report.boundary_ambiguous;
  }
  report.coverage = coverage;
  report.expected_m = expected_m;
  return report;
}

CoverageReport empirical_coverage(const Plan& plan, double p_true,
                                  const CriterionSpec& crit,
                                  std::int64_t replications,
                                  std::uint64_t master_seed) {
  require_p(p_true, "empirical_coverage");
  if (replications < 1)
    throw std::invalid_argument(
        "empirical_coverage: replications must be >= 1");

  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
  for (std::int64_t r = 0; r < replications; ++r) {
    const std::uint64_t seed =
        SplitMix64(master_seed + static_cast<std::uint64_t>(r)).next();
    SyntheticSource source(p_true, seed);
    const EstimationResult result = run_truncated_ibs(source, plan);
    ++counts[{result.m, result.successes}];
  }

  CoverageReport report;
  report.p_true = p_true;
  report.method = CoverageMethod::empirical;
  report.n_max = plan.n_max;
  report.k_threshold = plan.k_threshold;
  report.criterion = crit;
  report.replications = replications;

  std::int64_t hits = 0;
  double expected_m = 0.0;
  const double total = static_cast<double>(replications);
  for (const auto& [state, count] : counts) {
    const auto [m, successes] = state;
    const double probability = static_cast<double>(count) / total;
    report.exit_distribution.push_back({m, successes, probability});
    expected_m += static_cast<double>(m) * probability;
    if (criterion_holds(successes, m, p_true, crit)) hits += count;
    if (criterion_boundary_ambiguous(successes, m, p_true, crit))
      ++report.boundary_ambiguous;
  }
  report.coverage = static_cast<double>(hits) / total;
  report.expected_m = expected_m;
  const WilsonInterval wilson = wilson_interval(hits, replications, 0.99);
  report.wilson_low = wilson.low;
  report.wilson_high = wilson.high;
  return report;
}

WilsonInterval wilson_interval(std::int64_t hits, std::int64_t n,
                               double confidence) {
  if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
  if (hits < 0 || hits > n)
    throw std::invalid_argument("wilson_interval: hits must lie in [0, n]");
  const double z = inverse_normal_cdf(0.5 + confidence / 2.0);
  const double nf = static_cast<double>(n);
  const double p_hat = static_cast<double>(hits) / nf;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nf;
  const double center = (p_hat + z2 / (2.0 * nf)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nf + z2 / (4.0 * nf * nf)) /
      denom;
  // At the degenerate ends the bounds are exact: 0 for no hits, 1 for all.
  const double low = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = hits == n ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

}  // namespace tibs
