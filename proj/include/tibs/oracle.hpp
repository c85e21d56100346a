#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tibs/bounds.hpp"

namespace tibs {

enum class CriterionMode { absolute, relative, mixed };

const char* to_string(CriterionMode mode) noexcept;

// Accuracy event being verified for an estimate (successes, m) against a
// known true probability p:
//   absolute:  |successes - p*m| < alpha * m
//   relative:  |successes - p*m| < beta * p * m
//   mixed:     either one
// Comparisons are multiplied through by m, never divided, so integer inputs
// stay exact.
struct CriterionSpec {
  double alpha = 0.0;  // ignored in relative mode
  double beta = 0.0;   // ignored in absolute mode
  CriterionMode mode = CriterionMode::mixed;

  static CriterionSpec absolute(double alpha);
  static CriterionSpec relative(double beta);
  static CriterionSpec mixed(double alpha, double beta);
  static CriterionSpec mixed_from(const ErrorSpec& spec);
};

bool criterion_holds(std::int64_t successes, std::int64_t m, double p_true,
                     const CriterionSpec& crit);

// True when the deviation sits within 1e-12 * m of an active margin, i.e.
// double rounding could in principle flip the strict comparison. Coverage
// reports count such exit states rather than silently trusting the flip.
bool criterion_boundary_ambiguous(std::int64_t successes, std::int64_t m,
                                  double p_true, const CriterionSpec& crit);

enum class CoverageMethod { exact_dp, exact_binomial, empirical };

const char* to_string(CoverageMethod method) noexcept;

struct ExitState {
  std::int64_t m;
  std::int64_t successes;
  double probability;
};

// Coverage of the criterion event under a stopping rule at a given true p:
// the full exit distribution over (m, successes), the probability mass of
// exit states satisfying the criterion, and the expected stopping time.
struct CoverageReport {
  double p_true = 0.0;
  double coverage = 0.0;
  double expected_m = 0.0;
  std::vector<ExitState> exit_distribution;  // ordered by (m, successes)
  CoverageMethod method = CoverageMethod::exact_dp;
  std::int64_t n_max = 0;
  std::int64_t k_threshold = 0;
  CriterionSpec criterion;
  std::int64_t boundary_ambiguous = 0;

  // Empirical method only:
  std::int64_t replications = 0;
  double wilson_low = 0.0;
  double wilson_high = 1.0;
};

struct WalkCoverageOptions {
  // Upper bound on n_max * k_threshold; the DP refuses larger geometries.
  std::int64_t state_budget = 100'000'000;
};

// Exact exit distribution of the rectangular random walk by forward dynamic
// programming on the alive-state masses
//   f(n, s) = f(n-1, s)*(1-p) + f(n-1, s-1)*p,  s < k_threshold,
// with height-exit mass f(n-1, k_threshold-1)*p at each n < n_max and the
// n_max-th trial distributing the remaining mass. Plain double
// probabilities: alive masses are sums of positive terms, so desk-scale
// accumulation error stays far below the 1e-12 reporting tolerance.
CoverageReport exact_walk_coverage(const Plan& plan, double p_true,
                                   const CriterionSpec& crit,
                                   const WalkCoverageOptions& options = {});

// Exact binomial coverage of fixed-size sampling with n trials; the pmf is
// evaluated in log space through lgamma so it stays stable up to n = 1e7.
CoverageReport exact_fixed_coverage(std::int64_t n, double p_true,
                                    const CriterionSpec& crit);

// Monte Carlo estimate of the walk coverage over seeded replications.
// Replication r uses the synthetic-source seed SplitMix64(master_seed + r),
// so the result is independent of evaluation order. Reports the hit
// fraction with a 99% Wilson interval.
CoverageReport empirical_coverage(const Plan& plan, double p_true,
                                  const CriterionSpec& crit,
                                  std::int64_t replications,
                                  std::uint64_t master_seed);

struct WilsonInterval {
  double low;
  double high;
};

// Wilson score interval for hits/n at the given two-sided confidence level.
WilsonInterval wilson_interval(std::int64_t hits, std::int64_t n,
                               double confidence);

}  // namespace tibs
