#include "tibs/engine.hpp"

#include <stdexcept>

namespace tibs {

namespace {

void require_geometry(const Plan& plan) {
  if (plan.n_max < 1 || plan.k_threshold < 1)
    throw std::invalid_argument("run: plan thresholds must be positive");
}

}  // namespace

SyntheticSource::SyntheticSource(double p_true, std::uint64_t seed)
    : p_true_(p_true), seed_(seed), rng_(seed) {
  if (!(p_true > 0.0 && p_true < 1.0))
    throw std::domain_error("SyntheticSource: p_true must lie in (0,1)");
}

std::string SyntheticSource::descriptor() const {
  return "synthetic(p=" + std::to_string(p_true_) +
         ",seed=" + std::to_string(seed_) + ")";
}

const char* to_string(StopReason reason) noexcept {
  return reason == StopReason::height_exit ? "height_exit" : "length_exit";
}

EstimationResult run_truncated_ibs(TrialSource& source, const Plan& plan) {
  require_geometry(plan);
  EstimationResult result;
  result.plan = plan;
  std::int64_t m = 0;
  std::int64_t successes = 0;
  for (;;) {
    ++m;
    if (source.next_trial()) ++successes;
    if (successes >= plan.k_threshold && m < plan.n_max) {
      result.stop_reason = StopReason::height_exit;
      break;
    }
    if (m >= plan.n_max) {
      result.stop_reason = StopReason::length_exit;
      break;
    }
  }
  result.m = m;
  result.successes = successes;
  result.seed = source.seed();
  return result;
}

EstimationResult run_fixed_size(TrialSource& source, std::int64_t n) {
  EstimationResult result;
  result.plan = fixed_size_plan(n);
  std::int64_t successes = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (source.next_trial()) ++successes;
  result.m = n;
  result.successes = successes;
  result.stop_reason = StopReason::length_exit;
  result.seed = source.seed();
  return result;
}

EstimationResult run_inverse_binomial(TrialSource& source, double beta,
                                      double delta, std::int64_t cap) {
  EstimationResult result;
  result.plan = inverse_binomial_plan(beta, delta, cap);
  std::int64_t m = 0;
  std::int64_t successes = 0;
  for (;;) {
    ++m;
    if (source.next_trial()) ++successes;
    if (successes >= result.plan.k_threshold) {
      result.stop_reason = StopReason::height_exit;
      break;
    }
    if (m >= cap) {
      result.stop_reason = StopReason::length_exit;
      result.truncated = true;
      break;
    }
  }
  result.m = m;
  result.successes = successes;
  result.seed = source.seed();
  return result;
}

}  // namespace tibs
