#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "tibs/bounds.hpp"
#include "tibs/splitmix64.hpp"

namespace tibs {

// A trial source could not deliver an outcome (child process died, protocol
// violation, spawn failure). Carries the number of trials successfully
// consumed before the failure.
class SourceError : public std::runtime_error {
 public:
  SourceError(const std::string& what, std::int64_t trials_consumed)
      : std::runtime_error(what), trials_consumed_(trials_consumed) {}

  std::int64_t trials_consumed() const noexcept { return trials_consumed_; }

 private:
  std::int64_t trials_consumed_;
};

// Stream of independent, identically distributed Bernoulli outcomes.
// next_trial() returns true for success. The base class counts consumed
// trials; after any run the counter equals the stopping time (the runners
// never read ahead).
class TrialSource {
 public:
  virtual ~TrialSource() = default;

  bool next_trial() {
    bool success = draw();
    ++consumed_;
    return success;
  }

  std::int64_t trials_consumed() const noexcept { return consumed_; }

  virtual std::string descriptor() const = 0;

  // Seed of the underlying generator, when the source has one.
  virtual std::optional<std::uint64_t> seed() const { return std::nullopt; }

 private:
  virtual bool draw() = 0;

  std::int64_t consumed_ = 0;
};

// Deterministic synthetic Bernoulli(p_true) stream: trial i succeeds iff the
// i-th SplitMix64 output, mapped to [0,1), is below p_true. Same
// (p_true, seed) always yields the identical outcome sequence.
class SyntheticSource final : public TrialSource {
 public:
  SyntheticSource(double p_true, std::uint64_t seed);

  std::string descriptor() const override;
  std::optional<std::uint64_t> seed() const override { return seed_; }
  double p_true() const noexcept { return p_true_; }

 private:
  bool draw() override { return rng_.next_unit() < p_true_; }

  double p_true_;
  std::uint64_t seed_;
  SplitMix64 rng_;
};

enum class StopReason {
  length_exit,  // the trial budget n_max was reached
  height_exit   // the success count reached k_threshold before n_max
};

const char* to_string(StopReason reason) noexcept;

// Outcome of one sequential estimation run. The estimate is the exact
// integer pair (successes, m); p_hat() is a convenience projection.
struct EstimationResult {
  std::int64_t m = 0;          // stopping time: trials consumed
  std::int64_t successes = 0;  // success count at the stop
  StopReason stop_reason = StopReason::length_exit;
  Plan plan;
  std::optional<std::uint64_t> seed;
  bool truncated = false;  // inverse-binomial cap hit before the threshold

  double p_hat() const {
    return static_cast<double>(successes) / static_cast<double>(m);
  }
};

// Rectangular-random-walk stopping rule: consume trials until the point
// (n, successes) leaves the plan's box, i.e. until the first n with
// n >= n_max or successes >= k_threshold. The n_max-th trial is performed
// and counted. When both conditions first hold at the same n (only possible
// at n == n_max) the exit is recorded as length_exit.
EstimationResult run_truncated_ibs(TrialSource& source, const Plan& plan);

// Consume exactly n trials.
EstimationResult run_fixed_size(TrialSource& source, std::int64_t n);

// Pure inverse binomial sampling: stop at the first n whose success count
// strictly exceeds inverse_binomial_threshold(beta, delta). The rule alone
// need not terminate (its expected time diverges as p -> 0), so a cap is
// mandatory; hitting the cap yields a result flagged truncated, which is
// distinct from a source failure (that throws SourceError).
EstimationResult run_inverse_binomial(TrialSource& source, double beta,
                                      double delta, std::int64_t cap);

}  // namespace tibs
