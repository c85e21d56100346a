#include <doctest.h>

#include <chrono>

#include "support/subprocess.hpp"
#include "tibs/engine.hpp"
#include "tibs/external_source.hpp"

using namespace tibs;
using testsupport::require_env;

namespace {

constexpr std::chrono::milliseconds kTestGrace{500};

}  // namespace

TEST_CASE("external source: all-failure child behaves as the p=0 degenerate") {
  ExternalSource source(require_env("TRIAL_CHILD"), {"zeros"}, kTestGrace);
  const EstimationResult result = run_fixed_size(source, 50);
  CHECK(result.m == 50);
  CHECK(result.successes == 0);
  CHECK(result.p_hat() == 0.0);
  CHECK(source.trials_consumed() == 50);
}

TEST_CASE("external source: alternating child gives p_hat = 1/2") {
  ExternalSource source(require_env("TRIAL_CHILD"), {"alternate"},
                        kTestGrace);
  const EstimationResult result = run_fixed_size(source, 100);
  CHECK(result.successes == 50);
  CHECK(result.p_hat() == 0.5);
}

TEST_CASE("external source: all-success child height-exits the walk") {
  ExternalSource source(require_env("TRIAL_CHILD"), {"ones"}, kTestGrace);
  const Plan plan = make_plan(ErrorSpec(0.1, 0.5, 0.1),
                              BoundVariant::simplified);
  const EstimationResult result = run_truncated_ibs(source, plan);
  CHECK(result.m == plan.k_threshold);
  CHECK(result.stop_reason == StopReason::height_exit);
  CHECK(source.trials_consumed() == result.m);
  source.shutdown();
  source.shutdown();  // idempotent
}

TEST_CASE("external source: child death mid-run reports consumed trials") {
  ExternalSource source(require_env("TRIAL_CHILD"), {"die-after", "10"},
                        kTestGrace);
  try {
    run_fixed_size(source, 20);
    FAIL("expected SourceError");
  } catch (const SourceError& e) {
    CHECK(e.trials_consumed() == 10);
    CHECK(std::string(e.what()).find("after 10 trials") != std::string::npos);
  }
}

TEST_CASE("external source: malformed bytes are protocol errors") {
  ExternalSource garbage(require_env("TRIAL_CHILD"), {"garbage"}, kTestGrace);
  CHECK_THROWS_AS(run_fixed_size(garbage, 5), SourceError);

  ExternalSource no_newline(require_env("TRIAL_CHILD"), {"no-newline"},
                            kTestGrace);
  try {
    run_fixed_size(no_newline, 5);
    FAIL("expected SourceError");
  } catch (const SourceError& e) {
    CHECK(e.trials_consumed() == 0);
    CHECK(std::string(e.what()).find("protocol error") != std::string::npos);
  }
}

TEST_CASE("external source: spawn failure is diagnosed") {
  try {
    ExternalSource source("/nonexistent/simulator", {}, kTestGrace);
    FAIL("expected SourceError");
  } catch (const SourceError& e) {
    CHECK(e.trials_consumed() == 0);
    CHECK(std::string(e.what()).find("cannot execute") != std::string::npos);
  }
}

TEST_CASE("external source: no over-reading past the stopping time") {
  ExternalSource source(require_env("TRIAL_CHILD"), {"ones"}, kTestGrace);
  const EstimationResult result = run_fixed_size(source, 7);
  CHECK(result.m == 7);
  CHECK(source.trials_consumed() == 7);
}
