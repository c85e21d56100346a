// Acceptance suite: exercises every product guarantee end to end and prints
// one PASS/FAIL line per criterion. Returns the number of failed criteria.
//
// Usage: acceptance --cli /path/to/tibs

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/subprocess.hpp"
#include "tibs/bounds.hpp"
#include "tibs/engine.hpp"
#include "tibs/oracle.hpp"
#include "tibs/splitmix64.hpp"

using namespace tibs;
using testsupport::run_process;
using testsupport::RunResult;

namespace {

std::string g_cli_path;

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& message) {
    if (!ok && pass) {
      pass = false;
      detail = message;
    }
  }
};

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<double> grid_99() {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

std::string render(double x) { return nlohmann::json(x).dump(); }

RunResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), g_cli_path);
  return run_process(args);
}

// --------------------------------------------------------------------------

Check criterion_1_table() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t values[5] = {
      chernoff_hoeffding_n(1e-3, 1e-3), chernoff_hoeffding_n(1e-4, 1e-3),
      chernoff_hoeffding_n(1e-5, 1e-3), chernoff_hoeffding_n(1e-6, 1e-3),
      chernoff_hoeffding_n(1e-7, 1e-3)};
  const double elapsed = ms_since(start);
  const std::int64_t expected[5] = {3'800'452, 380'045'123, 38'004'512'298,
                                    3'800'451'229'772, 380'045'122'977'105};
  for (int i = 0; i < 5; ++i)
    check.require(values[i] == expected[i],
                  "budget for alpha=1e-" + std::to_string(i + 3) + " is " +
                      std::to_string(values[i]) + ", expected " +
                      std::to_string(expected[i]));
  check.require(elapsed < 1.0, "computation took " + render(elapsed) + " ms");

  const RunResult csv = cli({"table", "--delta", "1e-3", "--format", "csv"});
  check.require(csv.exit_code == 0, "table subcommand failed");
  check.require(csv.out ==
                    "alpha,n_ch\n"
                    "0.001,3800452\n"
                    "0.0001,380045123\n"
                    "1e-05,38004512298\n"
                    "1e-06,3800451229772\n"
                    "1e-07,380045122977105\n",
                "table csv output mismatched: " + csv.out);
  return check;
}

Check criterion_2_gain_ratio() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const double centi = gain_ratio(ErrorSpec(1e-6, 1e-2, 1e-3));
  const double deci = gain_ratio(ErrorSpec(1e-6, 1e-1, 1e-3));
  const double elapsed = ms_since(start);
  check.require(centi >= 2375.0 && centi <= 2625.0,
                "gain ratio at beta=1e-2 is " + render(centi));
  check.require(deci >= 23750.0 && deci <= 26250.0,
                "gain ratio at beta=1e-1 is " + render(deci));
  check.require(elapsed < 1.0, "computation took " + render(elapsed) + " ms");
  return check;
}

Check criterion_3_walk_coverage() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  struct Case {
    double alpha, beta, delta;
  };
  for (const Case& c : {Case{0.1, 0.5, 0.1}, Case{0.05, 0.4, 0.05}}) {
    const ErrorSpec spec(c.alpha, c.beta, c.delta);
    const CriterionSpec criterion = CriterionSpec::mixed_from(spec);
    const double target = 1.0 - c.delta;
    for (BoundVariant variant : {BoundVariant::exact, BoundVariant::simplified,
                                 BoundVariant::loose}) {
      const Plan plan = make_plan(spec, variant);
      for (double p : grid_99()) {
        const double coverage =
            exact_walk_coverage(plan, p, criterion).coverage;
        check.require(coverage > target,
                      std::string("variant ") + to_string(variant) +
                          " at alpha=" + render(c.alpha) + ", p=" + render(p) +
                          ": coverage " + render(coverage) + " <= " +
                          render(target));
        if (!check.pass) return check;
      }
    }
  }
  const double elapsed = ms_since(start);
  check.require(elapsed < 10'000.0, "took " + render(elapsed) + " ms");
  return check;
}

Check criterion_4_fixed_coverage() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const ErrorSpec spec(0.1, 0.5, 0.1);
  const std::int64_t n_mixed = strictly_above(bound_exact(spec));
  const CriterionSpec mixed = CriterionSpec::mixed_from(spec);
  for (double p : grid_99()) {
    const double coverage = exact_fixed_coverage(n_mixed, p, mixed).coverage;
    check.require(coverage > 1.0 - spec.delta,
                  "mixed coverage at n=" + std::to_string(n_mixed) +
                      ", p=" + render(p) + " is " + render(coverage));
    if (!check.pass) return check;
  }
  const std::int64_t n_absolute = chernoff_hoeffding_n(0.1, 0.1);
  const CriterionSpec absolute = CriterionSpec::absolute(0.1);
  for (double p : grid_99()) {
    const double coverage =
        exact_fixed_coverage(n_absolute, p, absolute).coverage;
    check.require(coverage > 0.9,
                  "absolute coverage at n=" + std::to_string(n_absolute) +
                      ", p=" + render(p) + " is " + render(coverage));
    if (!check.pass) return check;
  }
  const double elapsed = ms_since(start);
  check.require(elapsed < 5'000.0, "took " + render(elapsed) + " ms");
  return check;
}

Check criterion_5_bound_properties() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(987654321);
  for (int i = 0; i < 1000; ++i) {
    const double beta =
        std::exp(std::log(1e-3) + rng.next_unit() * std::log(1e4));
    const double alpha =
        0.999 * beta / (2.0 + beta) * (0.01 + 0.98 * rng.next_unit());
    const double delta = 0.001 + 0.998 * rng.next_unit();
    const ErrorSpec spec(alpha, beta, delta);
    const double exact = bound_exact(spec);
    const double simplified = bound_simplified(spec);
    check.require(exact <= simplified * (1.0 + 1e-12),
                  "ordering exact <= simplified violated at alpha=" +
                      render(alpha) + ", beta=" + render(beta));
    if (beta < 1.0)
      check.require(simplified <= bound_loose(spec) * (1.0 + 1e-12),
                    "ordering simplified <= loose violated at beta=" +
                        render(beta));
    const double entropy = relative_entropy(alpha / beta + alpha, alpha / beta);
    const double log_term = std::log(2.0 / delta);
    check.require(std::fabs(exact * entropy - log_term) <= 1e-12 * log_term,
                  "entropy identity violated at alpha=" + render(alpha) +
                      ", beta=" + render(beta) + ", delta=" + render(delta));
    check.require(entropy >= 2.0 * alpha * alpha,
                  "Taylor lower bound violated at alpha=" + render(alpha) +
                      ", beta=" + render(beta));
    if (!check.pass) return check;
  }
  const double elapsed = ms_since(start);
  check.require(elapsed < 1'000.0, "took " + render(elapsed) + " ms");
  return check;
}

Check criterion_6_width_limit() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const double threshold = inverse_binomial_threshold(0.5, 0.1);
  double previous_gap = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= 8; ++k) {
    const Plan plan =
        make_plan(ErrorSpec(std::pow(10.0, -k), 0.5, 0.1), BoundVariant::exact);
    const double gap = std::fabs(plan.width - threshold);
    check.require(gap < previous_gap,
                  "gap did not shrink at k=" + std::to_string(k) + ": " +
                      render(gap) + " vs " + render(previous_gap));
    previous_gap = gap;
  }
  check.require(previous_gap < 1e-4,
                "final gap " + render(previous_gap) + " >= 1e-4");
  const double elapsed = ms_since(start);
  check.require(elapsed < 1.0, "computation took " + render(elapsed) + " ms");
  return check;
}

Check criterion_7_oracle_cross_validation() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const ErrorSpec spec(0.1, 0.5, 0.1);
  const Plan plan = make_plan(spec, BoundVariant::simplified);
  const CriterionSpec criterion = CriterionSpec::mixed_from(spec);
  constexpr std::int64_t kReplications = 100'000;
  constexpr std::uint64_t kMasterSeed = 20240817;
  for (double p : {0.1, 0.3, 0.5, 0.7}) {
    const CoverageReport exact = exact_walk_coverage(plan, p, criterion);
    const CoverageReport empirical = empirical_coverage(
        plan, p, criterion, kReplications, kMasterSeed);
    check.require(
        empirical.wilson_low <= exact.coverage &&
            exact.coverage <= empirical.wilson_high,
        "p=" + render(p) + ": Wilson interval [" +
            render(empirical.wilson_low) + ", " +
            render(empirical.wilson_high) + "] misses exact coverage " +
            render(exact.coverage));
    double second_moment = 0.0;
    for (const ExitState& state : exact.exit_distribution)
      second_moment += static_cast<double>(state.m) *
                       static_cast<double>(state.m) * state.probability;
    const double variance = std::max(
        0.0, second_moment - exact.expected_m * exact.expected_m);
    const double std_error = std::sqrt(variance / kReplications);
    check.require(
        std::fabs(empirical.expected_m - exact.expected_m) <=
            3.0 * std_error + 1e-9,
        "p=" + render(p) + ": mean stopping time " +
            render(empirical.expected_m) + " deviates from exact " +
            render(exact.expected_m) + " by more than 3 standard errors (" +
            render(3.0 * std_error) + ")");
    if (!check.pass) return check;
  }
  const double elapsed = ms_since(start);
  check.require(elapsed < 30'000.0, "took " + render(elapsed) + " ms");
  return check;
}

Check criterion_8_determinism() {
  Check check;
  const std::vector<std::string> args = {
      "estimate", "--alpha", "0.1",    "--beta", "0.5",  "--delta", "0.1",
      "--p-true", "0.3",     "--seed", "42",     "--format", "json"};
  const RunResult first = cli(args);
  const RunResult second = cli(args);
  check.require(first.exit_code == 0 && second.exit_code == 0,
                "estimate invocation failed");
  check.require(first.out == second.out,
                "reruns differ: " + first.out + " vs " + second.out);
  if (!check.pass) return check;
  // Pin the generator contract: these integers were derived from an
  // independent reimplementation of the seeded run.
  const nlohmann::json j = nlohmann::json::parse(first.out);
  check.require(j["m"].get<std::int64_t>() == 124 &&
                    j["successes"].get<std::int64_t>() == 42,
                "seeded run produced (m=" + j["m"].dump() + ", successes=" +
                    j["successes"].dump() + "), expected (124, 42)");
  return check;
}

Check criterion_9_negative_control() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const double half_length = 0.5 * bound_simplified(ErrorSpec(0.1, 0.5, 0.1));
  const RunResult result =
      cli({"verify", "--alpha", "0.1", "--beta", "0.5", "--delta", "0.1",
           "--override-length", render(half_length), "--format", "json"});
  check.require(
      result.exit_code == 4,
      "verify at half length exited " + std::to_string(result.exit_code) +
          " instead of 4: the exact minimum coverage of the halved plan "
          "(0.94968 at p=0.2, over all of (0,1)) still exceeds the 0.9 "
          "target, so a correct verifier reports PASS; halving the length "
          "does not breach the guarantee at this scale");
  const double elapsed = ms_since(start);
  check.require(elapsed < 10'000.0, "took " + render(elapsed) + " ms");
  return check;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
  if (g_cli_path.empty()) {
    std::cerr << "usage: acceptance --cli /path/to/tibs\n";
    return 64;
  }

  struct Criterion {
    int id;
    const char* name;
    Check (*run)();
  };
  const std::vector<Criterion> criteria = {
      {1, "classical fixed-size budget table, integer-exact",
       criterion_1_table},
      {2, "worst-case gain ratios 2500 / 25000 within 5%",
       criterion_2_gain_ratio},
      {3, "walk coverage > 1-delta on the p grid, all bound variants",
       criterion_3_walk_coverage},
      {4, "fixed-size coverage > 1-delta (mixed and absolute)",
       criterion_4_fixed_coverage},
      {5, "bound ordering, entropy identity, Taylor bound (1000 specs)",
       criterion_5_bound_properties},
      {6, "plan width converges to the inverse-binomial threshold",
       criterion_6_width_limit},
      {7, "empirical oracle cross-validates the exact DP (R=100000)",
       criterion_7_oracle_cross_validation},
      {8, "seeded estimates are byte-identical and pinned",
       criterion_8_determinism},
      {9, "negative control: verifier flags a half-length plan",
       criterion_9_negative_control},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Check check = criterion.run();
    const double elapsed = ms_since(start);
    std::ostringstream line;
    line << (check.pass ? "PASS" : "FAIL") << "  " << criterion.id << "  "
         << criterion.name << "  (" << elapsed << " ms)";
    if (!check.pass) {
      line << "\n      " << check.detail;
      ++failures;
    }
    std::cout << line.str() << "\n";
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size()
            << " criteria passed\n";
  return failures;
}
