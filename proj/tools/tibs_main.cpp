// tibs: planning, estimation and verification for sequential Bernoulli
// probability estimation under a mixed absolute/relative error criterion.
//
// Exit codes: 0 success (or verification PASS), 2 usage/validation error,
// 3 trial-source failure, 4 verification FAIL.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tibs/bounds.hpp"
#include "tibs/engine.hpp"
#include "tibs/external_source.hpp"
#include "tibs/oracle.hpp"
#include "tibs/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSource = 3;
constexpr int kExitVerifyFail = 4;

enum class Format { human, json, csv };

Format parse_format(const std::string& name) {
  if (name == "human") return Format::human;
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  throw std::invalid_argument("unknown --format '" + name +
                              "' (expected human, json or csv)");
}

// Shortest representation that re-parses to the identical double.
std::string render_double(double x) { return nlohmann::json(x).dump(); }

std::string group_digits(std::int64_t value) {
  std::string digits = std::to_string(value);
  std::string out;
  const std::size_t start = digits[0] == '-' ? 1 : 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > start && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

tibs::BoundVariant parse_variant(const std::string& name) {
  const auto variant = tibs::bound_variant_from(name);
  if (!variant)
    throw std::invalid_argument("unknown --variant '" + name +
                                "' (expected exact, simplified or loose)");
  return *variant;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double start = 0, step = 0, end = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &step, &end,
                    &extra) != 3)
      throw std::invalid_argument("--grid expects start:step:end or a "
                                  "comma-separated list");
    if (!(step > 0.0) || !(start <= end))
      throw std::invalid_argument("--grid expects positive step and "
                                  "start <= end");
    for (int i = 0;; ++i) {
      double p = start + i * step;
      if (p > end + step * 1e-9) break;
      // Snap accumulated points to 12 decimals so p renders cleanly.
      p = std::round(p * 1e12) / 1e12;
      grid.push_back(p);
    }
  } else {
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
      if (!item.empty()) grid.push_back(std::stod(item));
  }
  if (grid.empty()) throw std::invalid_argument("--grid is empty");
  for (double p : grid)
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("--grid values must lie strictly in (0,1)");
  return grid;
}

std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (stream >> item) parts.push_back(item);
  if (parts.empty())
    throw std::invalid_argument("--cmd must name an executable");
  return parts;
}

tibs::WalkCoverageOptions walk_options_from_env() {
  tibs::WalkCoverageOptions options;
  if (const char* raw = std::getenv("TIBS_STATE_BUDGET")) {
    char* end = nullptr;
    const long long parsed = std::strtoll(raw, &end, 10);
    if (end == raw || *end != '\0' || parsed < 1)
      throw std::invalid_argument(
          "TIBS_STATE_BUDGET must be a positive integer");
    options.state_budget = parsed;
  }
  return options;
}

struct PlanFlags {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::string variant = "simplified";
};

void add_spec_flags(CLI::App* cmd, PlanFlags& flags) {
  cmd->add_option("--alpha", flags.alpha, "margin of absolute error");
  cmd->add_option("--beta", flags.beta, "margin of relative error");
  cmd->add_option("--delta", flags.delta, "confidence parameter");
  cmd->add_option("--variant", flags.variant,
                  "bound variant: exact, simplified or loose");
}

tibs::ErrorSpec spec_from(const PlanFlags& flags) {
  return tibs::ErrorSpec(flags.alpha, flags.beta, flags.delta);
}

// ---------------------------------------------------------------- plan ----

int cmd_plan(const PlanFlags& flags, Format format) {
  const tibs::ErrorSpec spec = spec_from(flags);
  const tibs::BoundVariant variant = parse_variant(flags.variant);
  const tibs::Plan plan = tibs::make_plan(spec, variant);
  const std::int64_t n_ch = tibs::chernoff_hoeffding_n(spec.alpha, spec.delta);
  const std::int64_t n_clt = tibs::clt_approx_n(spec.alpha, spec.delta);
  const double gain = tibs::gain_ratio(spec);

  switch (format) {
    case Format::human:
      std::cout << "contract              alpha=" << render_double(spec.alpha)
                << " beta=" << render_double(spec.beta)
                << " delta=" << render_double(spec.delta) << " (coverage > "
                << render_double(1.0 - spec.delta) << ")\n"
                << "variant               " << to_string(variant) << "\n"
                << "a_bound               " << render_double(plan.a_bound)
                << "\n"
                << "b_bound               " << render_double(plan.b_bound)
                << "\n"
                << "length                " << render_double(plan.length)
                << "\n"
                << "width                 " << render_double(plan.width)
                << "\n"
                << "n_max                 " << group_digits(plan.n_max) << "\n"
                << "k_threshold           " << group_digits(plan.k_threshold)
                << "\n"
                << "chernoff_hoeffding_n  " << group_digits(n_ch) << "\n"
                << "clt_approx_n          " << group_digits(n_clt) << "\n"
                << "gain_ratio            " << render_double(gain) << "\n";
      break;
    case Format::json: {
      nlohmann::json j = tibs::plan_to_json(plan);
      j["chernoff_hoeffding_n"] = n_ch;
      j["clt_approx_n"] = n_clt;
      j["gain_ratio"] = gain;
      std::cout << j.dump() << "\n";
      break;
    }
    case Format::csv:
      std::cout << "alpha,beta,delta,variant,a_bound,b_bound,length,width,"
                   "n_max,k_threshold,chernoff_hoeffding_n,clt_approx_n,"
                   "gain_ratio\n"
                << render_double(spec.alpha) << ',' << render_double(spec.beta)
                << ',' << render_double(spec.delta) << ','
                << to_string(variant) << ',' << render_double(plan.a_bound)
                << ',' << render_double(plan.b_bound) << ','
                << render_double(plan.length) << ','
                << render_double(plan.width) << ',' << plan.n_max << ','
                << plan.k_threshold << ',' << n_ch << ',' << n_clt << ','
                << render_double(gain) << "\n";
      break;
  }
  return kExitOk;
}

// --------------------------------------------------------------- table ----

int cmd_table(double delta, Format format) {
  struct Row {
    int exponent;
    double alpha;
    std::int64_t n_ch;
  };
  std::vector<Row> rows;
  for (int k = 3; k <= 7; ++k) {
    const double alpha = std::pow(10.0, -k);
    rows.push_back({k, alpha, tibs::chernoff_hoeffding_n(alpha, delta)});
  }

  switch (format) {
    case Format::human:
      std::cout << "fixed-size budget n > ln(2/delta)/(2 alpha^2), delta="
                << render_double(delta) << "\n\n"
                << "alpha   N_CH\n";
      for (const Row& row : rows)
        std::cout << "1e-" << row.exponent << "    " << group_digits(row.n_ch)
                  << "\n";
      break;
    case Format::json: {
      nlohmann::json j;
      j["delta"] = delta;
      j["rows"] = nlohmann::json::array();
      for (const Row& row : rows)
        j["rows"].push_back({{"alpha", row.alpha}, {"n_ch", row.n_ch}});
      std::cout << j.dump() << "\n";
      break;
    }
    case Format::csv:
      std::cout << "alpha,n_ch\n";
      for (const Row& row : rows)
        std::cout << render_double(row.alpha) << ',' << row.n_ch << "\n";
      break;
  }
  return kExitOk;
}

// ------------------------------------------------------------ estimate ----

struct EstimateFlags {
  PlanFlags plan;
  std::string rule = "tibs";
  std::int64_t n = 0;
  std::int64_t cap = 0;
  double p_true = -1.0;
  std::uint64_t seed = 1;
  std::string cmd;
};

int cmd_estimate(const EstimateFlags& flags, Format format) {
  const bool synthetic = flags.p_true >= 0.0;
  const bool external = !flags.cmd.empty();
  if (synthetic == external)
    throw std::invalid_argument(
        "estimate needs exactly one source: --p-true (with --seed) or --cmd");

  std::unique_ptr<tibs::TrialSource> source;
  if (synthetic) {
    source = std::make_unique<tibs::SyntheticSource>(flags.p_true, flags.seed);
  } else {
    std::vector<std::string> parts = split_command(flags.cmd);
    std::string command = parts.front();
    parts.erase(parts.begin());
    source = std::make_unique<tibs::ExternalSource>(command, parts);
  }

  tibs::EstimationResult result;
  if (flags.rule == "tibs") {
    const tibs::ErrorSpec spec = spec_from(flags.plan);
    const tibs::Plan plan =
        tibs::make_plan(spec, parse_variant(flags.plan.variant));
    result = tibs::run_truncated_ibs(*source, plan);
  } else if (flags.rule == "fixed") {
    if (flags.n < 1)
      throw std::invalid_argument("--rule fixed requires --n >= 1");
    result = tibs::run_fixed_size(*source, flags.n);
  } else if (flags.rule == "ibs") {
    if (flags.cap < 1)
      throw std::invalid_argument("--rule ibs requires --cap >= 1");
    result = tibs::run_inverse_binomial(*source, flags.plan.beta,
                                        flags.plan.delta, flags.cap);
  } else {
    throw std::invalid_argument("unknown --rule '" + flags.rule +
                                "' (expected tibs, fixed or ibs)");
  }

  switch (format) {
    case Format::human:
      std::cout << "rule         " << flags.rule << "\n"
                << "source       " << source->descriptor() << "\n"
                << "m            " << group_digits(result.m) << "\n"
                << "successes    " << group_digits(result.successes) << "\n"
                << "p_hat        " << render_double(result.p_hat()) << "\n"
                << "stop_reason  " << to_string(result.stop_reason) << "\n"
                << "truncated    " << (result.truncated ? "true" : "false")
                << "\n"
                << "n_max        " << group_digits(result.plan.n_max) << "\n"
                << "k_threshold  " << group_digits(result.plan.k_threshold)
                << "\n";
      break;
    case Format::json: {
      nlohmann::json j = tibs::estimation_to_json(result);
      j["rule"] = flags.rule;
      j["source"] = source->descriptor();
      std::cout << j.dump() << "\n";
      break;
    }
    case Format::csv:
      std::cout << "rule,source,m,successes,p_hat,stop_reason,truncated,"
                   "n_max,k_threshold\n"
                << flags.rule << ',' << csv_field(source->descriptor()) << ','
                << result.m << ',' << result.successes << ','
                << render_double(result.p_hat()) << ','
                << to_string(result.stop_reason) << ','
                << (result.truncated ? "true" : "false") << ','
                << result.plan.n_max << ',' << result.plan.k_threshold
                << "\n";
      break;
  }
  return kExitOk;
}

// -------------------------------------------------------------- verify ----

struct VerifyFlags {
  PlanFlags plan;
  std::string grid = "0.01:0.01:0.99";
  std::int64_t replications = 0;  // 0: exact DP mode
  std::uint64_t master_seed = 1;
  double override_length = -1.0;
  double override_width = -1.0;
};

int cmd_verify(const VerifyFlags& flags, Format format) {
  const tibs::ErrorSpec spec = spec_from(flags.plan);
  const tibs::BoundVariant variant = parse_variant(flags.plan.variant);
  std::optional<double> length_override;
  std::optional<double> width_override;
  if (flags.override_length >= 0.0) length_override = flags.override_length;
  if (flags.override_width >= 0.0) width_override = flags.override_width;
  const bool overridden = length_override || width_override;
  const tibs::Plan plan =
      tibs::make_plan(spec, variant, length_override, width_override);
  if (overridden)
    std::cerr << "WARNING: plan geometry overridden (length="
              << render_double(plan.length)
              << ", width=" << render_double(plan.width)
              << "); the coverage guarantee requires length >= "
              << render_double(plan.a_bound) << " and width >= "
              << render_double(plan.b_bound) << "\n";

  const std::vector<double> grid = parse_grid(flags.grid);
  const tibs::CriterionSpec criterion = tibs::CriterionSpec::mixed_from(spec);
  const bool empirical = flags.replications > 0;
  const tibs::WalkCoverageOptions options = walk_options_from_env();
  const double target = 1.0 - spec.delta;

  std::vector<tibs::CoverageReport> reports;
  reports.reserve(grid.size());
  for (double p : grid) {
    reports.push_back(
        empirical ? tibs::empirical_coverage(plan, p, criterion,
                                             flags.replications,
                                             flags.master_seed)
                  : tibs::exact_walk_coverage(plan, p, criterion, options));
  }

  double min_coverage = 2.0;
  double min_p = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (reports[i].coverage < min_coverage) {
      min_coverage = reports[i].coverage;
      min_p = grid[i];
    }
  }
  const bool pass = min_coverage > target;
  const char* mode = empirical ? "empirical" : "exact_dp";

  switch (format) {
    case Format::human: {
      std::cout << "plan: variant=" << to_string(variant)
                << " length=" << render_double(plan.length)
                << " width=" << render_double(plan.width)
                << " n_max=" << plan.n_max
                << " k_threshold=" << plan.k_threshold
                << (overridden ? "  (OVERRIDDEN)" : "") << "\n"
                << "mode: " << mode;
      if (empirical)
        std::cout << " (replications=" << flags.replications
                  << ", master_seed=" << flags.master_seed << ")";
      std::cout << "\n\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::cout << "p=" << render_double(grid[i])
                  << "  coverage=" << render_double(reports[i].coverage)
                  << "  expected_m=" << render_double(reports[i].expected_m);
        if (empirical)
          std::cout << "  wilson99=[" << render_double(reports[i].wilson_low)
                    << "," << render_double(reports[i].wilson_high) << "]";
        if (reports[i].boundary_ambiguous > 0)
          std::cout << "  boundary_ambiguous="
                    << reports[i].boundary_ambiguous;
        std::cout << "\n";
      }
      std::cout << "\n"
                << (pass ? "PASS" : "FAIL") << ": min coverage "
                << render_double(min_coverage) << " at p="
                << render_double(min_p) << " (target > "
                << render_double(target) << ")\n";
      break;
    }
    case Format::json: {
      nlohmann::json j;
      j["mode"] = mode;
      j["plan"] = tibs::plan_to_json(plan);
      j["overridden"] = overridden;
      j["target"] = target;
      if (empirical) {
        j["replications"] = flags.replications;
        j["master_seed"] = flags.master_seed;
      }
      j["reports"] = nlohmann::json::array();
      for (const auto& report : reports) {
        nlohmann::json row = tibs::coverage_to_json(report);
        if (empirical) {
          row["replications"] = report.replications;
          row["wilson_low"] = report.wilson_low;
          row["wilson_high"] = report.wilson_high;
        }
        j["reports"].push_back(std::move(row));
      }
      j["min_coverage"] = min_coverage;
      j["min_coverage_p"] = min_p;
      j["pass"] = pass;
      std::cout << j.dump() << "\n";
      break;
    }
    case Format::csv: {
      std::cout << "p_true,coverage,expected_m,wilson_low,wilson_high\n";
      for (const auto& report : reports) {
        std::cout << render_double(report.p_true) << ','
                  << render_double(report.coverage) << ','
                  << render_double(report.expected_m) << ',';
        if (empirical)
          std::cout << render_double(report.wilson_low) << ','
                    << render_double(report.wilson_high);
        else
          std::cout << ',';
        std::cout << "\n";
      }
      std::cerr << (pass ? "PASS" : "FAIL") << ": min coverage "
                << render_double(min_coverage) << " at p="
                << render_double(min_p) << " (target > "
                << render_double(target) << ")\n";
      break;
    }
  }
  return pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rigorous Monte Carlo probability estimation with truncated inverse "
      "binomial sampling"};
  app.require_subcommand(1);
  std::string format_name = "human";
  const auto add_format_flag = [&format_name](CLI::App* cmd) {
    cmd->add_option("--format", format_name,
                    "output format: human, json or csv")
        ->capture_default_str();
  };

  auto* plan_cmd =
      app.add_subcommand("plan", "derive the sampling budget for a contract");
  PlanFlags plan_flags;
  add_spec_flags(plan_cmd, plan_flags);
  add_format_flag(plan_cmd);

  auto* table_cmd = app.add_subcommand(
      "table", "fixed-size budgets for alpha = 1e-3 .. 1e-7");
  double table_delta = 1e-3;
  table_cmd->add_option("--delta", table_delta, "confidence parameter")
      ->capture_default_str();
  add_format_flag(table_cmd);

  auto* estimate_cmd =
      app.add_subcommand("estimate", "run one sequential estimation");
  EstimateFlags estimate_flags;
  add_spec_flags(estimate_cmd, estimate_flags.plan);
  estimate_cmd->add_option("--rule", estimate_flags.rule,
                           "stopping rule: tibs, fixed or ibs")
      ->capture_default_str();
  estimate_cmd->add_option("--n", estimate_flags.n,
                           "trial count for --rule fixed");
  estimate_cmd->add_option("--cap", estimate_flags.cap,
                           "safety cap for --rule ibs");
  estimate_cmd->add_option("--p-true", estimate_flags.p_true,
                           "synthetic source success probability");
  estimate_cmd->add_option("--seed", estimate_flags.seed,
                           "synthetic source seed")
      ->capture_default_str();
  estimate_cmd->add_option(
      "--cmd", estimate_flags.cmd,
      "external simulator command line (one '0'/'1' line per trial)");
  add_format_flag(estimate_cmd);

  auto* verify_cmd = app.add_subcommand(
      "verify", "sweep true p and check coverage against 1 - delta");
  VerifyFlags verify_flags;
  add_spec_flags(verify_cmd, verify_flags.plan);
  verify_cmd->add_option("--grid", verify_flags.grid,
                         "p grid: start:step:end or comma list")
      ->capture_default_str();
  verify_cmd->add_option("--replications", verify_flags.replications,
                         "empirical mode with this many replications per p");
  verify_cmd->add_option("--master-seed", verify_flags.master_seed,
                         "master seed for empirical mode")
      ->capture_default_str();
  verify_cmd->add_option("--override-length", verify_flags.override_length,
                         "override the plan length (negative testing only)");
  verify_cmd->add_option("--override-width", verify_flags.override_width,
                         "override the plan width (negative testing only)");
  add_format_flag(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Format format = parse_format(format_name);
    if (plan_cmd->parsed()) return cmd_plan(plan_flags, format);
    if (table_cmd->parsed()) return cmd_table(table_delta, format);
    if (estimate_cmd->parsed()) return cmd_estimate(estimate_flags, format);
    if (verify_cmd->parsed()) return cmd_verify(verify_flags, format);
    return kExitUsage;
  } catch (const tibs::SourceError& e) {
    std::cerr << "source error: " << e.what()
              << " (trials consumed: " << e.trials_consumed() << ")\n";
    return kExitSource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
