#include "tibs/serialize.hpp"

namespace tibs {

using nlohmann::json;

json plan_to_json(const Plan& plan) {
  json j;
  if (plan.spec) {
    j["spec"] = {{"alpha", plan.spec->alpha},
                 {"beta", plan.spec->beta},
                 {"delta", plan.spec->delta}};
    j["variant"] = to_string(plan.variant);
  } else {
    j["spec"] = nullptr;
  }
  j["a_bound"] = plan.a_bound;
  j["b_bound"] = plan.b_bound;
  j["length"] = plan.length;
  j["width"] = plan.width;
  j["n_max"] = plan.n_max;
  j["k_threshold"] = plan.k_threshold;
  return j;
}

json estimation_to_json(const EstimationResult& result) {
  json j;
  j["m"] = result.m;
  j["successes"] = result.successes;
  j["p_hat"] = result.p_hat();
  j["stop_reason"] = to_string(result.stop_reason);
  j["truncated"] = result.truncated;
  if (result.seed)
    j["seed"] = *result.seed;
  else
    j["seed"] = nullptr;
  j["plan"] = plan_to_json(result.plan);
  return j;
}

json criterion_to_json(const CriterionSpec& crit) {
  json j;
  j["mode"] = to_string(crit.mode);
  if (crit.mode != CriterionMode::relative) j["alpha"] = crit.alpha;
  if (crit.mode != CriterionMode::absolute) j["beta"] = crit.beta;
  return j;
}

json coverage_to_json(const CoverageReport& report) {
  json j;
  j["p_true"] = report.p_true;
  j["coverage"] = report.coverage;
  j["expected_m"] = report.expected_m;
  j["method"] = to_string(report.method);
  j["n_max"] = report.n_max;
  j["k_threshold"] = report.k_threshold;
  j["criterion"] = criterion_to_json(report.criterion);
  return j;
}

}  // namespace tibs
