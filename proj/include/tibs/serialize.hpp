#pragma once

#include <json.hpp>

#include "tibs/bounds.hpp"
#include "tibs/engine.hpp"
#include "tibs/oracle.hpp"

namespace tibs {

// JSON records for the domain types. Doubles serialize with the shortest
// representation that re-parses to the identical value, and keys render in a
// fixed (alphabetical) order, so equal inputs produce byte-equal documents.

nlohmann::json plan_to_json(const Plan& plan);

nlohmann::json estimation_to_json(const EstimationResult& result);

nlohmann::json criterion_to_json(const CriterionSpec& crit);

// Keys: p_true, coverage, expected_m, method, n_max, k_threshold, criterion.
nlohmann::json coverage_to_json(const CoverageReport& report);

}  // namespace tibs
