#pragma once

#include <vector>

#include "foamforge/core/types.hpp"

namespace foamforge::core {

/// Validates plan-level invariants: unique (file, folder) pairs and
/// dependencies that reference files within the plan. Throws
/// ValidationError on violation.
void validate_plan(const SimulationPlan& plan);

/// Orders the plan for generation. With file dependencies enabled the
/// result is the canonical topological order: among all valid orders, the
/// lexicographically smallest under the per-file key
/// (folder rank, plan index). With dependencies disabled the plan order is
/// returned unchanged. Throws CyclicDependency when no valid order exists.
std::vector<PlannedFile> generation_order(const SimulationPlan& plan,
                                          bool file_dependency_enabled);

}  // namespace foamforge::core
