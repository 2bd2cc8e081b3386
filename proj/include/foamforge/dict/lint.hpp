#pragma once

#include <set>
#include <string>
#include <vector>

#include "foamforge/core/types.hpp"
#include "foamforge/dict/dict.hpp"

namespace foamforge::dict {

enum class InconsistencyKind {
    missing_field_reference,
    dimension_mismatch,
    solver_mismatch,
    boundary_patch_mismatch,
};

std::string inconsistency_kind_name(InconsistencyKind k);

struct Inconsistency {
    InconsistencyKind kind;
    std::string detail;
    std::vector<std::string> files;

    bool operator==(const Inconsistency&) const = default;
};

/// A file that failed to parse during linting. Collected, never aborting.
struct ParseFailure {
    std::string file;
    std::string message;

    bool operator==(const ParseFailure&) const = default;
};

struct LintReport {
    std::vector<Inconsistency> issues;
    std::vector<ParseFailure> parse_failures;

    bool clean() const { return issues.empty() && parse_failures.empty(); }
};

/// Static consistency checks over a generated case:
///   - dimension_mismatch: every [ ... ] dimension set has 7 components
///   - missing_field_reference: $macro references resolve within the file
///   - solver_mismatch: controlDict application matches the descriptor
///   - boundary_patch_mismatch: patches referenced by 0/ field files exist
///     in the boundary set (from blockMeshDict or known_boundaries); the
///     rule is skipped when no boundary set is available
/// Files that fail to parse are reported in parse_failures and excluded
/// from the rules.
LintReport lint_case(const std::vector<core::FoamFile>& files,
                     const core::CaseDescriptor& descriptor,
                     const std::set<std::string>& known_boundaries = {});

}  // namespace foamforge::dict
