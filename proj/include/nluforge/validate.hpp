#pragma once

#include <string>
#include <vector>

#include "nluforge/sample.hpp"

namespace nluforge {

enum class ViolationKind {
    EmptyId,
    GoldTaskMismatch,
    SchemaKindMismatch,
    DuplicateSchemaName,
    SchemaMismatch,
    SpoTypeConstraint,
    TriggerPlacement,
    ArgumentPlacement,
    EmptySpan,
    DuplicateRole,
    MrcSchema,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string field;
    std::string detail;
};

/// Checks every type invariant of a sample. Violations are data.
std::vector<Violation> validate_sample(const UnifiedSample& sample);

/// Checks only gold-against-schema agreement for a task (used for
/// fragments and LLM-proposed labels).
std::vector<Violation> validate_gold(const GoldLabel& gold, TaskKind task, const TaskSchema& schema);

}  // namespace nluforge
