#pragma once

#include <cstdint>

#include "nluforge/render.hpp"
#include "nluforge/sample.hpp"
#include "nluforge/templates.hpp"

namespace nluforge {

/// Style B rendering: instruction sentence, schema block and input, target in
/// the task's default format. `seed` is recorded in the provenance.
/// Throws TemplateTaskMismatch, EmptySchema.
RenderedInstruction render_basic(const UnifiedSample& sample, TemplateId id, std::uint64_t seed,
                                 const TemplatePack& pack = TemplatePack::builtin());

/// Pass-through for instruction-generalist samples: prompt is the text, target
/// the free response. Throws TaskMismatch, EmptyTarget.
RenderedInstruction render_ig(const UnifiedSample& sample);

/// Schema annotations a basic prompt shows: source descriptions for EET (the
/// only task whose basic schema block is a name-to-description map), nothing
/// else.
SchemaAnnotations basic_annotations(const UnifiedSample& sample);

}  // namespace nluforge
