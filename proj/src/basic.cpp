#include "nluforge/basic.hpp"

#include <algorithm>

#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"

namespace nluforge {

SchemaAnnotations basic_annotations(const UnifiedSample& sample) {
    SchemaAnnotations ann;
    if (sample.task != TaskKind::EET) return ann;
    const bool all = std::all_of(sample.schema.entries.begin(), sample.schema.entries.end(),
                                 [](const SchemaEntry& e) { return e.description.has_value(); });
    if (!all) return ann;
    for (const auto& e : sample.schema.entries) ann.descriptions[e.name] = *e.description;
    return ann;
}

RenderedInstruction render_basic(const UnifiedSample& sample, TemplateId id, std::uint64_t seed,
                                 const TemplatePack& pack) {
    if (id.task != sample.task) {
        throw Error(ErrorCode::TemplateTaskMismatch, "template for " + std::string(to_string(id.task)) +
                                                         " used on " + std::string(to_string(sample.task)) +
                                                         " sample " + sample.id);
    }
    if (sample.task == TaskKind::IG) return render_ig(sample);
    if (sample.schema.empty()) throw Error(ErrorCode::EmptySchema, "sample " + sample.id);

    const InstructionTemplate& tmpl = pack.get(id, sample.language);
    PromptParts parts;
    parts.format = default_format(sample.task);
    parts.annotations = basic_annotations(sample);

    RenderedInstruction out;
    out.id = sample.id + "#B";
    out.task = sample.task;
    out.style = Style::B;
    out.format = parts.format;
    out.prompt = assemble_prompt(tmpl, sample, parts);
    out.target = serialize(sample.gold, sample.task, parts.format, sample.schema);
    out.provenance = ojson{{"source_id", sample.id}, {"seed", seed}, {"template", template_tag(tmpl)}};
    return out;
}

RenderedInstruction render_ig(const UnifiedSample& sample) {
    if (sample.task != TaskKind::IG) throw Error(ErrorCode::TaskMismatch, "render_ig on " + std::string(to_string(sample.task)));
    const auto* response = std::get_if<FreeResponse>(&sample.gold);
    if (response == nullptr) throw Error(ErrorCode::TaskMismatch, "IG sample without free response: " + sample.id);
    if (response->text.empty()) throw Error(ErrorCode::EmptyTarget, "sample " + sample.id);

    RenderedInstruction out;
    out.id = sample.id + "#B";
    out.task = TaskKind::IG;
    out.style = Style::B;
    out.format = OutputFormat::PLAIN_TEXT;
    out.prompt = sample.text;
    out.target = response->text;
    out.provenance = ojson{{"source_id", sample.id}};
    return out;
}

}  // namespace nluforge
