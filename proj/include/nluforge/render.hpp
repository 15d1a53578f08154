#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/sample.hpp"
#include "nluforge/task.hpp"
#include "nluforge/templates.hpp"

namespace nluforge {

/// A finished training record.
struct RenderedInstruction {
    std::string id;
    TaskKind task = TaskKind::NER;
    Style style = Style::B;
    /// Sorted by enumeration order, no repeats.
    std::vector<Strategy> strategies;
    std::string prompt;
    std::string target;
    OutputFormat format = OutputFormat::JSON;
    /// source_id, seed, template, and when present rule_id, mask_map, variant_map.
    ojson provenance = ojson::object();

    bool has(Strategy strategy) const;
    void add(Strategy strategy);
    bool operator==(const RenderedInstruction&) const = default;
};

ojson encode_record(const RenderedInstruction& record);
RenderedInstruction decode_record(const ojson& value);
std::string record_line(const RenderedInstruction& record);

/// Label and role guideline text shown in a schema block, keyed by the name
/// shown in the prompt.
struct SchemaAnnotations {
    std::map<std::string, std::string> descriptions;
    std::map<std::string, std::map<std::string, std::string>> role_descriptions;
    bool show_rules = false;
};

/// One in-context example, already rewritten to the names shown in the prompt.
struct ExampleView {
    std::string input;
    std::optional<std::string> question;
    std::vector<std::string> choices;
    GoldLabel output;
    TaskSchema schema;
};

struct PromptParts {
    OutputFormat format = OutputFormat::JSON;
    SchemaAnnotations annotations;
    std::vector<ExampleView> examples;
};

/// The schema block of a prompt, or null for tasks that have none (MRC,
/// OpenIE).
ojson schema_block(TaskKind task, const TaskSchema& schema, const SchemaAnnotations& annotations);

/// Assembles the full prompt for `shown` (a sample whose schema and gold
/// already carry the names the model sees).
std::string assemble_prompt(const InstructionTemplate& tmpl, const UnifiedSample& shown, const PromptParts& parts);

std::string template_tag(const InstructionTemplate& tmpl);

}  // namespace nluforge
