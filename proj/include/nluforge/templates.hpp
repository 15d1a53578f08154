#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/task.hpp"

namespace nluforge {

struct TemplateId {
    TaskKind task = TaskKind::NER;
    std::size_t index = 0;
    bool operator==(const TemplateId&) const = default;
};

enum class PromptLayout {
    Json,  // compact JSON object of instruction / schema / ... / input fields
    Text,  // sentence followed by "\nInput:" and the text
};

/// One instruction template. `sentence` holds a {directive} placeholder that
/// receives the format directive.
struct InstructionTemplate {
    TaskKind task = TaskKind::NER;
    std::size_t index = 0;
    std::string language = "en";
    PromptLayout layout = PromptLayout::Json;
    std::string sentence;
    /// Per-format replacement for the default directive text.
    std::map<OutputFormat, std::string> directives;
    /// Extra "output_format" field shown with JSON targets.
    std::optional<ojson> output_format;
    /// Appended to the sentence when an examples block is present.
    std::string examples_suffix = "You can refer to the example for extraction.";

    /// The sentence with the directive for `format` filled in.
    std::string instruction(OutputFormat format) const;
};

class TemplatePack {
  public:
    static const TemplatePack& builtin();
    static TemplatePack from_json(const ojson& doc);
    static TemplatePack load(const std::filesystem::path& path);

    /// Templates available for (task, language); falls back to "en" with a
    /// logged warning when the language has none.
    std::size_t count(TaskKind task, std::string_view language) const;

    /// Throws TemplateTaskMismatch when the id has no template for the task.
    const InstructionTemplate& get(TemplateId id, std::string_view language) const;

    const std::vector<InstructionTemplate>& all() const { return templates_; }

  private:
    std::string_view resolve_language(TaskKind task, std::string_view language) const;

    std::vector<InstructionTemplate> templates_;
};

}  // namespace nluforge
