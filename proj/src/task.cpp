#include "nluforge/task.hpp"

#include <algorithm>

namespace nluforge {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<Enum, N>& values) {
    for (Enum value : values) {
        if (to_string(value) == text) return value;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(TaskKind task) {
    switch (task) {
        case TaskKind::NER: return "NER";
        case TaskKind::RE: return "RE";
        case TaskKind::SPO: return "SPO";
        case TaskKind::EE: return "EE";
        case TaskKind::EET: return "EET";
        case TaskKind::EEA: return "EEA";
        case TaskKind::OPENIE: return "OPENIE";
        case TaskKind::KGE: return "KGE";
        case TaskKind::MRC: return "MRC";
        case TaskKind::TC: return "TC";
        case TaskKind::IG: return "IG";
    }
    return "?";
}

std::string_view to_string(Style style) { return style == Style::B ? "B" : "C"; }

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::GUIDELINES: return "GUIDELINES";
        case Strategy::RULES: return "RULES";
        case Strategy::FORMAT: return "FORMAT";
    }
    return "?";
}

std::string_view to_string(OutputFormat format) {
    switch (format) {
        case OutputFormat::JSON: return "JSON";
        case OutputFormat::PLAIN_TEXT: return "PLAIN_TEXT";
        case OutputFormat::MARKDOWN_TABLE: return "MARKDOWN_TABLE";
        case OutputFormat::TUPLE_TEXT: return "TUPLE_TEXT";
    }
    return "?";
}

std::optional<TaskKind> parse_task(std::string_view text) { return lookup(text, kAllTasks); }

std::optional<Style> parse_style(std::string_view text) {
    if (text == "B") return Style::B;
    if (text == "C") return Style::C;
    return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view text) { return lookup(text, kAllStrategies); }

std::optional<OutputFormat> parse_format(std::string_view text) { return lookup(text, kAllFormats); }

bool has_renamable_labels(TaskKind task) {
    switch (task) {
        case TaskKind::OPENIE:
        case TaskKind::MRC:
        case TaskKind::IG: return false;
        default: return true;
    }
}

bool is_event_task(TaskKind task) {
    return task == TaskKind::EE || task == TaskKind::EET || task == TaskKind::EEA;
}

}  // namespace nluforge
