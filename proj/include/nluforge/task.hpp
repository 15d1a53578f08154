#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace nluforge {

enum class TaskKind { NER, RE, SPO, EE, EET, EEA, OPENIE, KGE, MRC, TC, IG };

inline constexpr std::array<TaskKind, 11> kAllTasks = {
    TaskKind::NER, TaskKind::RE,     TaskKind::SPO, TaskKind::EE,  TaskKind::EET, TaskKind::EEA,
    TaskKind::OPENIE, TaskKind::KGE, TaskKind::MRC, TaskKind::TC,  TaskKind::IG};

enum class Style { B, C };

enum class Strategy { GUIDELINES, RULES, FORMAT };

inline constexpr std::array<Strategy, 3> kAllStrategies = {Strategy::GUIDELINES, Strategy::RULES,
                                                           Strategy::FORMAT};

enum class OutputFormat { JSON, PLAIN_TEXT, MARKDOWN_TABLE, TUPLE_TEXT };

inline constexpr std::array<OutputFormat, 4> kAllFormats = {
    OutputFormat::JSON, OutputFormat::PLAIN_TEXT, OutputFormat::MARKDOWN_TABLE,
    OutputFormat::TUPLE_TEXT};

std::string_view to_string(TaskKind task);
std::string_view to_string(Style style);
std::string_view to_string(Strategy strategy);
std::string_view to_string(OutputFormat format);

std::optional<TaskKind> parse_task(std::string_view text);
std::optional<Style> parse_style(std::string_view text);
std::optional<Strategy> parse_strategy(std::string_view text);
std::optional<OutputFormat> parse_format(std::string_view text);

/// Enumeration index, used for deterministic ordering and tie-breaking.
constexpr std::size_t index_of(TaskKind task) { return static_cast<std::size_t>(task); }

/// Tasks whose gold is built around top-level schema names that guideline
/// paraphrasing (variants, masking) may rewrite.
bool has_renamable_labels(TaskKind task);

bool is_event_task(TaskKind task);

}  // namespace nluforge
