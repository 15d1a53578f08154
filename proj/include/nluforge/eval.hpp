#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/gold.hpp"
#include "nluforge/render.hpp"
#include "nluforge/sample.hpp"

namespace nluforge {

class LlmClient;
struct SchemaDictionary;

enum class Metric { MICRO_F1, TRIGGER_ARG_F1, CHOICE_ACC, LABEL_ACC };

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view text);

/// The metric a task is scored with.
Metric metric_for(TaskKind task);

struct EvalTask {
    std::string name;
    TaskKind task = TaskKind::NER;
    Style style = Style::B;
    Metric metric = Metric::MICRO_F1;
};

/// A prediction, or nullopt for a parse failure.
using Prediction = std::optional<GoldLabel>;

struct Extraction {
    Prediction gold;
    OutputFormat format = OutputFormat::JSON;
    std::string error;
    bool ok() const { return gold.has_value(); }
};

/// Tries JSON, MARKDOWN_TABLE, TUPLE_TEXT then PLAIN_TEXT (those the task
/// supports) on the output with fences and surrounding prose removed. A
/// non-JSON reading whose labels are all outside the schema is rejected.
/// Never throws for bad model output.
Extraction tolerant_extract(std::string_view output, TaskKind task, const TaskSchema& schema);

struct Prf {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t tp = 0, fp = 0, fn = 0;
};

/// Micro P/R/F1 over exact tuples (set semantics per instance). A failed
/// prediction adds its gold tuples to fn. When there are no tuples at all the
/// scores are 1. Throws LengthMismatch, TaskNotApplicable.
Prf score_micro_f1(std::span<const GoldLabel> gold, std::span<const Prediction> pred, TaskKind task);

struct EventScores {
    Prf trigger;
    Prf argument;
};

/// Trigger tuples (type, trigger); argument tuples (type, role, value) with
/// NAN left out and lists flattened. Throws LengthMismatch.
EventScores score_event(std::span<const GoldLabel> gold, std::span<const Prediction> pred);

/// Share of items whose trimmed prediction equals the gold choice. Throws
/// LengthMismatch, GoldNotInChoices.
double score_choice(std::span<const std::string> gold, std::span<const std::optional<std::string>> pred,
                    std::span<const std::vector<std::string>> choices);

/// Share of exact label matches. Throws LengthMismatch.
double score_label(std::span<const std::string> gold, std::span<const std::optional<std::string>> pred);

struct EvalItem {
    UnifiedSample sample;
    RenderedInstruction rendered;
};

/// Renders samples in the given style: B with the basic template, C with a
/// description and examples from `dict` and no masking or variants.
std::vector<EvalItem> prepare_eval_items(std::span<const UnifiedSample> samples, Style style,
                                         const SchemaDictionary* dict, std::uint64_t seed);

struct EvalReport {
    std::string name;
    TaskKind task = TaskKind::NER;
    Style style = Style::B;
    Metric metric = Metric::MICRO_F1;
    std::size_t n = 0;
    std::size_t parse_failures = 0;
    bool undefined = false;
    Prf prf;
    EventScores events;
    double accuracy = 0;
};

/// Throws StyleMismatch, TaskMismatch, InvalidConfig; LLM errors propagate.
EvalReport run_eval(const EvalTask& spec, std::span<const EvalItem> items, LlmClient& model);

ojson encode_report(const EvalReport& report);
std::string report_table(const std::vector<EvalReport>& reports);

}  // namespace nluforge
