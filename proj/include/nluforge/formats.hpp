#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/gold.hpp"
#include "nluforge/rng.hpp"
#include "nluforge/schema.hpp"
#include "nluforge/task.hpp"

namespace nluforge {

/// Legal serializations of an empty answer.
enum class EmptyCandidate { EmptyList, Nan, EmptyString };

std::string_view to_string(EmptyCandidate candidate);

/// Draw weights for empty-result candidates. Zero disables a candidate.
struct EmptyWeights {
    double empty_list = 1.0;
    double nan = 1.0;
    double empty_string = 1.0;
};

bool format_supported(TaskKind task, OutputFormat format);
std::vector<OutputFormat> supported_formats(TaskKind task);
/// TUPLE_TEXT for OPENIE, JSON for every other structured task.
OutputFormat default_format(TaskKind task);

std::vector<EmptyCandidate> legal_empty_candidates(TaskKind task, OutputFormat format);

/// The literal text of an empty candidate for a (task, format, schema).
std::string empty_candidate_text(EmptyCandidate candidate, TaskKind task, OutputFormat format,
                                 const TaskSchema& schema);

/// Weighted draw among the legal candidates. Throws NoLegalCandidate when no
/// legal candidate has positive weight.
EmptyCandidate choose_empty_candidate(TaskKind task, OutputFormat format, const EmptyWeights& weights,
                                      SeededRng& rng);

std::string choose_empty(TaskKind task, OutputFormat format, const EmptyWeights& weights, SeededRng& rng,
                         const TaskSchema& schema);

/// Canonical serialization. Empty gold uses the empty-list token. Throws
/// UnsupportedFormat.
std::string serialize(const GoldLabel& gold, TaskKind task, OutputFormat format, const TaskSchema& schema);

/// As above, but empty gold is serialized through choose_empty.
std::string serialize(const GoldLabel& gold, TaskKind task, OutputFormat format, const TaskSchema& schema,
                      const EmptyWeights& weights, SeededRng& rng);

/// The JSON value of the default JSON serialization, for embedding inside
/// JSON prompts (examples blocks).
ojson to_json_value(const GoldLabel& gold, TaskKind task, const TaskSchema& schema);

struct ParsedGold {
    GoldLabel gold;
    /// Top-level labels present in the text but absent from the schema. They
    /// are kept in `gold`; scoring decides what to do with them.
    std::vector<std::string> unknown_labels;
};

/// Inverse of serialize on its image. Tolerates surrounding whitespace and
/// code fences. Throws Error(ParseFailure) with a position in the message.
ParsedGold parse(std::string_view text, TaskKind task, OutputFormat format, const TaskSchema& schema);

/// The sentence that tells the model which output format to use.
std::string format_directive(TaskKind task, OutputFormat format, std::string_view language = "en");

/// Removes a surrounding ``` fence (with optional language tag) and outer
/// whitespace.
std::string strip_code_fence(std::string_view text);

std::string trim(std::string_view text);

}  // namespace nluforge
