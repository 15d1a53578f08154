#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/gold.hpp"
#include "nluforge/rng.hpp"
#include "nluforge/sample.hpp"

namespace nluforge {

class LlmClient;

enum class Origin { Curated, LlmGenerated, Mined };

std::string_view to_string(Origin origin);
std::optional<Origin> parse_origin(std::string_view text);

/// A mined in-context example: the source sample's input and the gold fragment
/// for one label, with the schema it validates against.
struct GuidelineExample {
    std::string source_id;
    std::string input;
    TaskSchema schema;
    GoldLabel output;
    bool operator==(const GuidelineExample&) const = default;
};

struct RoleGuideline {
    std::string role;
    std::vector<std::string> descriptions;
    std::vector<std::string> typical_values;
    bool operator==(const RoleGuideline&) const = default;
};

struct GuidelineEntry {
    std::string label;
    TaskKind task = TaskKind::NER;
    std::vector<std::string> descriptions;
    /// Parallel to descriptions.
    std::vector<Origin> description_origins;
    std::vector<std::string> name_variants;
    std::vector<GuidelineExample> positive_examples;
    std::vector<GuidelineExample> negative_examples;
    std::vector<std::string> typical_values;
    std::vector<RoleGuideline> roles;

    const RoleGuideline* role(std::string_view name) const;
    bool operator==(const GuidelineEntry&) const = default;
};

using DictKey = std::pair<TaskKind, std::string>;

struct SchemaDictionary {
    std::map<DictKey, GuidelineEntry> entries;
    std::int64_t version = 0;
    /// "TASK/label" -> where the entry's material came from.
    std::map<std::string, Origin> provenance;

    const GuidelineEntry* find(TaskKind task, std::string_view label) const;
    bool operator==(const SchemaDictionary&) const = default;
};

std::string dict_key_tag(TaskKind task, std::string_view label);

/// Curated label synonyms: label -> variants.
using SynonymTable = std::map<std::string, std::vector<std::string>>;

SynonymTable builtin_synonyms();
SynonymTable load_synonyms(const std::filesystem::path& path);

struct BuildConfig {
    std::uint64_t seed = 0;
    std::size_t max_positive = 5;
    std::size_t max_negative = 5;
    std::size_t max_typical_values = 5;
    SynonymTable synonyms = builtin_synonyms();
};

/// One entry per (task, label) seen in the corpus. Examples are kept by seeded
/// reservoir sampling. Throws EmptyCorpus.
SchemaDictionary build_dictionary(std::span<const UnifiedSample> corpus, const BuildConfig& config);

/// Adds up to `n_variants` LLM-written descriptions per entry. Throws
/// LlmUnavailable, CacheMiss.
SchemaDictionary enrich_descriptions(const SchemaDictionary& dict, LlmClient& llm, std::size_t n_variants);

/// The prompt used to ask for description variant `variant` (0-based).
std::string description_prompt(const GuidelineEntry& entry, std::size_t variant);

struct GuidelineSelector {
    bool description = false;
    std::size_t positive = 0;
    std::size_t negative = 0;
    bool name_variant = false;
    /// Examples mined from this sample are never returned.
    std::string exclude_id;
};

struct GuidelineBundle {
    std::optional<std::string> description;
    /// Positive and negative examples interleaved, positive first.
    std::vector<GuidelineExample> examples;
    std::optional<std::string> name_variant;
    bool operator==(const GuidelineBundle&) const = default;
};

/// Throws UnknownLabel.
GuidelineBundle sample_guidelines(const SchemaDictionary& dict, TaskKind task, std::string_view label, SeededRng& rng,
                                  const GuidelineSelector& wants);

ojson encode_dictionary(const SchemaDictionary& dict);
SchemaDictionary decode_dictionary(const ojson& doc);
void save_dictionary(const SchemaDictionary& dict, const std::filesystem::path& path);
SchemaDictionary load_dictionary(const std::filesystem::path& path);

}  // namespace nluforge
