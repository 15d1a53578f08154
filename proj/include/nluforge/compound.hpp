#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nluforge/dictionary.hpp"
#include "nluforge/formats.hpp"
#include "nluforge/render.hpp"
#include "nluforge/sample.hpp"
#include "nluforge/templates.hpp"

namespace nluforge {

struct GuidelineConfig {
    double use_description = 0.5;
    /// Example count is drawn uniformly from [n_examples_min, n_examples_max].
    std::size_t n_examples_min = 0;
    std::size_t n_examples_max = 4;
    double mask_ratio = 0.15;
    double variant_prob = 0.2;
    std::string placeholder_pattern = "LABEL_{i}";
    /// Typical values appended to a drawn description.
    std::size_t typical_values = 1;

    /// Throws InvalidConfig.
    void validate() const;

    /// Every knob off: compound output reduces to the basic rendering.
    static GuidelineConfig all_off();
};

ojson encode_guideline_config(const GuidelineConfig& config);
/// Missing keys keep their defaults. Throws InvalidConfig.
GuidelineConfig decode_guideline_config(const ojson& value);

/// placeholder -> name it replaced (which may itself be a variant).
using MaskMap = std::map<std::string, std::string>;
/// variant -> original label.
using VariantMap = std::map<std::string, std::string>;

/// The placeholder for 1-based index `i`. Throws InvalidConfig when the
/// pattern has no "{i}" slot.
std::string placeholder_name(const std::string& pattern, std::size_t i);

/// Replaces floor(mask_ratio * n) uniformly chosen entry names with
/// placeholders numbered from 1 in schema order.
std::pair<TaskSchema, MaskMap> mask_labels(const TaskSchema& schema, double mask_ratio, const std::string& pattern,
                                           SeededRng& rng);

/// Each entry independently, with probability variant_prob, takes a name
/// variant from the dictionary. Variants that collide with another entry name
/// are not applied.
std::pair<TaskSchema, VariantMap> apply_label_variants(const TaskSchema& schema, TaskKind task,
                                                       const SchemaDictionary& dict, double variant_prob,
                                                       SeededRng& rng);

/// A sample plus the guideline material chosen for it. Descriptions and
/// examples use original label names; `renames` maps them to shown names.
struct AnnotatedSample {
    UnifiedSample sample;
    TaskSchema shown_schema;
    std::map<std::string, std::string> renames;
    MaskMap mask_map;
    VariantMap variant_map;
    std::map<std::string, std::string> descriptions;
    std::map<std::string, std::map<std::string, std::string>> role_descriptions;
    std::vector<GuidelineExample> examples;
    bool guidelines_injected = false;
    std::uint64_t seed = 0;

    bool operator==(const AnnotatedSample&) const = default;
};

/// The annotated form of a sample with no guideline material.
AnnotatedSample plain_annotation(const UnifiedSample& sample, std::uint64_t seed);

/// Draws descriptions, examples, name variants and masks from independent
/// streams keyed by (seed, sample id, decision). Throws UnknownLabel.
AnnotatedSample inject_guidelines(const UnifiedSample& sample, const SchemaDictionary& dict,
                                  const GuidelineConfig& config, std::uint64_t seed);

/// Style C rendering. Empty gold is written with the canonical empty token
/// unless `empty_weights` is given. Throws UnsupportedFormat,
/// TemplateTaskMismatch, TaskNotApplicable, EmptySchema.
RenderedInstruction render_compound(const AnnotatedSample& annotated, TemplateId id, OutputFormat format,
                                    const EmptyWeights* empty_weights = nullptr,
                                    const TemplatePack& pack = TemplatePack::builtin());

/// Maps shown label names in `gold` back to the original names.
GoldLabel unmask_gold(const GoldLabel& gold, const MaskMap& mask_map, const VariantMap& variant_map);

ojson encode_name_map(const std::map<std::string, std::string>& map);

}  // namespace nluforge
