#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/compound.hpp"
#include "nluforge/dictionary.hpp"
#include "nluforge/formats.hpp"
#include "nluforge/llm.hpp"
#include "nluforge/mixer.hpp"
#include "nluforge/render.hpp"
#include "nluforge/rules.hpp"
#include "nluforge/sample.hpp"
#include "nluforge/templates.hpp"

namespace nluforge {

inline constexpr const char* kToolVersion = "0.1.0";

struct MixSettings {
    std::optional<std::size_t> total;
    TaskShares shares = hum_task_shares();
    StyleSplit style;
    StrategyRatios ratios = hum_strategy_ratios();
};

struct PipelinePaths {
    std::filesystem::path corpus_in;
    std::filesystem::path corpus_out;
    std::filesystem::path dictionary;
    std::filesystem::path rule_catalog;
    std::filesystem::path strategy_book;
    std::filesystem::path template_pack;
    std::filesystem::path stats_out;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    PipelinePaths paths;
    GuidelineConfig guidelines;
    EmptyWeights empty_weights;
    /// Rule records go through the LLM proposal path for tasks it supports.
    bool rules_use_llm = false;
    MixSettings mix;
    LlmSettings llm;
    std::size_t workers = 1;
};

/// Relative paths resolve against `base_dir`. "seed" is required. Throws
/// InvalidConfig.
PipelineConfig decode_pipeline_config(const ojson& doc, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
/// Never includes the API key.
ojson encode_pipeline_config(const PipelineConfig& config);

/// Throws InvalidConfig naming the first referenced input that is missing.
void validate_inputs(const PipelineConfig& config);

/// SHA-256 of the encoded config.
std::string config_digest(const PipelineConfig& config);

LlmSettings decode_llm_settings(const ojson& value, LlmSettings base = {});
ojson encode_llm_settings(const LlmSettings& settings);

/// Everything synthesis reads besides the samples.
struct SynthesisContext {
    const SchemaDictionary* dict = nullptr;
    const RuleCatalog* catalog = &RuleCatalog::builtin();
    const StrategyBook* book = &StrategyBook::builtin();
    const TemplatePack* pack = &TemplatePack::builtin();
    /// Needed when rules_use_llm is set.
    LlmClient* llm = nullptr;
};

struct SynthesisCounts {
    std::size_t samples = 0;
    std::size_t records = 0;
    /// Candidates not produced, by pool tag ("NER/C/RULES", ...).
    std::map<std::string, std::size_t> skipped;
    std::size_t llm_rule_samples = 0;
    bool operator==(const SynthesisCounts&) const = default;
};

/// The candidate records of one sample: "#B" always; "#C-G", "#C-F" and
/// "#C-R" where the strategy is available and produced something.
std::vector<RenderedInstruction> synthesize_sample(const UnifiedSample& sample, const PipelineConfig& config,
                                                   const SynthesisContext& ctx, SynthesisCounts* counts = nullptr);

/// Candidates for every sample on `config.workers` threads, in sample order.
/// Throws the first failure by sample index.
std::vector<RenderedInstruction> synthesize(std::span<const UnifiedSample> samples, const PipelineConfig& config,
                                            const SynthesisContext& ctx, SynthesisCounts* counts = nullptr);

struct MixOutcome {
    MixPlan plan;
    std::vector<RenderedInstruction> records;
    CorpusStats stats;
};

/// Dedup, then plan and execute with the configured shares and seed.
/// `total` defaults to mix.total, else to every deduplicated candidate that
/// the plan can draw.
MixOutcome mix(std::vector<RenderedInstruction> candidates, const PipelineConfig& config,
               std::optional<std::size_t> total = std::nullopt);

/// The largest total the pools can satisfy under the configured shares.
std::size_t max_feasible_total(const Pools& pools, const PipelineConfig& config);

/// The header object written as the first line of every output file.
ojson provenance_header(const PipelineConfig& config);
ojson provenance_header(const std::string& config_digest, std::uint64_t seed);

/// Header line, then one record per line.
void write_records(const std::filesystem::path& path, std::span<const RenderedInstruction> records,
                   const ojson& header);
std::vector<RenderedInstruction> read_records(const std::filesystem::path& path);

/// Header line, then one sample per line.
void write_samples(const std::filesystem::path& path, std::span<const UnifiedSample> samples, const ojson& header);

/// Writes `doc` with a "__provenance__" member first.
void write_json_report(const std::filesystem::path& path, const ojson& doc, const ojson& header);

}  // namespace nluforge
