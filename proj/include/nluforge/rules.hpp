#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/gold.hpp"
#include "nluforge/rng.hpp"
#include "nluforge/sample.hpp"

namespace nluforge {

class LlmClient;

enum class RuleStrategy { ENTITY_BOUNDARIES, NUMERICAL, GRANULARITY, PUNCTUATION, NESTING, REVERSE };

inline constexpr std::array<RuleStrategy, 6> kAllRuleStrategies = {
    RuleStrategy::ENTITY_BOUNDARIES, RuleStrategy::NUMERICAL, RuleStrategy::GRANULARITY,
    RuleStrategy::PUNCTUATION,       RuleStrategy::NESTING,   RuleStrategy::REVERSE};

std::string_view to_string(RuleStrategy strategy);
std::optional<RuleStrategy> parse_rule_strategy(std::string_view text);

enum class Transform {
    BoundaryTrim,
    BoundaryExtend,
    KeepFirstK,
    KeepMaxByOrder,
    UnitInclude,
    UnitStrip,
    QuoteInclude,
    QuoteStrip,
    NestedDropInner,
    NestedKeepInner,
    ReverseWithInverse,
};

std::string_view to_string(Transform transform);
std::optional<Transform> parse_transform(std::string_view text);

struct PreferenceRule {
    std::string id;
    RuleStrategy strategy = RuleStrategy::NUMERICAL;
    /// Inserted into the schema block. "{label}" is replaced by the entry name
    /// and "{original}" by the name before a REVERSE rename.
    std::string rule_text;
    /// Empty for rules that only an LLM can apply.
    std::optional<Transform> transform;
    /// k for KeepFirstK, ladder for KeepMaxByOrder.
    std::size_t k = 1;
    std::string ladder;
    /// Explicit predicate -> inverse for ReverseWithInverse; the catalog's
    /// inverse table is used when empty.
    std::map<std::string, std::string> inverses;
    std::set<TaskKind> tasks;
    /// When non-empty the rule only targets these labels.
    std::set<std::string> labels;

    bool deterministic() const { return transform.has_value(); }
    bool operator==(const PreferenceRule&) const = default;
};

/// Shared word lists the transforms consult.
struct RuleLexicon {
    /// Ordered levels, lowest first; each level lists its aliases.
    std::map<std::string, std::vector<std::vector<std::string>>> ladders;
    std::vector<std::string> units;
    std::vector<std::string> title_prefixes;
    std::vector<std::pair<std::string, std::string>> quote_pairs;
    std::map<std::string, std::string> inverses;
    bool operator==(const RuleLexicon&) const = default;
};

class RuleCatalog {
  public:
    static const RuleCatalog& builtin();
    /// Throws InvalidConfig.
    static RuleCatalog from_json(const ojson& doc);
    static RuleCatalog load(const std::filesystem::path& path);

    const std::vector<PreferenceRule>& rules() const { return rules_; }
    const RuleLexicon& lexicon() const { return lexicon_; }
    const PreferenceRule* find(std::string_view id) const;
    /// Deterministic rules of `strategy` that apply to `sample`.
    std::vector<const PreferenceRule*> applicable(RuleStrategy strategy, const UnifiedSample& sample) const;

  private:
    std::vector<PreferenceRule> rules_;
    RuleLexicon lexicon_;
};

/// Labels of `sample` that `rule` would change or annotate, in schema order.
std::vector<std::string> rule_targets(const PreferenceRule& rule, const UnifiedSample& sample,
                                      const RuleLexicon& lexicon);

/// The gold after the rule's transform on `label`. Pure; idempotent for every
/// transform. REVERSE returns items under the inverse name.
GoldLabel transform_gold(const PreferenceRule& rule, const RuleLexicon& lexicon, const UnifiedSample& sample,
                         const std::string& label);

/// A copy of `sample` with transformed gold, the rule text on each targeted
/// schema entry and the original gold in `origin`. Throws NotDeterministic,
/// TaskNotApplicable.
UnifiedSample apply_rule(const PreferenceRule& rule, const UnifiedSample& sample,
                         const RuleLexicon& lexicon = RuleCatalog::builtin().lexicon());

/// One worked example shown in the rule prompt.
struct RuleExemplar {
    std::string text;
    std::string schema;
    ojson label;
    std::string new_rule;
    ojson new_label;
    bool operator==(const RuleExemplar&) const = default;
};

struct StrategyGuide {
    std::string text;
    std::vector<RuleExemplar> exemplars;
};

/// Prompt wording and per-strategy guides.
struct StrategyBook {
    /// "{task}" is replaced by the task name.
    std::string instruction;
    std::string correction;
    std::map<RuleStrategy, StrategyGuide> strategies;

    static const StrategyBook& builtin();
    static StrategyBook from_json(const ojson& doc);
    static StrategyBook load(const std::filesystem::path& path);
    const StrategyGuide& guide(RuleStrategy strategy) const;
};

/// The current items of `label` as the JSON list shown after "Label:".
ojson label_payload(const UnifiedSample& sample, const std::string& label);

/// Fields in the order Instruction, Modification Strategy, Examples, Text,
/// Schema, Label. Throws WrongExemplarCount unless exactly two exemplars.
std::string build_rule_prompt(const UnifiedSample& sample, const std::string& label, RuleStrategy strategy,
                              const std::vector<RuleExemplar>& exemplars,
                              const StrategyBook& book = StrategyBook::builtin());

struct RuleProposal {
    std::string schema_description;
    std::string original_rule;
    std::string new_rule;
    GoldLabel new_gold;
    bool operator==(const RuleProposal&) const = default;
};

/// Throws MissingField, UnparsableLabel, InvalidNewGold.
RuleProposal parse_rule_response(std::string_view text, const UnifiedSample& sample, const std::string& label);

enum class RuleSource { Llm, Fallback, Skip };

std::string_view to_string(RuleSource source);

struct RuleOutcome {
    RuleSource source = RuleSource::Skip;
    std::optional<UnifiedSample> sample;
    std::string label;
    std::size_t llm_calls = 0;
    std::string reason;
};

/// Tasks whose rule samples the LLM path can produce.
bool rule_llm_task(TaskKind task);

/// Prompt, complete, parse; one corrected retry; then a deterministic rule of
/// the same strategy; else Skip. Throws LlmUnavailable, CacheMiss.
RuleOutcome synthesize_rule_sample(const UnifiedSample& sample, RuleStrategy strategy, LlmClient& llm, SeededRng& rng,
                                   const RuleCatalog& catalog = RuleCatalog::builtin(),
                                   const StrategyBook& book = StrategyBook::builtin());

}  // namespace nluforge
