#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nluforge/codec.hpp"
#include "nluforge/render.hpp"
#include "nluforge/task.hpp"

namespace nluforge {

using TaskShares = std::map<TaskKind, double>;

/// Task shares of the Hum corpus.
TaskShares hum_task_shares();

struct StyleSplit {
    double basic = 0.55;
    double compound = 0.45;
    bool operator==(const StyleSplit&) const = default;
};

/// Relative weight of each strategy class among compound records.
using StrategyRatios = std::map<Strategy, double>;

/// Hum counts of guideline, rule and format records.
StrategyRatios hum_strategy_ratios();

/// Whether the pipeline can produce compound records of `strategy` for `task`.
bool strategy_available(TaskKind task, Strategy strategy);

/// Hamilton apportionment: floors, then remaining seats by largest remainder,
/// ties to the lower index. Throws InvalidDistribution for negative, NaN or
/// all-zero weights (unless total is 0).
std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights);

/// One sampling pool. Style B pools have no strategy.
struct PoolKey {
    TaskKind task = TaskKind::NER;
    Style style = Style::B;
    std::optional<Strategy> strategy;

    std::string tag() const;
    auto operator<=>(const PoolKey&) const = default;
};

/// The pool a synthesized record belongs to, from its id suffix
/// ("#B", "#C-G", "#C-F", "#C-R").
PoolKey pool_of(const RenderedInstruction& record);

struct MixPlan {
    std::size_t total = 0;
    std::uint64_t seed = 0;
    TaskShares task_share;
    StyleSplit style;
    std::map<TaskKind, std::size_t> per_task_counts;
    std::map<Strategy, std::size_t> strategy_targets;
    std::map<PoolKey, std::size_t> quotas;
};

/// Throws InvalidDistribution when shares are not a distribution.
MixPlan plan(std::size_t total, const TaskShares& shares, const StyleSplit& style, std::uint64_t seed,
             const StrategyRatios& ratios = hum_strategy_ratios());

ojson encode_plan(const MixPlan& plan);

struct CorpusStats {
    std::size_t total = 0;
    std::size_t compound = 0;
    std::map<TaskKind, std::size_t> by_task;
    std::map<Style, std::size_t> by_style;
    std::map<Strategy, std::size_t> by_strategy;
    std::map<OutputFormat, std::size_t> by_format;
    std::size_t dedup_removed = 0;
    std::uint64_t seed = 0;
    bool operator==(const CorpusStats&) const = default;
};

/// Exact counts; a record with several strategy flags counts under each.
CorpusStats stats(std::span<const RenderedInstruction> corpus);

ojson encode_stats(const CorpusStats& stats);
CorpusStats decode_stats(const ojson& value);

/// Human-readable table; shares against `plan` when given.
std::string stats_table(const CorpusStats& stats, const MixPlan* plan = nullptr);

using Pools = std::map<PoolKey, std::vector<RenderedInstruction>>;

/// Groups records by pool_of, keeping input order.
Pools group_pools(std::span<const RenderedInstruction> records);

/// Seeded sampling without replacement per pool, merged in (task, id) order.
/// Throws PoolExhausted listing every short pool.
std::vector<RenderedInstruction> execute(const MixPlan& plan, const Pools& pools, std::uint64_t seed,
                                         CorpusStats* out_stats = nullptr);

struct DedupResult {
    std::vector<RenderedInstruction> records;
    std::size_t removed = 0;
};

/// Drops records whose (task, prompt, target) repeats; first wins.
DedupResult dedup(std::vector<RenderedInstruction> records);

}  // namespace nluforge
