#include "nluforge/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "nluforge/digest.hpp"
#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"
#include "nluforge/rng.hpp"
#include "nluforge/rules.hpp"

namespace nluforge {

TaskShares hum_task_shares() {
    return {{TaskKind::NER, 0.23}, {TaskKind::RE, 0.29},     {TaskKind::SPO, 0.11}, {TaskKind::EE, 0.05},
            {TaskKind::EET, 0.03}, {TaskKind::EEA, 0.02},    {TaskKind::OPENIE, 0.04}, {TaskKind::KGE, 0.12},
            {TaskKind::MRC, 0.02}, {TaskKind::TC, 0.01},     {TaskKind::IG, 0.08}};
}

StrategyRatios hum_strategy_ratios() {
    return {{Strategy::GUIDELINES, 1152470.0}, {Strategy::RULES, 34770.0}, {Strategy::FORMAT, 108091.0}};
}

bool strategy_available(TaskKind task, Strategy strategy) {
    if (task == TaskKind::IG) return false;
    switch (strategy) {
        case Strategy::GUIDELINES: return true;
        case Strategy::RULES:
            for (const auto& r : RuleCatalog::builtin().rules())
                if (r.deterministic() && r.tasks.count(task)) return true;
            return rule_llm_task(task);
        case Strategy::FORMAT: return supported_formats(task).size() > 1;
    }
    return false;
}

namespace {

long double snap_eps(long double magnitude) { return std::max(1e-9L, 1e-15L * magnitude); }

}  // namespace

std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights) {
    std::vector<std::size_t> seats(weights.size(), 0);
    if (total == 0) return seats;
    long double sum = 0;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidDistribution, "weights must be finite and >= 0");
        sum += w;
    }
    if (sum <= 0) throw Error(ErrorCode::InvalidDistribution, "weights sum to zero");

    std::vector<long double> rest(weights.size());
    std::size_t given = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        long double quota = static_cast<long double>(total) * weights[i] / sum;
        const long double nearest = std::round(quota);
        // Products like 0.23 * 100 land a hair off the integer. The slack only
        // covers rounding in the shares, never a real fractional part.
        if (std::fabs(quota - nearest) < snap_eps(quota)) quota = nearest;
        const auto floor = std::floor(quota);
        seats[i] = static_cast<std::size_t>(floor);
        rest[i] = quota - floor;
        given += seats[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (std::fabs(rest[a] - rest[b]) < snap_eps(total)) return false;
        return rest[a] > rest[b];
    });
    for (std::size_t k = 0; given < total; ++k, ++given) ++seats[order[k % order.size()]];
    return seats;
}

std::string PoolKey::tag() const {
    std::string out = std::string(to_string(task)) + "/" + std::string(to_string(style));
    if (strategy) out += "/" + std::string(to_string(*strategy));
    return out;
}

PoolKey pool_of(const RenderedInstruction& record) {
    PoolKey key{record.task, record.style, std::nullopt};
    if (record.style == Style::B) return key;
    const auto hash = record.id.rfind('#');
    const auto suffix = hash == std::string::npos ? std::string() : record.id.substr(hash);
    if (suffix == "#C-F")
        key.strategy = Strategy::FORMAT;
    else if (suffix == "#C-R")
        key.strategy = Strategy::RULES;
    else
        key.strategy = Strategy::GUIDELINES;
    return key;
}

MixPlan plan(std::size_t total, const TaskShares& shares, const StyleSplit& style, std::uint64_t seed,
             const StrategyRatios& ratios) {
    double sum = 0;
    for (const auto& [task, share] : shares) {
        if (!(share >= 0) || !std::isfinite(share))
            throw Error(ErrorCode::InvalidDistribution, "share of " + std::string(to_string(task)) + " is invalid");
        sum += share;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidDistribution, "task shares sum to " + std::to_string(sum));
    if (!(style.basic >= 0) || !(style.compound >= 0) || std::fabs(style.basic + style.compound - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidDistribution, "style split must sum to 1");

    MixPlan p;
    p.total = total;
    p.seed = seed;
    p.task_share = shares;
    p.style = style;

    std::vector<double> weights;
    for (auto task : kAllTasks) {
        auto it = shares.find(task);
        weights.push_back(it == shares.end() ? 0.0 : it->second);
    }
    const auto counts = largest_remainder(total, weights);
    const std::array<double, 2> split{style.basic, style.compound};
    for (std::size_t t = 0; t < kAllTasks.size(); ++t) {
        const auto task = kAllTasks[t];
        p.per_task_counts[task] = counts[t];
        if (task == TaskKind::IG) {
            p.quotas[{task, Style::B, std::nullopt}] = counts[t];
            continue;
        }
        const auto bc = largest_remainder(counts[t], split);
        p.quotas[{task, Style::B, std::nullopt}] = bc[0];

        std::vector<double> sw;
        for (auto s : kAllStrategies) {
            auto it = ratios.find(s);
            sw.push_back(strategy_available(task, s) && it != ratios.end() ? it->second : 0.0);
        }
        const auto per_strategy = largest_remainder(bc[1], sw);
        for (std::size_t i = 0; i < kAllStrategies.size(); ++i) {
            p.quotas[{task, Style::C, kAllStrategies[i]}] = per_strategy[i];
            p.strategy_targets[kAllStrategies[i]] += per_strategy[i];
        }
    }
    return p;
}

ojson encode_plan(const MixPlan& plan) {
    ojson tasks = ojson::object();
    for (auto task : kAllTasks) tasks[std::string(to_string(task))] = plan.per_task_counts.at(task);
    ojson strategies = ojson::object();
    for (auto s : kAllStrategies) {
        auto it = plan.strategy_targets.find(s);
        strategies[std::string(to_string(s))] = it == plan.strategy_targets.end() ? 0 : it->second;
    }
    ojson quotas = ojson::object();
    for (const auto& [key, n] : plan.quotas) quotas[key.tag()] = n;
    return ojson{{"total", plan.total},
                 {"seed", plan.seed},
                 {"style", {{"B", plan.style.basic}, {"C", plan.style.compound}}},
                 {"per_task", std::move(tasks)},
                 {"strategy_targets", std::move(strategies)},
                 {"quotas", std::move(quotas)}};
}

CorpusStats stats(std::span<const RenderedInstruction> corpus) {
    CorpusStats s;
    for (const auto& r : corpus) {
        ++s.total;
        ++s.by_task[r.task];
        ++s.by_style[r.style];
        ++s.by_format[r.format];
        for (auto st : r.strategies) ++s.by_strategy[st];
        if (r.style == Style::C) ++s.compound;
    }
    return s;
}

namespace {

template <typename K, std::size_t N>
ojson count_object(const std::map<K, std::size_t>& counts, const std::array<K, N>& keys) {
    ojson out = ojson::object();
    for (auto k : keys) {
        auto it = counts.find(k);
        out[std::string(to_string(k))] = it == counts.end() ? 0 : it->second;
    }
    return out;
}

template <typename K, std::size_t N, typename Parse>
std::map<K, std::size_t> count_map(const ojson& obj, const std::array<K, N>& keys, Parse parse) {
    std::map<K, std::size_t> out;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string name = it.key();
        const auto k = parse(name);
        if (!k) throw Error(ErrorCode::MalformedRecord, "unknown stats key " + name);
        const std::size_t n = it.value().template get<std::size_t>();
        if (n > 0) out[*k] = n;
    }
    (void)keys;
    return out;
}

constexpr std::array<Style, 2> kStyles = {Style::B, Style::C};

}  // namespace

ojson encode_stats(const CorpusStats& s) {
    return ojson{{"total", s.total},
                 {"compound", s.compound},
                 {"by_task", count_object(s.by_task, kAllTasks)},
                 {"by_style", count_object(s.by_style, kStyles)},
                 {"by_strategy", count_object(s.by_strategy, kAllStrategies)},
                 {"by_format", count_object(s.by_format, kAllFormats)},
                 {"dedup_removed", s.dedup_removed},
                 {"seed", s.seed}};
}

CorpusStats decode_stats(const ojson& v) {
    try {
        CorpusStats s;
        s.total = v.at("total").get<std::size_t>();
        s.compound = v.at("compound").get<std::size_t>();
        s.by_task = count_map(v.at("by_task"), kAllTasks, [](const std::string& n) { return parse_task(n); });
        s.by_style = count_map(v.at("by_style"), kStyles, [](const std::string& n) { return parse_style(n); });
        s.by_strategy =
            count_map(v.at("by_strategy"), kAllStrategies, [](const std::string& n) { return parse_strategy(n); });
        s.by_format = count_map(v.at("by_format"), kAllFormats, [](const std::string& n) { return parse_format(n); });
        s.dedup_removed = v.value("dedup_removed", std::size_t{0});
        s.seed = v.value("seed", std::uint64_t{0});
        return s;
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("stats: ") + e.what());
    }
}

std::string stats_table(const CorpusStats& s, const MixPlan* plan) {
    std::string out;
    char line[160];
    auto pct = [](std::size_t n, std::size_t d) { return d == 0 ? 0.0 : 100.0 * static_cast<double>(n) / d; };
    std::snprintf(line, sizeof line, "%-10s %10s %8s%s\n", "task", "count", "share", plan ? "   target" : "");
    out += line;
    for (auto task : kAllTasks) {
        auto it = s.by_task.find(task);
        const auto n = it == s.by_task.end() ? 0 : it->second;
        if (plan) {
            auto sh = plan->task_share.find(task);
            std::snprintf(line, sizeof line, "%-10s %10zu %7.2f%% %7.2f%%\n", std::string(to_string(task)).c_str(), n,
                          pct(n, s.total), sh == plan->task_share.end() ? 0.0 : 100.0 * sh->second);
        } else {
            std::snprintf(line, sizeof line, "%-10s %10zu %7.2f%%\n", std::string(to_string(task)).c_str(), n,
                          pct(n, s.total));
        }
        out += line;
    }
    std::snprintf(line, sizeof line, "%-10s %10zu\n\n", "total", s.total);
    out += line;
    for (auto style : kStyles) {
        auto it = s.by_style.find(style);
        const auto n = it == s.by_style.end() ? 0 : it->second;
        std::snprintf(line, sizeof line, "style %-4s %10zu %7.2f%%\n", std::string(to_string(style)).c_str(), n,
                      pct(n, s.total));
        out += line;
    }
    for (auto st : kAllStrategies) {
        auto it = s.by_strategy.find(st);
        std::snprintf(line, sizeof line, "%-10s %10zu\n", std::string(to_string(st)).c_str(),
                      it == s.by_strategy.end() ? 0 : it->second);
        out += line;
    }
    for (auto f : kAllFormats) {
        auto it = s.by_format.find(f);
        std::snprintf(line, sizeof line, "%-14s %6zu\n", std::string(to_string(f)).c_str(),
                      it == s.by_format.end() ? 0 : it->second);
        out += line;
    }
    std::snprintf(line, sizeof line, "compound   %10zu\ndeduped    %10zu\nseed       %10llu\n", s.compound,
                  s.dedup_removed, static_cast<unsigned long long>(s.seed));
    out += line;
    return out;
}

Pools group_pools(std::span<const RenderedInstruction> records) {
    Pools pools;
    for (const auto& r : records) pools[pool_of(r)].push_back(r);
    return pools;
}

std::vector<RenderedInstruction> execute(const MixPlan& plan, const Pools& pools, std::uint64_t seed,
                                         CorpusStats* out_stats) {
    std::string shortfall;
    for (const auto& [key, quota] : plan.quotas) {
        auto it = pools.find(key);
        const std::size_t have = it == pools.end() ? 0 : it->second.size();
        if (have < quota)
            shortfall += (shortfall.empty() ? "" : "; ") + key.tag() + " need " + std::to_string(quota) + " have " +
                         std::to_string(have);
    }
    if (!shortfall.empty()) throw Error(ErrorCode::PoolExhausted, shortfall);

    std::vector<RenderedInstruction> out;
    out.reserve(plan.total);
    for (const auto& [key, quota] : plan.quotas) {
        if (quota == 0) continue;
        const auto& pool = pools.at(key);
        auto rng = SeededRng::stream(seed, key.tag(), "mix");
        for (auto i : rng.sample_indices(pool.size(), quota)) out.push_back(pool[i]);
    }
    std::sort(out.begin(), out.end(), [](const RenderedInstruction& a, const RenderedInstruction& b) {
        if (a.task != b.task) return index_of(a.task) < index_of(b.task);
        return a.id < b.id;
    });
    if (out_stats) {
        *out_stats = stats(out);
        out_stats->seed = seed;
    }
    return out;
}

DedupResult dedup(std::vector<RenderedInstruction> records) {
    DedupResult result;
    std::unordered_set<std::string> seen;
    result.records.reserve(records.size());
    for (auto& r : records) {
        std::string key(to_string(r.task));
        key += '\0';
        key += r.prompt;
        key += '\0';
        key += r.target;
        if (seen.insert(sha256_hex(key)).second)
            result.records.push_back(std::move(r));
        else
            ++result.removed;
    }
    return result;
}

}  // namespace nluforge
