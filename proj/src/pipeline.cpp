#include "nluforge/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include "nluforge/basic.hpp"
#include "nluforge/corpus.hpp"
#include "nluforge/digest.hpp"
#include "nluforge/error.hpp"
#include "nluforge/rng.hpp"

namespace nluforge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

namespace {

void check_keys(const ojson& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw Error(ErrorCode::InvalidConfig, where + ": unknown key \"" + it.key() + "\"");
    }
}

const ojson& object_at(const ojson& doc, const char* key, const std::string& where) {
    static const ojson empty = ojson::object();
    if (!doc.contains(key)) return empty;
    const auto& v = doc.at(key);
    if (!v.is_object()) throw Error(ErrorCode::InvalidConfig, where + "." + key + ": expected an object");
    return v;
}

fs::path resolve(const ojson& obj, const char* key, const fs::path& base) {
    if (!obj.contains(key)) return {};
    fs::path p = obj.at(key).get<std::string>();
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

TaskShares decode_shares(const ojson& v) {
    TaskShares out;
    for (auto it = v.begin(); it != v.end(); ++it) {
        const auto task = parse_task(it.key());
        if (!task) throw Error(ErrorCode::InvalidConfig, "mix.shares: unknown task " + it.key());
        out[*task] = it.value().get<double>();
    }
    return out;
}

StrategyRatios decode_ratios(const ojson& v) {
    StrategyRatios out;
    for (auto it = v.begin(); it != v.end(); ++it) {
        const auto s = parse_strategy(it.key());
        if (!s) throw Error(ErrorCode::InvalidConfig, "mix.strategy_ratios: unknown strategy " + it.key());
        out[*s] = it.value().get<double>();
    }
    return out;
}

std::string path_text(const fs::path& p) { return p.generic_string(); }

}  // namespace

LlmSettings decode_llm_settings(const ojson& v, LlmSettings s) {
    check_keys(v,
               {"endpoint", "model", "temperature", "top_p", "max_tokens", "mode", "cache_path", "max_in_flight",
                "max_attempts", "initial_backoff_ms"},
               "llm");
    s.endpoint = v.value("endpoint", s.endpoint);
    s.model = v.value("model", s.model);
    s.temperature = v.value("temperature", s.temperature);
    s.top_p = v.value("top_p", s.top_p);
    s.max_tokens = v.value("max_tokens", s.max_tokens);
    if (v.contains("mode")) {
        const auto mode = parse_llm_mode(v.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorCode::InvalidConfig, "llm.mode must be live, record or replay");
        s.mode = *mode;
    }
    if (v.contains("cache_path")) s.cache_path = v.at("cache_path").get<std::string>();
    s.max_in_flight = v.value("max_in_flight", s.max_in_flight);
    s.max_attempts = v.value("max_attempts", s.max_attempts);
    if (v.contains("initial_backoff_ms")) s.initial_backoff = std::chrono::milliseconds(v.at("initial_backoff_ms").get<int>());
    if (s.max_in_flight == 0) throw Error(ErrorCode::InvalidConfig, "llm.max_in_flight must be > 0");
    if (s.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "llm.max_attempts must be >= 1");
    return s;
}

ojson encode_llm_settings(const LlmSettings& s) {
    return ojson{{"endpoint", s.endpoint},
                 {"model", s.model},
                 {"temperature", s.temperature},
                 {"top_p", s.top_p},
                 {"max_tokens", s.max_tokens},
                 {"mode", to_string(s.mode)},
                 {"cache_path", path_text(s.cache_path)},
                 {"max_in_flight", s.max_in_flight},
                 {"max_attempts", s.max_attempts},
                 {"initial_backoff_ms", s.initial_backoff.count()}};
}

PipelineConfig decode_pipeline_config(const ojson& doc, const fs::path& base) {
    if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config: expected an object");
    check_keys(doc, {"seed", "workers", "paths", "guidelines", "empty_weights", "rules_use_llm", "mix", "llm"}, "config");
    if (!doc.contains("seed") || !doc.at("seed").is_number_integer() || doc.at("seed").get<std::int64_t>() < 0)
        throw Error(ErrorCode::InvalidConfig, "config: \"seed\" is required and must be a non-negative integer");

    PipelineConfig c;
    try {
        c.seed = doc.at("seed").get<std::uint64_t>();
        c.workers = doc.value("workers", std::size_t{1});
        if (c.workers == 0) throw Error(ErrorCode::InvalidConfig, "workers must be > 0");

        const auto& paths = object_at(doc, "paths", "config");
        check_keys(paths,
                   {"corpus_in", "corpus_out", "dictionary", "rule_catalog", "strategy_book", "template_pack",
                    "stats_out"},
                   "paths");
        c.paths.corpus_in = resolve(paths, "corpus_in", base);
        c.paths.corpus_out = resolve(paths, "corpus_out", base);
        c.paths.dictionary = resolve(paths, "dictionary", base);
        c.paths.rule_catalog = resolve(paths, "rule_catalog", base);
        c.paths.strategy_book = resolve(paths, "strategy_book", base);
        c.paths.template_pack = resolve(paths, "template_pack", base);
        c.paths.stats_out = resolve(paths, "stats_out", base);

        if (doc.contains("guidelines")) c.guidelines = decode_guideline_config(doc.at("guidelines"));
        c.guidelines.validate();

        const auto& ew = object_at(doc, "empty_weights", "config");
        check_keys(ew, {"empty_list", "nan", "empty_string"}, "empty_weights");
        c.empty_weights.empty_list = ew.value("empty_list", c.empty_weights.empty_list);
        c.empty_weights.nan = ew.value("nan", c.empty_weights.nan);
        c.empty_weights.empty_string = ew.value("empty_string", c.empty_weights.empty_string);
        for (double w : {c.empty_weights.empty_list, c.empty_weights.nan, c.empty_weights.empty_string})
            if (!(w >= 0)) throw Error(ErrorCode::InvalidConfig, "empty_weights must be >= 0");

        c.rules_use_llm = doc.value("rules_use_llm", false);

        const auto& mix = object_at(doc, "mix", "config");
        check_keys(mix, {"total", "shares", "style", "strategy_ratios"}, "mix");
        if (mix.contains("total") && !mix.at("total").is_null()) c.mix.total = mix.at("total").get<std::size_t>();
        if (mix.contains("shares")) c.mix.shares = decode_shares(mix.at("shares"));
        if (mix.contains("style")) {
            const auto& st = mix.at("style");
            check_keys(st, {"B", "C"}, "mix.style");
            c.mix.style.basic = st.value("B", c.mix.style.basic);
            c.mix.style.compound = st.value("C", c.mix.style.compound);
        }
        if (mix.contains("strategy_ratios")) c.mix.ratios = decode_ratios(mix.at("strategy_ratios"));
        // Fails early on a bad distribution.
        plan(0, c.mix.shares, c.mix.style, c.seed, c.mix.ratios);

        if (doc.contains("llm")) c.llm = decode_llm_settings(doc.at("llm"));
        if (!c.llm.cache_path.empty() && c.llm.cache_path.is_relative() && !base.empty())
            c.llm.cache_path = base / c.llm.cache_path;
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw;
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    return decode_pipeline_config(doc, path.parent_path());
}

ojson encode_pipeline_config(const PipelineConfig& c) {
    ojson shares = ojson::object();
    for (const auto& [task, share] : c.mix.shares) shares[std::string(to_string(task))] = share;
    ojson ratios = ojson::object();
    for (const auto& [s, r] : c.mix.ratios) ratios[std::string(to_string(s))] = r;
    ojson mix{{"total", c.mix.total ? ojson(*c.mix.total) : ojson(nullptr)},
              {"shares", shares},
              {"style", {{"B", c.mix.style.basic}, {"C", c.mix.style.compound}}},
              {"strategy_ratios", ratios}};
    return ojson{{"seed", c.seed},
                 {"workers", c.workers},
                 {"paths",
                  {{"corpus_in", path_text(c.paths.corpus_in)},
                   {"corpus_out", path_text(c.paths.corpus_out)},
                   {"dictionary", path_text(c.paths.dictionary)},
                   {"rule_catalog", path_text(c.paths.rule_catalog)},
                   {"strategy_book", path_text(c.paths.strategy_book)},
                   {"template_pack", path_text(c.paths.template_pack)},
                   {"stats_out", path_text(c.paths.stats_out)}}},
                 {"guidelines", encode_guideline_config(c.guidelines)},
                 {"empty_weights",
                  {{"empty_list", c.empty_weights.empty_list},
                   {"nan", c.empty_weights.nan},
                   {"empty_string", c.empty_weights.empty_string}}},
                 {"rules_use_llm", c.rules_use_llm},
                 {"mix", mix},
                 {"llm", encode_llm_settings(c.llm)}};
}

void validate_inputs(const PipelineConfig& c) {
    auto need = [](const fs::path& p, const char* what) {
        if (!p.empty() && !fs::exists(p))
            throw Error(ErrorCode::InvalidConfig, std::string(what) + " not found: " + p.string());
    };
    need(c.paths.corpus_in, "paths.corpus_in");
    need(c.paths.dictionary, "paths.dictionary");
    need(c.paths.rule_catalog, "paths.rule_catalog");
    need(c.paths.strategy_book, "paths.strategy_book");
    need(c.paths.template_pack, "paths.template_pack");
    if (c.llm.mode == LlmMode::Replay) need(c.llm.cache_path, "llm.cache_path");
}

std::string config_digest(const PipelineConfig& c) {
    // Only settings that can change output bytes.
    auto doc = encode_pipeline_config(c);
    doc.erase("workers");
    doc.erase("paths");
    doc["llm"].erase("max_in_flight");
    doc["llm"].erase("cache_path");
    doc["llm"].erase("max_attempts");
    doc["llm"].erase("initial_backoff_ms");
    doc["mix"].erase("total");
    return sha256_hex(doc.dump());
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

TemplateId pick_template(const UnifiedSample& s, const PipelineConfig& c, const TemplatePack& pack) {
    const auto n = pack.count(s.task, s.language);
    auto rng = SeededRng::stream(c.seed, s.id, "template");
    return TemplateId{s.task, n == 0 ? 0 : static_cast<std::size_t>(rng.below(n))};
}

void skip(SynthesisCounts* counts, TaskKind task, Strategy strategy) {
    if (!counts) return;
    ++counts->skipped[PoolKey{task, Style::C, strategy}.tag()];
}

std::optional<UnifiedSample> rule_sample(const UnifiedSample& s, const PipelineConfig& c, const SynthesisContext& ctx,
                                         SynthesisCounts* counts) {
    auto rng = SeededRng::stream(c.seed, s.id, "rule");
    if (c.rules_use_llm && rule_llm_task(s.task)) {
        if (!ctx.llm) throw Error(ErrorCode::InvalidConfig, "rules_use_llm needs an LLM client");
        std::vector<RuleStrategy> strategies;
        for (auto st : kAllRuleStrategies) {
            const auto& rules = ctx.catalog->rules();
            if (std::any_of(rules.begin(), rules.end(),
                            [&](const PreferenceRule& r) { return r.strategy == st && r.tasks.count(s.task); }))
                strategies.push_back(st);
        }
        if (strategies.empty()) return std::nullopt;
        const auto strategy = strategies[rng.below(strategies.size())];
        auto outcome = synthesize_rule_sample(s, strategy, *ctx.llm, rng, *ctx.catalog, *ctx.book);
        if (outcome.source == RuleSource::Llm && counts) ++counts->llm_rule_samples;
        return std::move(outcome.sample);
    }

    std::vector<const PreferenceRule*> usable;
    std::vector<const PreferenceRule*> changing;
    for (const auto& r : ctx.catalog->rules()) {
        if (!r.deterministic() || !r.tasks.count(s.task)) continue;
        if (rule_targets(r, s, ctx.catalog->lexicon()).empty()) continue;
        usable.push_back(&r);
        if (apply_rule(r, s, ctx.catalog->lexicon()).gold != s.gold) changing.push_back(&r);
    }
    const auto& pool = changing.empty() ? usable : changing;
    if (pool.empty()) return std::nullopt;
    return apply_rule(*pool[rng.below(pool.size())], s, ctx.catalog->lexicon());
}

}  // namespace

std::vector<RenderedInstruction> synthesize_sample(const UnifiedSample& s, const PipelineConfig& c,
                                                   const SynthesisContext& ctx, SynthesisCounts* counts) {
    std::vector<RenderedInstruction> out;
    const auto& pack = *ctx.pack;
    if (s.task == TaskKind::IG) {
        out.push_back(render_ig(s));
        return out;
    }
    const auto tid = pick_template(s, c, pack);
    out.push_back(render_basic(s, tid, c.seed, pack));

    auto attempt = [&](Strategy strategy, const char* suffix, auto&& make) {
        if (!strategy_available(s.task, strategy)) return;
        try {
            std::optional<RenderedInstruction> r = make();
            if (!r || !r->has(strategy)) {
                skip(counts, s.task, strategy);
                return;
            }
            r->id = s.id + suffix;
            out.push_back(std::move(*r));
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::LlmUnavailable:
                case ErrorCode::CacheMiss:
                case ErrorCode::InvalidConfig: throw;
                default: break;
            }
            spdlog::debug("{}: no {} record: {}", s.id, to_string(strategy), e.what());
            skip(counts, s.task, strategy);
        }
    };

    attempt(Strategy::GUIDELINES, "#C-G", [&]() -> std::optional<RenderedInstruction> {
        if (!ctx.dict) return std::nullopt;
        const auto annotated = inject_guidelines(s, *ctx.dict, c.guidelines, c.seed);
        return render_compound(annotated, tid, default_format(s.task), nullptr, pack);
    });

    attempt(Strategy::FORMAT, "#C-F", [&]() -> std::optional<RenderedInstruction> {
        std::vector<OutputFormat> others;
        for (auto f : supported_formats(s.task))
            if (f != default_format(s.task)) others.push_back(f);
        if (others.empty()) return std::nullopt;
        auto rng = SeededRng::stream(c.seed, s.id, "format");
        const auto format = others[rng.below(others.size())];
        return render_compound(plain_annotation(s, c.seed), tid, format, &c.empty_weights, pack);
    });

    attempt(Strategy::RULES, "#C-R", [&]() -> std::optional<RenderedInstruction> {
        auto ruled = rule_sample(s, c, ctx, counts);
        if (!ruled) return std::nullopt;
        return render_compound(plain_annotation(*ruled, c.seed), tid, default_format(s.task), nullptr, pack);
    });
    return out;
}

std::vector<RenderedInstruction> synthesize(std::span<const UnifiedSample> samples, const PipelineConfig& c,
                                            const SynthesisContext& ctx, SynthesisCounts* counts) {
    const std::size_t n = samples.size();
    std::vector<std::vector<RenderedInstruction>> results(n);
    std::vector<SynthesisCounts> partial(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto work = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                results[i] = synthesize_sample(samples[i], c, ctx, &partial[i]);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };
    const auto threads = std::max<std::size_t>(1, std::min(c.workers, n));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<RenderedInstruction> out;
    SynthesisCounts total;
    total.samples = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& r : results[i]) out.push_back(std::move(r));
        for (const auto& [tag, k] : partial[i].skipped) total.skipped[tag] += k;
        total.llm_rule_samples += partial[i].llm_rule_samples;
    }
    total.records = out.size();
    if (counts) *counts = std::move(total);
    return out;
}

// ---------------------------------------------------------------------------
// Mixing

namespace {

bool feasible(std::size_t total, const Pools& pools, const PipelineConfig& c) {
    const auto p = plan(total, c.mix.shares, c.mix.style, c.seed, c.mix.ratios);
    for (const auto& [key, quota] : p.quotas) {
        auto it = pools.find(key);
        if ((it == pools.end() ? 0 : it->second.size()) < quota) return false;
    }
    return true;
}

}  // namespace

std::size_t max_feasible_total(const Pools& pools, const PipelineConfig& c) {
    std::size_t hi = 0;
    for (const auto& [key, records] : pools) hi += records.size();
    std::size_t lo = 0;
    // Apportionment is monotone up to single-seat paradoxes; the answer is
    // checked feasible below.
    while (lo < hi) {
        const auto mid = lo + (hi - lo + 1) / 2;
        if (feasible(mid, pools, c))
            lo = mid;
        else
            hi = mid - 1;
    }
    while (lo > 0 && !feasible(lo, pools, c)) --lo;
    return lo;
}

MixOutcome mix(std::vector<RenderedInstruction> candidates, const PipelineConfig& c, std::optional<std::size_t> total) {
    auto deduped = dedup(std::move(candidates));
    const auto pools = group_pools(deduped.records);
    if (!total) total = c.mix.total;
    if (!total) {
        total = max_feasible_total(pools, c);
        if (*total == 0 && !deduped.records.empty())
            spdlog::warn("no total fits the configured shares; a task with a positive share has no candidates");
    }

    MixOutcome out;
    out.plan = plan(*total, c.mix.shares, c.mix.style, c.seed, c.mix.ratios);
    out.records = execute(out.plan, pools, c.seed, &out.stats);
    out.stats.dedup_removed = deduped.removed;
    return out;
}

// ---------------------------------------------------------------------------
// Files

ojson provenance_header(const std::string& digest, std::uint64_t seed) {
    return ojson{{kProvenanceKey, {{"config_digest", digest}, {"seed", seed}, {"tool_version", kToolVersion}}}};
}

ojson provenance_header(const PipelineConfig& c) { return provenance_header(config_digest(c), c.seed); }

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

}  // namespace

void write_records(const fs::path& path, std::span<const RenderedInstruction> records, const ojson& header) {
    auto out = open_out(path);
    out << header.dump() << '\n';
    for (const auto& r : records) out << record_line(r) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::vector<RenderedInstruction> read_records(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<RenderedInstruction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto v = ojson::parse(line);
            if (v.is_object() && v.contains(kProvenanceKey)) continue;
            out.push_back(decode_record(v));
        } catch (const ojson::exception& e) {
            throw Error(ErrorCode::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_samples(const fs::path& path, std::span<const UnifiedSample> samples, const ojson& header) {
    auto out = open_out(path);
    out << header.dump() << '\n';
    for (const auto& s : samples) out << sample_line(s) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

void write_json_report(const fs::path& path, const ojson& doc, const ojson& header) {
    ojson full = ojson::object();
    full[kProvenanceKey] = header.at(kProvenanceKey);
    for (auto it = doc.begin(); it != doc.end(); ++it) full[it.key()] = it.value();
    auto out = open_out(path);
    out << full.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace nluforge
