#include <gtest/gtest.h>

#include <fstream>

#include "fake_transport.hpp"
#include "nluforge/corpus.hpp"
#include "nluforge/error.hpp"
#include "nluforge/pipeline.hpp"
#include "synthetic.hpp"

using namespace nluforge;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

struct Fixture {
    std::vector<UnifiedSample> corpus;
    SchemaDictionary dict;
    PipelineConfig config;
    SynthesisContext ctx;

    Fixture(std::size_t n, std::uint64_t seed) : corpus(nftest::synthetic_corpus(n, seed)) {
        dict = build_dictionary(corpus, BuildConfig{.seed = seed});
        config.seed = seed;
        ctx.dict = &dict;
    }
};

std::string dump(std::span<const RenderedInstruction> records) {
    std::string out;
    for (const auto& r : records) out += record_line(r) + "\n";
    return out;
}

}  // namespace

TEST(PipelineConfig, SeedIsMandatory) {
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson::object()); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson{{"seed", -1}}); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(decode_pipeline_config(ojson{{"seed", 5}}).seed, 5u);
}

TEST(PipelineConfig, RejectsUnknownKeysAndBadShares) {
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson{{"seed", 1}, {"sede", 2}}); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson::parse(R"({"seed":1,"mix":{"shares":{"NER":0.5}}})")); }),
              ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson::parse(R"({"seed":1,"mix":{"shares":{"XYZ":1}}})")); }),
              ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson::parse(R"({"seed":1,"llm":{"mode":"offline"}})")); }),
              ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { decode_pipeline_config(ojson::parse(R"({"seed":1,"workers":0})")); }),
              ErrorCode::InvalidConfig);
}

TEST(PipelineConfig, RoundTripsAndResolvesPaths) {
    const auto doc = ojson::parse(R"({
        "seed": 11, "workers": 3,
        "paths": {"corpus_in": "in.jsonl", "corpus_out": "/abs/out.jsonl"},
        "guidelines": {"mask_ratio": 0.5},
        "mix": {"total": 100, "shares": {"NER": 0.5, "IG": 0.5}, "style": {"B": 0.6, "C": 0.4}},
        "llm": {"mode": "record", "cache_path": "cache.jsonl", "max_in_flight": 2}
    })");
    const auto c = decode_pipeline_config(doc, "/base");
    EXPECT_EQ(c.paths.corpus_in, std::filesystem::path("/base/in.jsonl"));
    EXPECT_EQ(c.paths.corpus_out, std::filesystem::path("/abs/out.jsonl"));
    EXPECT_EQ(c.llm.cache_path, std::filesystem::path("/base/cache.jsonl"));
    EXPECT_EQ(c.llm.mode, LlmMode::Record);
    EXPECT_EQ(c.mix.total, 100u);
    EXPECT_DOUBLE_EQ(c.guidelines.mask_ratio, 0.5);
    const auto again = decode_pipeline_config(encode_pipeline_config(c));
    EXPECT_EQ(encode_pipeline_config(again), encode_pipeline_config(c));
}

TEST(PipelineConfig, DigestIgnoresWorkersAndPaths) {
    PipelineConfig a;
    a.seed = 3;
    auto b = a;
    b.workers = 8;
    b.paths.corpus_out = "elsewhere.jsonl";
    b.llm.max_in_flight = 16;
    EXPECT_EQ(config_digest(a), config_digest(b));
    b.seed = 4;
    EXPECT_NE(config_digest(a), config_digest(b));
    auto c = a;
    c.guidelines.mask_ratio = 0.3;
    EXPECT_NE(config_digest(a), config_digest(c));
}

TEST(Synthesize, CandidateIdsAndStrategies) {
    Fixture f(400, 21);
    SynthesisCounts counts;
    const auto records = synthesize(f.corpus, f.config, f.ctx, &counts);
    EXPECT_EQ(counts.samples, f.corpus.size());
    EXPECT_EQ(counts.records, records.size());
    std::map<std::string, std::size_t> suffixes;
    for (const auto& r : records) {
        const auto suffix = r.id.substr(r.id.rfind('#'));
        ++suffixes[suffix];
        if (suffix == "#B") {
            EXPECT_EQ(r.style, Style::B);
            EXPECT_TRUE(r.strategies.empty());
        } else {
            EXPECT_EQ(r.style, Style::C) << r.id;
            const auto key = pool_of(r);
            ASSERT_TRUE(key.strategy);
            EXPECT_TRUE(r.has(*key.strategy)) << r.id;
            EXPECT_TRUE(strategy_available(r.task, *key.strategy)) << r.id;
        }
        if (r.task == TaskKind::IG) {
            EXPECT_EQ(suffix, "#B");
        }
    }
    EXPECT_EQ(suffixes["#B"], f.corpus.size());
    EXPECT_GT(suffixes["#C-G"], 0u);
    EXPECT_GT(suffixes["#C-F"], 0u);
    EXPECT_GT(suffixes["#C-R"], 0u);
}

TEST(Synthesize, RuleRecordsCarryOrigin) {
    Fixture f(300, 5);
    const auto records = synthesize(f.corpus, f.config, f.ctx);
    std::size_t rules = 0;
    for (const auto& r : records) {
        if (!r.id.ends_with("#C-R")) continue;
        ++rules;
        EXPECT_TRUE(r.provenance.contains("rule_id")) << r.id;
        EXPECT_NE(RuleCatalog::builtin().find(r.provenance["rule_id"].get<std::string>()), nullptr);
    }
    EXPECT_GT(rules, 0u);
}

TEST(Synthesize, SameBytesForAnyWorkerCount) {
    Fixture f(600, 9);
    std::string first;
    for (std::size_t w : {1, 4, 8}) {
        f.config.workers = w;
        const auto text = dump(mix(synthesize(f.corpus, f.config, f.ctx), f.config).records);
        if (first.empty())
            first = text;
        else
            EXPECT_EQ(text, first) << "workers " << w;
    }
    EXPECT_FALSE(first.empty());
}

TEST(Synthesize, LlmRulePathNeedsClient) {
    Fixture f(50, 2);
    f.config.rules_use_llm = true;
    EXPECT_EQ(code_of([&] { synthesize(f.corpus, f.config, f.ctx); }), ErrorCode::InvalidConfig);
    LlmClient llm(LlmSettings{}, std::make_shared<nftest::ForbiddenTransport>());
    f.ctx.llm = &llm;
    // Replay with an empty cache: the first rule prompt misses.
    EXPECT_EQ(code_of([&] { synthesize(f.corpus, f.config, f.ctx); }), ErrorCode::CacheMiss);
}

TEST(Mix, ReconcilesWithPlan) {
    Fixture f(1500, 13);
    const auto out = mix(synthesize(f.corpus, f.config, f.ctx), f.config, 1000);
    EXPECT_EQ(out.records.size(), 1000u);
    EXPECT_EQ(out.stats, [&] {
        auto s = stats(out.records);
        s.seed = f.config.seed;
        s.dedup_removed = out.stats.dedup_removed;
        return s;
    }());
    for (const auto& [task, n] : out.plan.per_task_counts) EXPECT_EQ(out.stats.by_task.at(task), n);
    EXPECT_EQ(code_of([&] { mix(synthesize(f.corpus, f.config, f.ctx), f.config, 100000); }),
              ErrorCode::PoolExhausted);
}

TEST(Mix, DefaultTotalIsFeasible) {
    Fixture f(500, 17);
    const auto candidates = synthesize(f.corpus, f.config, f.ctx);
    const auto out = mix(candidates, f.config);
    EXPECT_GT(out.records.size(), 400u);
    EXPECT_EQ(out.plan.total, out.records.size());
}

TEST(Files, HeaderThenRecords) {
    Fixture f(60, 4);
    const auto records = synthesize(f.corpus, f.config, f.ctx);
    const auto dir = nftest::scratch_dir("pipeline_files");
    const auto header = provenance_header(f.config);
    write_records(dir / "out.jsonl", records, header);
    std::ifstream in(dir / "out.jsonl");
    std::string line;
    std::getline(in, line);
    const auto h = ojson::parse(line);
    ASSERT_TRUE(h.contains(kProvenanceKey));
    EXPECT_EQ(h[kProvenanceKey]["seed"], 4);
    EXPECT_EQ(h[kProvenanceKey]["tool_version"], kToolVersion);
    EXPECT_EQ(h[kProvenanceKey]["config_digest"], config_digest(f.config));
    EXPECT_EQ(read_records(dir / "out.jsonl"), records);

    write_samples(dir / "samples.jsonl", f.corpus, header);
    EXPECT_EQ(load_corpus(dir / "samples.jsonl").samples, f.corpus);

    write_json_report(dir / "report.json", ojson{{"a", 1}}, header);
    const auto report = ojson::parse(nftest::read_file(dir / "report.json"));
    EXPECT_EQ(report.begin().key(), kProvenanceKey);
    EXPECT_EQ(report["a"], 1);
}
