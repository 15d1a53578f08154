#include "nluforge/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "nluforge/codec.hpp"
#include "nluforge/conll.hpp"
#include "nluforge/corpus.hpp"
#include "nluforge/dictionary.hpp"
#include "nluforge/digest.hpp"
#include "nluforge/error.hpp"
#include "nluforge/eval.hpp"
#include "nluforge/pipeline.hpp"
#include "nluforge/validate.hpp"

namespace nluforge {

namespace fs = std::filesystem;

CliEnv CliEnv::process() {
    CliEnv env;
    env.make_transport = [](const std::string& endpoint) { return std::shared_ptr<Transport>(make_http_transport(endpoint)); };
    env.getenv = [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v) return std::nullopt;
        return std::string(v);
    };
    return env;
}

namespace {

// Options shared by the commands that may call a model.
struct LlmFlags {
    std::string mode;
    std::string cache;
    std::string model;
    std::string endpoint;
    std::size_t in_flight = 0;

    void add(CLI::App* cmd) {
        cmd->add_option("--llm-mode", mode, "live, record or replay (default replay)")
            ->check(CLI::IsMember({"live", "record", "replay"}));
        cmd->add_option("--cache", cache, "Response cache file");
        cmd->add_option("--model", model, "Model name");
        cmd->add_option("--endpoint", endpoint, "OpenAI-compatible base URL");
        cmd->add_option("--max-in-flight", in_flight, "Concurrent requests");
    }

    LlmSettings apply(LlmSettings s) const {
        if (!mode.empty()) s.mode = *parse_llm_mode(mode);
        if (!cache.empty()) s.cache_path = cache;
        if (!model.empty()) s.model = model;
        if (!endpoint.empty()) s.endpoint = endpoint;
        if (in_flight) s.max_in_flight = in_flight;
        return s;
    }
};

std::unique_ptr<LlmClient> make_llm(LlmSettings s, const CliEnv& env) {
    if (auto key = env.getenv(kApiKeyEnv)) s.api_key = *key;
    std::shared_ptr<Transport> transport;
    if (s.mode != LlmMode::Replay) {
        if (s.api_key.empty()) spdlog::warn("{} is not set", kApiKeyEnv);
        transport = env.make_transport(s.endpoint);
    } else if (!s.cache_path.empty() && !fs::exists(s.cache_path)) {
        throw Error(ErrorCode::InvalidConfig, "replay cache not found: " + s.cache_path.string());
    }
    return std::make_unique<LlmClient>(std::move(s), std::move(transport));
}

std::string digest_of(const ojson& options) { return sha256_hex(options.dump()); }

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

std::vector<UnifiedSample> load_samples_strict(const fs::path& path) {
    auto load = load_corpus(path);
    if (!load.errors.empty()) {
        const auto& e = load.errors.front();
        throw Error(e.code, path.string() + ":" + std::to_string(e.line_no) + ": " + e.cause + " (" +
                                std::to_string(load.errors.size()) + " bad lines)");
    }
    return std::move(load.samples);
}

ojson stats_report(const CorpusStats& s, const MixPlan* p) {
    ojson doc{{"stats", encode_stats(s)}};
    if (p) doc["plan"] = encode_plan(*p);
    return doc;
}

struct Loaded {
    std::vector<UnifiedSample> corpus;
    SchemaDictionary dict;
    RuleCatalog catalog;
    StrategyBook book;
    TemplatePack pack;
};

// ---------------------------------------------------------------------------
// Subcommands

struct IngestArgs {
    std::string input, output, format, source, language = "en";
    std::size_t token_column = 0;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
    std::string format = a.format;
    if (format.empty()) format = fs::path(a.input).extension() == ".jsonl" ? "jsonl" : "conll";
    const std::string source = a.source.empty() ? fs::path(a.input).stem().string() : a.source;
    const ojson options{{"command", "ingest"}, {"format", format}, {"source", source}, {"language", a.language},
                        {"token_column", a.token_column}};

    std::vector<UnifiedSample> samples;
    ojson errors = ojson::array();
    if (format == "conll") {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + a.input);
        samples = read_conll(in, ConllOptions{source, a.language, a.token_column});
    } else {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + a.input);
        std::string line;
        std::size_t line_no = 0;
        std::set<std::string> ids;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            try {
                auto v = ojson::parse(line);
                if (v.is_object() && v.contains(kProvenanceKey)) continue;
                if (v.is_object() && !v.contains("id")) {
                    char buf[24];
                    std::snprintf(buf, sizeof buf, "%06zu", line_no);
                    v["id"] = v.value("source", source) + ":" + buf;
                }
                auto s = decode_sample(v);
                const auto violations = validate_sample(s);
                if (!violations.empty())
                    throw Error(ErrorCode::SchemaMismatch, std::string(to_string(violations.front().kind)) + " at " +
                                                               violations.front().field + ": " +
                                                               violations.front().detail);
                if (!ids.insert(s.id).second) throw Error(ErrorCode::MalformedRecord, "duplicate id " + s.id);
                samples.push_back(std::move(s));
            } catch (const ojson::exception& e) {
                errors.push_back({{"line", line_no}, {"code", "MalformedRecord"}, {"cause", e.what()}});
            } catch (const Error& e) {
                errors.push_back({{"line", line_no}, {"code", to_string(e.code())}, {"cause", e.what()}});
            }
        }
    }
    write_samples(a.output, samples, provenance_header(digest_of(options), 0));
    out << ojson{{"samples", samples.size()}, {"errors", errors.size()}}.dump() << '\n';
    if (!errors.empty())
        throw Error(ErrorCode::MalformedRecord,
                    std::to_string(errors.size()) + " bad lines; first: " + errors.front().dump());
    return 0;
}

struct DictArgs {
    std::string corpus, out, synonyms;
    std::uint64_t seed = 0;
    std::size_t max_positive = 5, max_negative = 5, max_typical = 5;
};

int cmd_build_dict(const DictArgs& a, std::ostream& out) {
    BuildConfig bc;
    bc.seed = a.seed;
    bc.max_positive = a.max_positive;
    bc.max_negative = a.max_negative;
    bc.max_typical_values = a.max_typical;
    if (!a.synonyms.empty()) bc.synonyms = load_synonyms(a.synonyms);
    const auto corpus = load_samples_strict(a.corpus);
    const auto dict = build_dictionary(corpus, bc);
    const ojson options{{"command", "build-dict"}, {"seed", a.seed}, {"max_positive", a.max_positive},
                        {"max_negative", a.max_negative}, {"max_typical_values", a.max_typical},
                        {"synonyms", a.synonyms.empty() ? "builtin" : file_digest(a.synonyms)}};
    write_json_report(a.out, encode_dictionary(dict), provenance_header(digest_of(options), a.seed));
    out << ojson{{"entries", dict.entries.size()}}.dump() << '\n';
    return 0;
}

struct EnrichArgs {
    std::string dict, out, config;
    std::size_t variants = 1;
    LlmFlags llm;
};

int cmd_enrich(const EnrichArgs& a, std::ostream& out, const CliEnv& env) {
    LlmSettings settings;
    std::uint64_t seed = 0;
    if (!a.config.empty()) {
        const auto c = load_pipeline_config(a.config);
        settings = c.llm;
        seed = c.seed;
    }
    settings = a.llm.apply(settings);
    auto llm = make_llm(settings, env);
    const auto dict = load_dictionary(a.dict);
    const auto enriched = enrich_descriptions(dict, *llm, a.variants);
    ojson llm_doc = encode_llm_settings(settings);
    llm_doc.erase("cache_path");
    llm_doc.erase("max_in_flight");
    const ojson options{{"command", "enrich-dict"}, {"variants", a.variants}, {"llm", llm_doc}};
    write_json_report(a.out, encode_dictionary(enriched), provenance_header(digest_of(options), seed));
    out << ojson{{"entries", enriched.entries.size()}, {"version", enriched.version},
                 {"network_calls", llm->network_calls()}}
               .dump()
        << '\n';
    return 0;
}

struct SynthArgs {
    std::string config, out, stats, candidates;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers, total;
    bool no_mix = false;
    LlmFlags llm;
};

int cmd_synthesize(const SynthArgs& a, std::ostream& out, const CliEnv& env) {
    auto c = load_pipeline_config(a.config);
    if (a.seed) c.seed = *a.seed;
    if (a.workers) c.workers = *a.workers;
    if (a.total) c.mix.total = *a.total;
    if (!a.out.empty()) c.paths.corpus_out = a.out;
    if (!a.stats.empty()) c.paths.stats_out = a.stats;
    c.llm = a.llm.apply(c.llm);
    if (c.paths.corpus_in.empty()) throw Error(ErrorCode::InvalidConfig, "paths.corpus_in is required");
    if (c.paths.corpus_out.empty() && a.candidates.empty())
        throw Error(ErrorCode::InvalidConfig, "paths.corpus_out (or --out) is required");
    if (!c.rules_use_llm) c.llm.cache_path.clear();
    validate_inputs(c);

    Loaded in;
    in.corpus = load_samples_strict(c.paths.corpus_in);
    in.dict = c.paths.dictionary.empty() ? build_dictionary(in.corpus, BuildConfig{.seed = c.seed})
                                         : load_dictionary(c.paths.dictionary);
    in.catalog = c.paths.rule_catalog.empty() ? RuleCatalog::builtin() : RuleCatalog::load(c.paths.rule_catalog);
    in.book = c.paths.strategy_book.empty() ? StrategyBook::builtin() : StrategyBook::load(c.paths.strategy_book);
    in.pack = c.paths.template_pack.empty() ? TemplatePack::builtin() : TemplatePack::load(c.paths.template_pack);

    std::unique_ptr<LlmClient> llm;
    if (c.rules_use_llm) llm = make_llm(c.llm, env);
    SynthesisContext ctx{&in.dict, &in.catalog, &in.book, &in.pack, llm.get()};

    SynthesisCounts counts;
    auto candidates = synthesize(in.corpus, c, ctx, &counts);
    spdlog::info("synthesized {} candidates from {} samples", counts.records, counts.samples);
    const auto header = provenance_header(c);
    if (!a.candidates.empty()) write_records(a.candidates, candidates, header);
    if (a.no_mix) {
        out << ojson{{"samples", counts.samples}, {"candidates", counts.records}}.dump() << '\n';
        return 0;
    }

    const auto mixed = mix(std::move(candidates), c);
    write_records(c.paths.corpus_out, mixed.records, header);
    if (!c.paths.stats_out.empty()) {
        auto doc = stats_report(mixed.stats, &mixed.plan);
        ojson skipped = ojson::object();
        for (const auto& [tag, n] : counts.skipped) skipped[tag] = n;
        doc["synthesis"] = {{"samples", counts.samples},
                            {"candidates", counts.records},
                            {"llm_rule_samples", counts.llm_rule_samples},
                            {"skipped", skipped}};
        write_json_report(c.paths.stats_out, doc, header);
    }
    out << stats_table(mixed.stats, &mixed.plan);
    return 0;
}

struct MixArgs {
    std::string in, config, out, stats;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> total;
};

int cmd_mix(const MixArgs& a, std::ostream& out) {
    PipelineConfig c;
    if (!a.config.empty()) c = load_pipeline_config(a.config);
    if (a.seed) c.seed = *a.seed;
    if (a.total) c.mix.total = *a.total;
    if (a.config.empty() && !a.seed) throw Error(ErrorCode::InvalidConfig, "mix needs --seed or --config");
    if (a.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out is required");
    auto candidates = read_records(a.in);
    const auto mixed = mix(std::move(candidates), c);
    const auto header = provenance_header(c);
    write_records(a.out, mixed.records, header);
    if (!a.stats.empty()) write_json_report(a.stats, stats_report(mixed.stats, &mixed.plan), header);
    out << stats_table(mixed.stats, &mixed.plan);
    return 0;
}

struct StatsArgs {
    std::string in, json;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
    const auto records = read_records(a.in);
    auto s = stats(records);
    std::ifstream f(a.in);
    std::string first;
    std::getline(f, first);
    ojson header = provenance_header("", 0);
    try {
        const auto h = ojson::parse(first);
        if (h.is_object() && h.contains(kProvenanceKey)) {
            header = h;
            s.seed = h[kProvenanceKey].value("seed", std::uint64_t{0});
        }
    } catch (const ojson::exception&) {
    }
    if (!a.json.empty()) write_json_report(a.json, stats_report(s, nullptr), header);
    out << stats_table(s);
    return 0;
}

struct EvalArgs {
    std::string corpus, dict, config, out, name, task, style = "B";
    std::uint64_t seed = 0;
    LlmFlags llm;
};

int cmd_evaluate(const EvalArgs& a, std::ostream& out, const CliEnv& env) {
    LlmSettings settings;
    std::uint64_t seed = a.seed;
    if (!a.config.empty()) {
        const auto c = load_pipeline_config(a.config);
        settings = c.llm;
        seed = c.seed;
    }
    settings = a.llm.apply(settings);
    const auto task = parse_task(a.task);
    const auto style = parse_style(a.style);
    if (!task) throw Error(ErrorCode::InvalidConfig, "unknown task " + a.task);
    if (!style) throw Error(ErrorCode::InvalidConfig, "unknown style " + a.style);

    auto samples = load_samples_strict(a.corpus);
    std::erase_if(samples, [&](const UnifiedSample& s) { return s.task != *task; });
    std::optional<SchemaDictionary> dict;
    if (!a.dict.empty()) dict = load_dictionary(a.dict);
    const auto items = prepare_eval_items(samples, *style, dict ? &*dict : nullptr, seed);
    auto llm = make_llm(settings, env);
    const EvalTask spec{a.name.empty() ? a.task : a.name, *task, *style, metric_for(*task)};
    const auto report = run_eval(spec, items, *llm);

    ojson llm_doc = encode_llm_settings(settings);
    llm_doc.erase("cache_path");
    llm_doc.erase("max_in_flight");
    const ojson options{{"command", "evaluate"}, {"task", a.task}, {"style", a.style}, {"llm", llm_doc}};
    if (!a.out.empty()) write_json_report(a.out, encode_report(report), provenance_header(digest_of(options), seed));
    out << report_table({report});
    return 0;
}

struct CacheArgs {
    std::string cache, out, created_at = "1970-01-01T00:00:00Z";
};

ojson cache_summary(const std::string& path, std::vector<ojson>* entries) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::size_t lines = 0, malformed = 0, mismatched = 0;
    std::set<std::string> keys;
    std::set<std::string> models;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++lines;
        try {
            const auto v = ojson::parse(line);
            const auto& req = v.at("request");
            const auto key = v.at("key").get<std::string>();
            v.at("response").get<std::string>();
            const auto expect = cache_key(req.at("model").get<std::string>(),
                                          req.at("messages").at(0).at("content").get<std::string>(),
                                          req.at("temperature").get<double>(), req.at("top_p").get<double>(),
                                          req.at("max_tokens").get<int>());
            if (expect != key) ++mismatched;
            keys.insert(key);
            models.insert(req.at("model").get<std::string>());
            if (entries) entries->push_back(v);
        } catch (const ojson::exception&) {
            ++malformed;
        }
    }
    return ojson{{"entries", lines},
                 {"distinct_keys", keys.size()},
                 {"models", models},
                 {"malformed", malformed},
                 {"key_mismatches", mismatched}};
}

int cmd_cache_stats(const CacheArgs& a, std::ostream& out) {
    out << cache_summary(a.cache, nullptr).dump() << '\n';
    return 0;
}

int cmd_cache_verify(const CacheArgs& a, std::ostream& out) {
    const auto s = cache_summary(a.cache, nullptr);
    out << s.dump() << '\n';
    if (s["malformed"] != 0 || s["key_mismatches"] != 0)
        throw Error(ErrorCode::MalformedRecord, a.cache + ": cache failed verification");
    return 0;
}

// One entry per key, sorted by key, with a fixed timestamp.
int cmd_cache_pin(const CacheArgs& a, std::ostream& out) {
    std::vector<ojson> entries;
    const auto s = cache_summary(a.cache, &entries);
    if (s["malformed"] != 0 || s["key_mismatches"] != 0)
        throw Error(ErrorCode::MalformedRecord, a.cache + ": cache failed verification");
    std::map<std::string, ojson> by_key;
    for (auto& e : entries) {
        e["created_at"] = a.created_at;
        by_key.emplace(e.at("key").get<std::string>(), e);
    }
    const std::string dest = a.out.empty() ? a.cache : a.out;
    const auto tmp = dest + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write " + tmp);
        for (const auto& [key, e] : by_key) f << dump_compact(e) << '\n';
        if (!f) throw Error(ErrorCode::Io, "write failed: " + tmp);
    }
    fs::rename(tmp, dest);
    out << ojson{{"entries", by_key.size()}}.dump() << '\n';
    return 0;
}

void write_error(std::ostream& err, std::string_view code, const std::string& message) {
    err << ojson{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliEnv& env) {
    CLI::App app{"Instruction corpus synthesis, mixing and evaluation.", "nluforge"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "Log level for stderr")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Convert a CoNLL or JSONL file into a canonical corpus");
    c_ingest->add_option("--input", ingest.input, "Input file")->required();
    c_ingest->add_option("--output", ingest.output, "Canonical corpus to write")->required();
    c_ingest->add_option("--format", ingest.format, "conll or jsonl (default by extension)")
        ->check(CLI::IsMember({"conll", "jsonl"}));
    c_ingest->add_option("--source", ingest.source, "Dataset name (default: file stem)");
    c_ingest->add_option("--language", ingest.language, "Language tag");
    c_ingest->add_option("--token-column", ingest.token_column, "CoNLL token column (0-based)");

    DictArgs dict;
    auto* c_dict = app.add_subcommand("build-dict", "Build the schema dictionary from a corpus");
    c_dict->add_option("--corpus", dict.corpus, "Canonical corpus")->required();
    c_dict->add_option("--out", dict.out, "Dictionary file to write")->required();
    c_dict->add_option("--seed", dict.seed, "Seed for example sampling")->required();
    c_dict->add_option("--synonyms", dict.synonyms, "Synonym table (default: built-in)");
    c_dict->add_option("--max-positive", dict.max_positive, "Positive examples kept per label");
    c_dict->add_option("--max-negative", dict.max_negative, "Negative examples kept per label");
    c_dict->add_option("--max-typical", dict.max_typical, "Typical values kept per label");

    EnrichArgs enrich;
    auto* c_enrich = app.add_subcommand("enrich-dict", "Add model-written label descriptions");
    c_enrich->add_option("--dict", enrich.dict, "Dictionary to read")->required();
    c_enrich->add_option("--out", enrich.out, "Dictionary to write")->required();
    c_enrich->add_option("--variants", enrich.variants, "Descriptions requested per label");
    c_enrich->add_option("--config", enrich.config, "Pipeline config (llm section and seed)");
    enrich.llm.add(c_enrich);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synthesize", "Render candidates and mix them into a corpus");
    c_synth->add_option("--config", synth.config, "Pipeline config")->required();
    c_synth->add_option("--seed", synth.seed, "Override the config seed");
    c_synth->add_option("--workers", synth.workers, "Override the worker count");
    c_synth->add_option("--total", synth.total, "Override mix.total");
    c_synth->add_option("--out", synth.out, "Override paths.corpus_out");
    c_synth->add_option("--stats", synth.stats, "Override paths.stats_out");
    c_synth->add_option("--candidates", synth.candidates, "Also write every candidate record here");
    c_synth->add_flag("--no-mix", synth.no_mix, "Stop after writing candidates");
    synth.llm.add(c_synth);

    MixArgs mixa;
    auto* c_mix = app.add_subcommand("mix", "Sample a corpus from candidate records");
    c_mix->add_option("--in", mixa.in, "Candidate records")->required();
    c_mix->add_option("--out", mixa.out, "Corpus to write")->required();
    c_mix->add_option("--config", mixa.config, "Pipeline config (mix section and seed)");
    c_mix->add_option("--seed", mixa.seed, "Override the seed");
    c_mix->add_option("--total", mixa.total, "Records to draw (default: all the plan can fill)");
    c_mix->add_option("--stats", mixa.stats, "Stats report to write");

    StatsArgs st;
    auto* c_stats = app.add_subcommand("stats", "Count records by task, style, strategy and format");
    c_stats->add_option("--in", st.in, "Corpus of rendered records")->required();
    c_stats->add_option("--json", st.json, "Also write the counts as JSON");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("evaluate", "Zero-shot evaluation through the model client");
    c_eval->add_option("--corpus", ev.corpus, "Canonical corpus with gold labels")->required();
    c_eval->add_option("--task", ev.task, "Task kind")->required();
    c_eval->add_option("--style", ev.style, "B or C")->check(CLI::IsMember({"B", "C"}));
    c_eval->add_option("--dict", ev.dict, "Dictionary (style C)");
    c_eval->add_option("--name", ev.name, "Report name");
    c_eval->add_option("--seed", ev.seed, "Rendering seed");
    c_eval->add_option("--config", ev.config, "Pipeline config (llm section and seed)");
    c_eval->add_option("--out", ev.out, "Report JSON to write");
    ev.llm.add(c_eval);

    CacheArgs cache;
    auto* c_cache = app.add_subcommand("cache-admin", "Inspect and normalize a response cache");
    c_cache->require_subcommand(1);
    auto* c_cache_stats = c_cache->add_subcommand("stats", "Summarize the cache");
    auto* c_cache_verify = c_cache->add_subcommand("verify", "Check every line and key");
    auto* c_cache_pin = c_cache->add_subcommand("pin", "One entry per key, sorted, fixed timestamp");
    for (auto* sub : {c_cache_stats, c_cache_verify, c_cache_pin})
        sub->add_option("--cache", cache.cache, "Cache file")->required();
    c_cache_pin->add_option("--out", cache.out, "Output (default: in place)");
    c_cache_pin->add_option("--created-at", cache.created_at, "Timestamp written on every entry");

    std::vector<const char*> argv{"nluforge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return 2;
    }

    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("nluforge", sink);
    logger->set_pattern("ts=%Y-%m-%dT%H:%M:%S.%eZ level=%l msg=\"%v\"", spdlog::pattern_time_type::utc);
    logger->set_level(spdlog::level::from_str(log_level));
    auto previous = spdlog::default_logger();
    spdlog::set_default_logger(logger);
    struct Restore {
        std::shared_ptr<spdlog::logger> logger;
        ~Restore() { spdlog::set_default_logger(logger); }
    } restore{previous};

    try {
        if (c_ingest->parsed()) return cmd_ingest(ingest, out);
        if (c_dict->parsed()) return cmd_build_dict(dict, out);
        if (c_enrich->parsed()) return cmd_enrich(enrich, out, env);
        if (c_synth->parsed()) return cmd_synthesize(synth, out, env);
        if (c_mix->parsed()) return cmd_mix(mixa, out);
        if (c_stats->parsed()) return cmd_stats(st, out);
        if (c_eval->parsed()) return cmd_evaluate(ev, out, env);
        if (c_cache_stats->parsed()) return cmd_cache_stats(cache, out);
        if (c_cache_verify->parsed()) return cmd_cache_verify(cache, out);
        if (c_cache_pin->parsed()) return cmd_cache_pin(cache, out);
    } catch (const Error& e) {
        write_error(err, to_string(e.code()), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        write_error(err, to_string(ErrorCode::Io), e.what());
        return 1;
    } catch (const std::exception& e) {
        write_error(err, "Internal", e.what());
        return 1;
    }
    err << app.help();
    return 2;
}

}  // namespace nluforge
