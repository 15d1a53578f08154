#include "nluforge/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "nluforge/detail/overloaded.hpp"
#include "nluforge/embedded.hpp"
#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"
#include "nluforge/llm.hpp"

namespace nluforge {

using detail::overloaded;

std::string_view to_string(Origin origin) {
    switch (origin) {
        case Origin::Curated: return "curated";
        case Origin::LlmGenerated: return "llm_generated";
        case Origin::Mined: return "mined";
    }
    return "?";
}

std::optional<Origin> parse_origin(std::string_view text) {
    if (text == "curated") return Origin::Curated;
    if (text == "llm_generated") return Origin::LlmGenerated;
    if (text == "mined") return Origin::Mined;
    return std::nullopt;
}

const RoleGuideline* GuidelineEntry::role(std::string_view name) const {
    for (const auto& r : roles)
        if (r.role == name) return &r;
    return nullptr;
}

const GuidelineEntry* SchemaDictionary::find(TaskKind task, std::string_view label) const {
    auto it = entries.find(DictKey{task, std::string(label)});
    return it == entries.end() ? nullptr : &it->second;
}

std::string dict_key_tag(TaskKind task, std::string_view label) {
    return std::string(to_string(task)) + "/" + std::string(label);
}

namespace {

SynonymTable synonyms_from_json(const ojson& doc) {
    SynonymTable table;
    if (!doc.is_object() || !doc.contains("synonyms") || !doc["synonyms"].is_object())
        throw Error(ErrorCode::InvalidConfig, "synonym file: expected {\"synonyms\": {...}}");
    for (const auto& [label, variants] : doc["synonyms"].items()) {
        auto& list = table[label];
        for (const auto& v : variants) list.push_back(v.get<std::string>());
    }
    return table;
}

void push_unique(std::vector<std::string>& list, const std::string& value) {
    if (!value.empty() && std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
}

/// Decides whether a sample is a positive or negative example for `label` and
/// returns the fragment to show as its output.
struct Fragment {
    bool positive = false;
    TaskSchema schema;
    GoldLabel output;
};

Fragment fragment_for(const UnifiedSample& s, const SchemaEntry& entry) {
    Fragment f;
    switch (s.task) {
        case TaskKind::TC:
            f.schema = s.schema;
            f.output = s.gold;
            f.positive = std::get<ClassLabel>(s.gold).label == entry.name;
            return f;
        case TaskKind::MRC:
        case TaskKind::OPENIE:
            f.schema = s.schema;
            f.output = s.gold;
            f.positive = !is_empty_gold(s.gold);
            return f;
        default:
            f.schema = s.schema.slice(entry.name);
            f.output = canonicalize_gold(gold_slice(s.gold, entry.name), s.task, f.schema);
            f.positive = !is_empty_gold(f.output);
            return f;
    }
}

/// Algorithm R over one stream of candidates.
class Reservoir {
  public:
    Reservoir(std::size_t cap, SeededRng rng) : cap_(cap), rng_(std::move(rng)) {}

    void offer(GuidelineExample ex) {
        ++seen_;
        if (kept_.size() < cap_) {
            kept_.push_back(std::move(ex));
            return;
        }
        if (cap_ == 0) return;
        auto j = rng_.below(seen_);
        if (j < cap_) kept_[j] = std::move(ex);
    }

    std::vector<GuidelineExample> take() { return std::move(kept_); }

  private:
    std::size_t cap_;
    SeededRng rng_;
    std::size_t seen_ = 0;
    std::vector<GuidelineExample> kept_;
};

void collect_typical(const GoldLabel& fragment, std::vector<std::string>& values, std::size_t cap) {
    std::visit(overloaded{
                   [&](const EntitySet& g) {
                       for (const auto& e : g.items)
                           if (values.size() < cap) push_unique(values, e.span);
                   },
                   [&](const EventSet& g) {
                       for (const auto& e : g.items)
                           if (e.trigger && values.size() < cap) push_unique(values, *e.trigger);
                   },
                   [&](const KgEntities& g) {
                       for (const auto& t : g.types)
                           for (const auto& e : t.entities)
                               if (values.size() < cap) push_unique(values, e.name);
                   },
                   [](const auto&) {},
               },
               fragment);
}

void collect_role_typical(const GoldLabel& fragment, std::map<std::string, std::vector<std::string>>& roles,
                          std::size_t cap) {
    const auto* events = std::get_if<EventSet>(&fragment);
    if (!events) return;
    for (const auto& ev : events->items) {
        for (const auto& [role, value] : ev.arguments) {
            auto& list = roles[role];
            std::visit(overloaded{
                           [&](const std::string& v) {
                               if (list.size() < cap) push_unique(list, v);
                           },
                           [&](const std::vector<std::string>& vs) {
                               for (const auto& v : vs)
                                   if (list.size() < cap) push_unique(list, v);
                           },
                           [](const Nan&) {},
                       },
                       value);
        }
    }
}

}  // namespace

SynonymTable builtin_synonyms() {
    static const SynonymTable table = synonyms_from_json(ojson::parse(embedded::synonyms()));
    return table;
}

SynonymTable load_synonyms(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    try {
        return synonyms_from_json(ojson::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
}

SchemaDictionary build_dictionary(std::span<const UnifiedSample> corpus, const BuildConfig& config) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a dictionary from an empty corpus");

    struct Pending {
        GuidelineEntry entry;
        Reservoir positive;
        Reservoir negative;
        std::map<std::string, std::vector<std::string>> role_values;
        std::vector<std::string> role_order;
    };
    std::map<DictKey, Pending> pending;

    for (const auto& s : corpus) {
        if (s.task == TaskKind::IG) continue;
        for (const auto& schema_entry : s.schema.entries) {
            DictKey key{s.task, schema_entry.name};
            auto it = pending.find(key);
            if (it == pending.end()) {
                const auto tag = dict_key_tag(s.task, schema_entry.name);
                GuidelineEntry entry;
                entry.label = schema_entry.name;
                entry.task = s.task;
                it = pending
                         .emplace(key, Pending{std::move(entry),
                                               Reservoir(config.max_positive, SeededRng::stream(config.seed, tag, "reservoir-positive")),
                                               Reservoir(config.max_negative, SeededRng::stream(config.seed, tag, "reservoir-negative")),
                                               {},
                                               {}})
                         .first;
            }
            Pending& p = it->second;
            if (schema_entry.description &&
                std::find(p.entry.descriptions.begin(), p.entry.descriptions.end(), *schema_entry.description) ==
                    p.entry.descriptions.end()) {
                p.entry.descriptions.push_back(*schema_entry.description);
                p.entry.description_origins.push_back(Origin::Mined);
            }
            for (const auto& role : schema_entry.roles)
                if (std::find(p.role_order.begin(), p.role_order.end(), role) == p.role_order.end())
                    p.role_order.push_back(role);

            Fragment f = fragment_for(s, schema_entry);
            if (f.positive) {
                collect_typical(f.output, p.entry.typical_values, config.max_typical_values);
                collect_role_typical(f.output, p.role_values, config.max_typical_values);
            }
            GuidelineExample ex{s.id, s.text, std::move(f.schema), std::move(f.output)};
            (f.positive ? p.positive : p.negative).offer(std::move(ex));
        }
    }

    SchemaDictionary dict;
    dict.version = 1;
    for (auto& [key, p] : pending) {
        GuidelineEntry entry = std::move(p.entry);
        entry.positive_examples = p.positive.take();
        entry.negative_examples = p.negative.take();
        if (auto syn = config.synonyms.find(entry.label); syn != config.synonyms.end()) {
            for (const auto& v : syn->second)
                if (v != entry.label) push_unique(entry.name_variants, v);
        }
        for (const auto& role : p.role_order) {
            RoleGuideline r{role, {}, {}};
            if (auto it = p.role_values.find(role); it != p.role_values.end()) r.typical_values = it->second;
            entry.roles.push_back(std::move(r));
        }
        dict.provenance[dict_key_tag(key.first, key.second)] = Origin::Mined;
        dict.entries.emplace(key, std::move(entry));
    }
    return dict;
}

std::string description_prompt(const GuidelineEntry& entry, std::size_t variant) {
    std::string prompt = "Write a one-sentence description of the label \"" + entry.label + "\" used in the " +
                         std::string(to_string(entry.task)) +
                         " task, explaining what kind of text span or answer it covers.";
    if (!entry.descriptions.empty()) prompt += "\nExisting description: " + entry.descriptions.front();
    if (!entry.typical_values.empty()) {
        prompt += "\nTypical values:";
        for (const auto& v : entry.typical_values) prompt += " \"" + v + "\"";
    }
    prompt += "\nThis is variant " + std::to_string(variant + 1) +
              "; word it differently from the existing description. Reply with the sentence only.";
    return prompt;
}

SchemaDictionary enrich_descriptions(const SchemaDictionary& dict, LlmClient& llm, std::size_t n_variants) {
    if (n_variants == 0) return dict;
    std::vector<DictKey> keys;
    std::vector<std::string> prompts;
    for (const auto& [key, entry] : dict.entries) {
        for (std::size_t v = 0; v < n_variants; ++v) {
            keys.push_back(key);
            prompts.push_back(description_prompt(entry, v));
        }
    }
    const auto responses = llm.complete_all(prompts);

    SchemaDictionary out = dict;
    out.version = dict.version + 1;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto& entry = out.entries.at(keys[i]);
        const std::string text = trim(responses[i]);
        if (text.empty() ||
            std::find(entry.descriptions.begin(), entry.descriptions.end(), text) != entry.descriptions.end())
            continue;
        entry.descriptions.push_back(text);
        entry.description_origins.push_back(Origin::LlmGenerated);
        out.provenance[dict_key_tag(keys[i].first, keys[i].second)] = Origin::LlmGenerated;
    }
    return out;
}

namespace {

std::vector<GuidelineExample> draw_examples(const std::vector<GuidelineExample>& pool, std::size_t k,
                                            const std::string& exclude, SeededRng& rng) {
    std::vector<const GuidelineExample*> eligible;
    for (const auto& ex : pool)
        if (ex.source_id != exclude) eligible.push_back(&ex);
    k = std::min(k, eligible.size());
    std::vector<GuidelineExample> out;
    for (auto i : rng.sample_indices(eligible.size(), k)) out.push_back(*eligible[i]);
    return out;
}

}  // namespace

GuidelineBundle sample_guidelines(const SchemaDictionary& dict, TaskKind task, std::string_view label, SeededRng& rng,
                                  const GuidelineSelector& wants) {
    const GuidelineEntry* entry = dict.find(task, label);
    if (!entry) throw Error(ErrorCode::UnknownLabel, dict_key_tag(task, label) + " is not in the dictionary");

    GuidelineBundle bundle;
    if (wants.description && !entry->descriptions.empty()) {
        bundle.description = entry->descriptions[rng.below(entry->descriptions.size())];
    }
    auto pos = draw_examples(entry->positive_examples, wants.positive, wants.exclude_id, rng);
    auto neg = draw_examples(entry->negative_examples, wants.negative, wants.exclude_id, rng);
    for (std::size_t i = 0; i < std::max(pos.size(), neg.size()); ++i) {
        if (i < pos.size()) bundle.examples.push_back(std::move(pos[i]));
        if (i < neg.size()) bundle.examples.push_back(std::move(neg[i]));
    }
    if (wants.name_variant && !entry->name_variants.empty()) {
        bundle.name_variant = entry->name_variants[rng.below(entry->name_variants.size())];
    }
    return bundle;
}

namespace {

ojson encode_example(const GuidelineExample& ex) {
    return ojson{{"source_id", ex.source_id},
                 {"input", ex.input},
                 {"schema", encode_schema(ex.schema)},
                 {"output", encode_gold(ex.output)}};
}

GuidelineExample decode_example(const ojson& v) {
    return {v.at("source_id").get<std::string>(), v.at("input").get<std::string>(), decode_schema(v.at("schema")),
            decode_gold(v.at("output"))};
}

std::vector<std::string> strings(const ojson& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(s.get<std::string>());
    return out;
}

}  // namespace

ojson encode_dictionary(const SchemaDictionary& dict) {
    ojson entries = ojson::array();
    for (const auto& [key, e] : dict.entries) {
        ojson origins = ojson::array();
        for (auto o : e.description_origins) origins.push_back(to_string(o));
        ojson pos = ojson::array(), neg = ojson::array(), roles = ojson::array();
        for (const auto& ex : e.positive_examples) pos.push_back(encode_example(ex));
        for (const auto& ex : e.negative_examples) neg.push_back(encode_example(ex));
        for (const auto& r : e.roles)
            roles.push_back(ojson{{"role", r.role}, {"descriptions", r.descriptions}, {"typical_values", r.typical_values}});
        entries.push_back(ojson{{"task", to_string(e.task)},
                                {"label", e.label},
                                {"descriptions", e.descriptions},
                                {"description_origins", std::move(origins)},
                                {"name_variants", e.name_variants},
                                {"typical_values", e.typical_values},
                                {"roles", std::move(roles)},
                                {"positive_examples", std::move(pos)},
                                {"negative_examples", std::move(neg)}});
    }
    ojson provenance = ojson::object();
    for (const auto& [k, o] : dict.provenance) provenance[k] = to_string(o);
    return ojson{{"version", dict.version}, {"entries", std::move(entries)}, {"provenance", std::move(provenance)}};
}

SchemaDictionary decode_dictionary(const ojson& doc) {
    try {
        SchemaDictionary dict;
        dict.version = doc.at("version").get<std::int64_t>();
        for (const auto& v : doc.at("entries")) {
            GuidelineEntry e;
            auto task = parse_task(v.at("task").get<std::string>());
            if (!task) throw Error(ErrorCode::MalformedRecord, "bad task in dictionary entry");
            e.task = *task;
            e.label = v.at("label").get<std::string>();
            e.descriptions = strings(v.value("descriptions", ojson::array()));
            for (const auto& o : v.value("description_origins", ojson::array())) {
                auto origin = parse_origin(o.get<std::string>());
                e.description_origins.push_back(origin.value_or(Origin::Curated));
            }
            // Hand-edited files may list descriptions without origins.
            e.description_origins.resize(e.descriptions.size(), Origin::Curated);
            e.name_variants = strings(v.value("name_variants", ojson::array()));
            std::erase(e.name_variants, e.label);
            e.typical_values = strings(v.value("typical_values", ojson::array()));
            for (const auto& r : v.value("roles", ojson::array())) {
                e.roles.push_back({r.at("role").get<std::string>(), strings(r.value("descriptions", ojson::array())),
                                   strings(r.value("typical_values", ojson::array()))});
            }
            for (const auto& ex : v.value("positive_examples", ojson::array())) e.positive_examples.push_back(decode_example(ex));
            for (const auto& ex : v.value("negative_examples", ojson::array())) e.negative_examples.push_back(decode_example(ex));
            dict.entries[{e.task, e.label}] = std::move(e);
        }
        const ojson provenance = doc.value("provenance", ojson::object());
        for (const auto& [k, o] : provenance.items()) {
            dict.provenance[k] = parse_origin(o.get<std::string>()).value_or(Origin::Curated);
        }
        return dict;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("dictionary: ") + e.what());
    }
}

void save_dictionary(const SchemaDictionary& dict, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
        out << encode_dictionary(dict).dump(1) << '\n';
        if (!out) throw Error(ErrorCode::Io, "write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

SchemaDictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    try {
        return decode_dictionary(ojson::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, path.string() + ": " + e.what());
    }
}

}  // namespace nluforge
