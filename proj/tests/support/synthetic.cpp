#include "synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"

namespace nftest {

namespace {

// Pieces that stress every serializer: delimiters, escapes, quotes, colons,
// brackets, non-ASCII and embedded newlines.
const std::vector<std::string> kTricky = {
    "a;b",   "x|y",       "k: v",      "say \"hi\"", "back\\slash", "[bracket]", "(paren)", "中文实体",
    "café",  "line\nnext", "tab\tgap",  "{brace}",   "a, b",        "\\|",       "]:",      "NAN x",
    "0",     "-",          "--- | ---", "\"",        "'quoted'",    "#hash",     "*",       "é|;:",
};

const std::vector<std::string> kWords = {
    "alpha", "bravo", "Charlie", "delta", "Echo", "foxtrot", "Golf", "hotel", "India", "juliet",
    "Kilo",  "lima",  "Mike",    "north", "Oscar", "papa",   "Quebec", "river", "Sierra", "tango",
};

std::string pick(const std::vector<std::string>& v, SeededRng& rng) { return v[rng.below(v.size())]; }

std::string fuzz_span(SeededRng& rng) {
    const std::size_t n = 1 + rng.below(3);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += rng.bernoulli(0.3) ? pick(kTricky, rng) : pick(kWords, rng);
    }
    return out;
}

std::string fuzz_name(SeededRng& rng, std::size_t i) {
    static const std::vector<std::string> stems = {"person", "org", "loc", "date", "work of art", "性别", "a;b",
                                                    "x|y",    "k: v", "type-\"q\""};
    return stems[rng.below(stems.size())] + "_" + std::to_string(i);
}

std::vector<std::string> fuzz_roles(SeededRng& rng, std::size_t n) {
    static const std::vector<std::string> stems = {"agent", "target", "time", "place", "instrument", "角色"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(stems[rng.below(stems.size())] + std::to_string(i));
    return out;
}

ArgValue fuzz_arg(SeededRng& rng) {
    switch (rng.below(3)) {
        case 0: return fuzz_span(rng);
        case 1: {
            std::vector<std::string> list;
            const std::size_t n = 1 + rng.below(3);
            for (std::size_t i = 0; i < n; ++i) list.push_back(fuzz_span(rng));
            return list;
        }
        default: return Nan{};
    }
}

AttrValue fuzz_attr(SeededRng& rng) {
    if (rng.bernoulli(0.5)) return fuzz_span(rng);
    std::vector<std::string> list;
    const std::size_t n = 1 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) list.push_back(fuzz_span(rng));
    return list;
}

}  // namespace

TaskSchema fuzz_schema(TaskKind task, SeededRng& rng) {
    TaskSchema schema;
    const EntryKind kind = entry_kind_for(task);
    if (task == TaskKind::MRC) {
        SchemaEntry e{"question", kind};
        e.question = fuzz_span(rng) + "?";
        schema.entries.push_back(e);
        return schema;
    }
    if (task == TaskKind::OPENIE) {
        SchemaEntry e{"open tuple", kind};
        e.roles = {"subject", "predicate", "object", "time", "location"};
        schema.entries.push_back(e);
        return schema;
    }
    if (task == TaskKind::IG) return schema;
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) {
        SchemaEntry e{fuzz_name(rng, i), kind};
        if (task == TaskKind::SPO) {
            e.subject_type = fuzz_name(rng, 10 + i);
            e.object_type = fuzz_name(rng, 20 + i);
        }
        if (is_event_task(task) || task == TaskKind::KGE) e.roles = fuzz_roles(rng, 1 + rng.below(4));
        if (task == TaskKind::EE || task == TaskKind::EET) e.trigger = true;
        if (task == TaskKind::EEA) e.given_trigger = fuzz_span(rng);
        schema.entries.push_back(std::move(e));
    }
    return schema;
}

GoldLabel fuzz_gold(TaskKind task, const TaskSchema& schema, SeededRng& rng) {
    const std::size_t items = rng.below(5);
    auto label = [&]() -> const SchemaEntry& { return schema.entries[rng.below(schema.entries.size())]; };
    GoldLabel gold = empty_gold(task);
    switch (task) {
        case TaskKind::NER: {
            EntitySet g;
            for (std::size_t i = 0; i < items; ++i) g.items.push_back({label().name, fuzz_span(rng)});
            gold = g;
            break;
        }
        case TaskKind::RE: {
            RelationSet g;
            for (std::size_t i = 0; i < items; ++i) g.items.push_back({label().name, fuzz_span(rng), fuzz_span(rng)});
            gold = g;
            break;
        }
        case TaskKind::SPO: {
            SpoSet g;
            for (std::size_t i = 0; i < items; ++i) {
                const auto& e = label();
                g.items.push_back({e.name, fuzz_span(rng), *e.subject_type, fuzz_span(rng), *e.object_type});
            }
            gold = g;
            break;
        }
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: {
            EventSet g;
            for (std::size_t i = 0; i < items; ++i) {
                const auto& e = label();
                EventMention m{e.name, std::nullopt, {}};
                if (task != TaskKind::EEA) m.trigger = fuzz_span(rng);
                if (task != TaskKind::EET) {
                    for (const auto& role : e.roles)
                        if (rng.bernoulli(0.7)) m.arguments.emplace_back(role, fuzz_arg(rng));
                }
                g.items.push_back(std::move(m));
            }
            gold = g;
            break;
        }
        case TaskKind::OPENIE: {
            OpenTuples g;
            const auto& roles = schema.entries.front().roles;
            for (std::size_t i = 0; i < items; ++i) {
                OpenTuple t;
                auto order = rng.sample_indices(roles.size(), 1 + rng.below(roles.size()));
                for (auto r : order) t.push_back({roles[r], fuzz_span(rng)});
                g.items.push_back(std::move(t));
            }
            gold = g;
            break;
        }
        case TaskKind::KGE: {
            KgEntities g;
            for (std::size_t i = 0; i < items; ++i) {
                const auto& e = label();
                KgEntity ent{fuzz_span(rng), {}};
                for (const auto& role : e.roles)
                    if (rng.bernoulli(0.6)) ent.attributes.emplace_back(role, fuzz_attr(rng));
                auto it = std::find_if(g.types.begin(), g.types.end(), [&](const KgType& t) { return t.type == e.name; });
                if (it == g.types.end()) {
                    g.types.push_back({e.name, {std::move(ent)}});
                } else if (std::none_of(it->entities.begin(), it->entities.end(),
                                        [&](const KgEntity& x) { return x.name == ent.name; })) {
                    // Entity names key a JSON object, so they are unique per type.
                    it->entities.push_back(std::move(ent));
                }
            }
            gold = g;
            break;
        }
        case TaskKind::MRC: gold = Answer{fuzz_span(rng)}; break;
        case TaskKind::TC: gold = ClassLabel{label().name}; break;
        case TaskKind::IG: gold = FreeResponse{fuzz_span(rng)}; break;
    }
    return canonicalize_gold(gold, task, schema);
}

namespace {

const std::vector<std::string> kPeople = {"Ada Lovelace", "Alan Turing", "Grace Hopper", "Yann LeCun",
                                          "Geoffrey Hinton", "Marie Curie", "James Cameron", "Ken Thompson"};
const std::vector<std::string> kOrgs = {"Acme Corp", "Blindspot Security", "Zhejiang University", "Globex",
                                        "Initech", "Umbrella Labs"};
const std::vector<std::string> kPlaces = {"Hangzhou", "Los Angeles", "Paris", "Nairobi", "Lima", "Oslo"};
const std::vector<std::string> kFiller = {"reported", "that", "the", "team", "met", "on", "Monday", "and",
                                          "agreed", "with", "plans", "for", "growth", "in", "the", "region"};

std::string sentence(SeededRng& rng, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += pick(kFiller, rng);
    }
    return out;
}

struct TextBuilder {
    std::string text;
    SeededRng& rng;
    /// Appends filler then `span`; returns the span.
    std::string put(const std::string& span) {
        if (!text.empty()) text += ' ';
        text += sentence(rng, 1 + rng.below(4)) + ' ' + span;
        return span;
    }
    std::string finish() {
        text += ' ' + sentence(rng, 2) + " .";
        return text;
    }
};

SchemaEntry entry(const std::string& name, TaskKind task) { return SchemaEntry{name, entry_kind_for(task)}; }

}  // namespace

UnifiedSample synthetic_sample(TaskKind task, std::size_t index, SeededRng& rng) {
    UnifiedSample s;
    s.id = "syn-" + std::string(to_string(task)) + "-" + std::to_string(index);
    s.task = task;
    s.source = "synthetic";
    TextBuilder tb{"", rng};
    const std::size_t items = rng.below(4);

    switch (task) {
        case TaskKind::NER: {
            const std::vector<std::pair<std::string, const std::vector<std::string>*>> labels = {
                {"person", &kPeople}, {"organization", &kOrgs}, {"location", &kPlaces}};
            const std::size_t n = 1 + rng.below(labels.size());
            EntitySet g;
            for (std::size_t i = 0; i < n; ++i) {
                SchemaEntry e = entry(labels[i].first, task);
                if (rng.bernoulli(0.5)) e.description = "Names of " + labels[i].first + " mentions.";
                s.schema.entries.push_back(e);
            }
            for (std::size_t i = 0; i < items; ++i) {
                const auto& l = labels[rng.below(n)];
                g.items.push_back({l.first, tb.put(pick(*l.second, rng))});
            }
            s.gold = g;
            break;
        }
        case TaskKind::RE: {
            const std::vector<std::string> labels = {"founded by", "located in", "employer"};
            const std::size_t n = 1 + rng.below(labels.size());
            for (std::size_t i = 0; i < n; ++i) s.schema.entries.push_back(entry(labels[i], task));
            RelationSet g;
            for (std::size_t i = 0; i < items; ++i) {
                auto subj = tb.put(pick(kOrgs, rng));
                auto obj = tb.put(pick(kPeople, rng));
                g.items.push_back({labels[rng.below(n)], subj, obj});
            }
            s.gold = g;
            break;
        }
        case TaskKind::SPO: {
            struct P { const char* p; const char* st; const char* ot; };
            const std::vector<P> labels = {{"directed", "person", "film"}, {"works for", "person", "organization"},
                                           {"based in", "organization", "city"}};
            const std::size_t n = 1 + rng.below(labels.size());
            for (std::size_t i = 0; i < n; ++i) {
                SchemaEntry e = entry(labels[i].p, task);
                e.subject_type = labels[i].st;
                e.object_type = labels[i].ot;
                s.schema.entries.push_back(e);
            }
            SpoSet g;
            for (std::size_t i = 0; i < items; ++i) {
                const auto& l = labels[rng.below(n)];
                auto subj = tb.put(pick(kPeople, rng));
                auto obj = tb.put(pick(kOrgs, rng));
                g.items.push_back({l.p, subj, l.st, obj, l.ot});
            }
            s.gold = g;
            break;
        }
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: {
            struct Ev { const char* type; std::vector<std::string> roles; const char* trigger; };
            const std::vector<Ev> labels = {{"attack", {"attacker", "target", "place"}, "struck"},
                                            {"hire", {"employer", "employee"}, "hired"},
                                            {"discover vulnerability", {"vulnerability", "time"}, "found"}};
            const std::size_t n = 1 + rng.below(labels.size());
            for (std::size_t i = 0; i < n; ++i) {
                SchemaEntry e = entry(labels[i].type, task);
                if (task != TaskKind::EET) e.roles = labels[i].roles;
                if (task != TaskKind::EEA) e.trigger = true;
                if (task == TaskKind::EEA) e.given_trigger = labels[i].trigger;
                if (rng.bernoulli(0.5)) e.description = std::string("Events of type ") + labels[i].type + ".";
                s.schema.entries.push_back(e);
            }
            EventSet g;
            const std::size_t mentions = task == TaskKind::EEA ? std::max<std::size_t>(items, 1) : items;
            for (std::size_t i = 0; i < mentions; ++i) {
                const auto& l = labels[task == TaskKind::EEA ? 0 : rng.below(n)];
                EventMention m{l.type, std::nullopt, {}};
                if (task != TaskKind::EEA) m.trigger = tb.put(l.trigger);
                if (task != TaskKind::EET) {
                    for (const auto& role : l.roles) {
                        if (rng.bernoulli(0.3)) m.arguments.emplace_back(role, Nan{});
                        else m.arguments.emplace_back(role, tb.put(pick(rng.bernoulli(0.5) ? kPeople : kOrgs, rng)));
                    }
                }
                g.items.push_back(std::move(m));
            }
            if (task == TaskKind::EEA) {
                // EEA schemas carry the one event type whose trigger is given.
                s.schema.entries.resize(1);
                tb.put(labels[0].trigger);
            }
            s.gold = g;
            break;
        }
        case TaskKind::OPENIE: {
            SchemaEntry e = entry("open tuple", task);
            e.roles = {"subject", "predicate", "object", "time", "location"};
            s.schema.entries.push_back(e);
            OpenTuples g;
            for (std::size_t i = 0; i < items; ++i) {
                OpenTuple t{{"subject", tb.put(pick(kPeople, rng))},
                            {"predicate", tb.put("visited")},
                            {"object", tb.put(pick(kPlaces, rng))}};
                if (rng.bernoulli(0.3)) t.push_back({"time", tb.put("in 1968")});
                g.items.push_back(std::move(t));
            }
            s.gold = g;
            break;
        }
        case TaskKind::KGE: {
            SchemaEntry e = entry("person", task);
            e.roles = {"employer", "birth place"};
            s.schema.entries.push_back(e);
            SchemaEntry o = entry("organization", task);
            o.roles = {"headquarters"};
            if (rng.bernoulli(0.5)) s.schema.entries.push_back(o);
            KgEntities g;
            if (items > 0) {
                KgType t{"person", {}};
                for (auto who : rng.sample_indices(kPeople.size(), items)) {
                    KgEntity ent{tb.put(kPeople[who]), {}};
                    ent.attributes.emplace_back("employer", tb.put(pick(kOrgs, rng)));
                    if (rng.bernoulli(0.5)) ent.attributes.emplace_back("birth place", tb.put(pick(kPlaces, rng)));
                    t.entities.push_back(std::move(ent));
                }
                g.types.push_back(std::move(t));
            }
            s.gold = g;
            break;
        }
        case TaskKind::MRC: {
            SchemaEntry e = entry("question", task);
            const std::string who = tb.put(pick(kPeople, rng));
            tb.put("founded");
            const std::string org = tb.put(pick(kOrgs, rng));
            e.question = "Who founded " + org + "?";
            if (rng.bernoulli(0.5)) e.choices = {who, "nobody", "someone else"};
            s.schema.entries.push_back(e);
            s.gold = Answer{who};
            break;
        }
        case TaskKind::TC: {
            const std::vector<std::string> labels = {"sports", "finance", "technology", "politics"};
            for (const auto& l : labels) s.schema.entries.push_back(entry(l, task));
            const auto& cls = labels[rng.below(labels.size())];
            tb.put("news about " + cls);
            s.gold = ClassLabel{cls};
            break;
        }
        case TaskKind::IG: {
            tb.put("Write a short note about " + pick(kPlaces, rng));
            s.gold = FreeResponse{"A short note about the place, number " + std::to_string(index) + "."};
            break;
        }
    }
    s.text = tb.finish();
    s.gold = canonicalize_gold(s.gold, task, s.schema);
    return s;
}

std::vector<UnifiedSample> synthetic_corpus(const std::vector<std::size_t>& per_task, std::uint64_t seed) {
    std::vector<UnifiedSample> out;
    for (std::size_t t = 0; t < per_task.size() && t < kAllTasks.size(); ++t) {
        const TaskKind task = kAllTasks[t];
        for (std::size_t i = 0; i < per_task[t]; ++i) {
            auto rng = SeededRng::stream(seed, std::string(to_string(task)) + "/" + std::to_string(i), "synthetic");
            out.push_back(synthetic_sample(task, i, rng));
        }
    }
    return out;
}

std::vector<UnifiedSample> synthetic_corpus(std::size_t total, std::uint64_t seed) {
    // Hum percentages in kAllTasks order.
    const std::vector<double> shares = {23, 29, 11, 5, 3, 2, 4, 12, 2, 1, 8};
    std::vector<std::size_t> counts;
    for (double s : shares) counts.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(total * s / 100.0)));
    return synthetic_corpus(counts, seed);
}

std::filesystem::path test_data(const std::string& relative) { return std::filesystem::path(NF_TEST_DATA_DIR) / relative; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("nluforge-test-" + name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<Golden> load_goldens() {
    const auto doc = ojson::parse(read_file(test_data("goldens/appendix.json")));
    std::vector<Golden> out;
    for (const auto& g : doc.at("goldens")) {
        Golden x;
        x.name = g.at("name").get<std::string>();
        x.table = g.at("table").get<std::string>();
        x.sample = decode_sample(g.at("sample"));
        x.template_index = g.at("template").get<std::size_t>();
        x.format = *parse_format(g.at("format").get<std::string>());
        x.style = *parse_style(g.at("style").get<std::string>());
        x.prompt = g.at("prompt").get<std::string>();
        x.target = g.at("target").get<std::string>();
        if (g.contains("compound")) {
            x.compound = true;
            x.compound_spec = g.at("compound");
        }
        x.label = g.value("label", "");
        out.push_back(std::move(x));
    }
    return out;
}

AnnotatedSample golden_annotation(const Golden& g) {
    AnnotatedSample a = plain_annotation(g.sample, 0);
    const auto& spec = g.compound_spec;
    if (spec.contains("descriptions"))
        for (const auto& [k, v] : spec["descriptions"].items()) a.descriptions[k] = v.get<std::string>();
    if (spec.contains("examples"))
        for (const auto& ex : spec["examples"])
            a.examples.push_back({ex.at("source_id").get<std::string>(), ex.at("input").get<std::string>(),
                                  decode_schema(ex.at("schema")), decode_gold(ex.at("output"))});
    a.guidelines_injected = !a.descriptions.empty() || !a.examples.empty();
    return a;
}

}  // namespace nftest
