#include <gtest/gtest.h>

#include <map>
#include <set>

#include "nluforge/basic.hpp"
#include "nluforge/compound.hpp"
#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"
#include "synthetic.hpp"

using namespace nluforge;

namespace {

TaskSchema names(std::vector<std::string> labels, std::optional<std::string> desc = std::nullopt) {
    TaskSchema s;
    for (auto& l : labels) {
        SchemaEntry e{l, EntryKind::EntityType};
        e.description = desc;
        s.entries.push_back(e);
    }
    return s;
}

TEST(MaskLabels, ZeroRatioIsIdentity) {
    SeededRng rng(1);
    auto [schema, map] = mask_labels(names({"a", "b", "c"}), 0.0, "LABEL_{i}", rng);
    EXPECT_EQ(schema, names({"a", "b", "c"}));
    EXPECT_TRUE(map.empty());
}

TEST(MaskLabels, FullRatioOnSingleLabel) {
    SeededRng rng(1);
    auto [schema, map] = mask_labels(names({"degree"}, "The name of educational qualifications and degrees."), 1.0,
                                     "LABEL_{i}", rng);
    ASSERT_EQ(schema.entries.size(), 1u);
    EXPECT_EQ(schema.entries[0].name, "LABEL_1");
    EXPECT_EQ(schema.entries[0].description, "The name of educational qualifications and degrees.");
    EXPECT_EQ(map, (MaskMap{{"LABEL_1", "degree"}}));
}

TEST(MaskLabels, HalfRatioIsUniformOverSubsets) {
    // Exactly 3 of 6 are masked; by symmetry each label is masked in C(5,2)/C(6,3) = 1/2 of draws.
    const auto schema = names({"a", "b", "c", "d", "e", "f"});
    std::map<std::string, int> masked;
    const int runs = 10000;
    for (int seed = 0; seed < runs; ++seed) {
        auto rng = SeededRng::stream(seed, "s", "mask");
        auto [out, map] = mask_labels(schema, 0.5, "LABEL_{i}", rng);
        ASSERT_EQ(map.size(), 3u);
        for (const auto& [ph, orig] : map) ++masked[orig];
    }
    for (const auto& l : schema.names()) EXPECT_NEAR(masked[l] / double(runs), 0.5, 0.03) << l;
}

TEST(MaskLabels, PlaceholdersSkipExistingNames) {
    SeededRng rng(3);
    auto [schema, map] = mask_labels(names({"LABEL_1", "x"}), 1.0, "LABEL_{i}", rng);
    const auto shown_names = schema.names();
    std::set<std::string> shown(shown_names.begin(), shown_names.end());
    EXPECT_EQ(shown.size(), 2u);
    for (const auto& [ph, orig] : map) EXPECT_EQ(map.count(orig), 0u);
    EXPECT_EQ(map.count("LABEL_1"), 0u);
}

TEST(PlaceholderPattern, WithoutSlotIsInvalid) {
    GuidelineConfig c;
    c.placeholder_pattern = "MASK";
    EXPECT_THROW(c.validate(), Error);
}

SchemaDictionary dict_with(TaskKind task, const std::string& label, std::vector<std::string> variants) {
    SchemaDictionary d;
    GuidelineEntry e;
    e.label = label;
    e.task = task;
    e.name_variants = std::move(variants);
    d.entries[{task, label}] = e;
    return d;
}

TEST(LabelVariants, CertainSubstitutionDrawsFromVariants) {
    const auto dict = dict_with(TaskKind::NER, "Position", {"Title", "Job", "Occupation"});
    std::set<std::string> seen;
    for (int seed = 0; seed < 200; ++seed) {
        SeededRng rng(seed);
        auto [schema, map] = apply_label_variants(names({"Position"}), TaskKind::NER, dict, 1.0, rng);
        const auto& n = schema.entries[0].name;
        EXPECT_TRUE(n == "Title" || n == "Job" || n == "Occupation") << n;
        EXPECT_EQ(map.at(n), "Position");
        seen.insert(n);
    }
    EXPECT_EQ(seen.size(), 3u);
}

TEST(LabelVariants, ZeroProbabilityAndEmptyListsAreIdentity) {
    const auto dict = dict_with(TaskKind::NER, "Position", {"Title"});
    SeededRng rng(1);
    auto [a, ma] = apply_label_variants(names({"Position"}), TaskKind::NER, dict, 0.0, rng);
    EXPECT_EQ(a, names({"Position"}));
    EXPECT_TRUE(ma.empty());
    const auto empty = dict_with(TaskKind::NER, "Position", {});
    auto [b, mb] = apply_label_variants(names({"Position"}), TaskKind::NER, empty, 1.0, rng);
    EXPECT_EQ(b, names({"Position"}));
    EXPECT_TRUE(mb.empty());
}

TEST(LabelVariants, CollidingVariantIsNotApplied) {
    const auto dict = dict_with(TaskKind::NER, "Position", {"Title"});
    SeededRng rng(1);
    auto [schema, map] = apply_label_variants(names({"Position", "Title"}), TaskKind::NER, dict, 1.0, rng);
    EXPECT_EQ(schema, names({"Position", "Title"}));
    EXPECT_TRUE(map.empty());
}

struct Fixture {
    std::vector<UnifiedSample> corpus = nftest::synthetic_corpus(std::vector<std::size_t>(11, 60), 11);
    SchemaDictionary dict = [&] {
        auto d = build_dictionary(corpus, {});
        for (auto& [k, e] : d.entries) {
            if (e.descriptions.empty()) {
                e.descriptions.push_back("About " + e.label + ".");
                e.description_origins.push_back(Origin::Curated);
            }
            e.name_variants = {e.label + " variant"};
        }
        return d;
    }();
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

TEST(InjectGuidelines, AllOffReducesToBasic) {
    const auto& f = fixture();
    for (const auto& s : f.corpus) {
        if (s.task == TaskKind::IG) continue;
        const auto a = inject_guidelines(s, f.dict, GuidelineConfig::all_off(), 5);
        EXPECT_EQ(a, plain_annotation(s, 5));
        const TemplateId id{s.task, 0};
        const auto c = render_compound(a, id, default_format(s.task));
        const auto b = render_basic(s, id, 5);
        EXPECT_EQ(c.prompt, b.prompt) << s.id;
        EXPECT_EQ(c.target, b.target) << s.id;
        EXPECT_EQ(c.format, b.format);
        EXPECT_EQ(c.style, Style::C);
        EXPECT_TRUE(c.strategies.empty());
    }
}

TEST(InjectGuidelines, DescriptionFrequencyFollowsProbability) {
    const auto& f = fixture();
    UnifiedSample s;
    for (const auto& x : f.corpus)
        if (x.task == TaskKind::NER && x.schema.entries.size() == 1) s = x;
    ASSERT_FALSE(s.id.empty());
    GuidelineConfig cfg = GuidelineConfig::all_off();
    cfg.use_description = 0.5;
    int present = 0;
    for (int seed = 0; seed < 1000; ++seed) present += !inject_guidelines(s, f.dict, cfg, seed).descriptions.empty();
    EXPECT_GE(present, 450);
    EXPECT_LE(present, 550);
}

TEST(InjectGuidelines, NeverShowsTheHostAsExample) {
    const auto& f = fixture();
    GuidelineConfig cfg;
    cfg.n_examples_min = cfg.n_examples_max = 4;
    for (const auto& s : f.corpus) {
        if (s.task == TaskKind::IG) continue;
        const auto a = inject_guidelines(s, f.dict, cfg, 2);
        std::set<std::string> ids;
        for (const auto& ex : a.examples) {
            EXPECT_NE(ex.source_id, s.id);
            EXPECT_TRUE(ids.insert(ex.source_id).second);
        }
        EXPECT_LE(a.examples.size(), 4u);
    }
}

TEST(InjectGuidelines, ExampleCountDoesNotMoveOtherDecisions) {
    const auto& f = fixture();
    GuidelineConfig few, many;
    few.n_examples_min = few.n_examples_max = 0;
    many.n_examples_min = many.n_examples_max = 4;
    for (const auto& s : f.corpus) {
        if (s.task == TaskKind::IG) continue;
        const auto a = inject_guidelines(s, f.dict, few, 8);
        const auto b = inject_guidelines(s, f.dict, many, 8);
        EXPECT_EQ(a.descriptions, b.descriptions);
        EXPECT_EQ(a.renames, b.renames);
        EXPECT_EQ(a.mask_map, b.mask_map);
    }
}

TEST(InjectGuidelines, UnknownLabelThrows) {
    UnifiedSample s;
    s.id = "x";
    s.task = TaskKind::NER;
    s.text = "t";
    s.schema = names({"nowhere"});
    s.gold = EntitySet{};
    try {
        inject_guidelines(s, fixture().dict, {}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownLabel);
    }
}

TEST(InjectGuidelines, FewRelShapeWithTwoExamples) {
    std::vector<UnifiedSample> corpus;
    auto re = [&](const std::string& id, const std::string& text, std::vector<Relation> rel) {
        UnifiedSample s;
        s.id = id;
        s.task = TaskKind::RE;
        s.text = text;
        s.schema.entries.push_back({"religion", EntryKind::Relation});
        s.gold = RelationSet{std::move(rel)};
        corpus.push_back(s);
    };
    re("host", "Vincent Madeley Harris was an American clergyman of the Catholic Church .",
       {{"religion", "Vincent Madeley Harris", "Catholic Church"}});
    re("pos", "the Irish patron saint began his mission to convert the country to Christianity .",
       {{"religion", "patron saint", "Christianity"}});
    re("neg", "Leonard fought Wilfred Benitez for the WBC Welterweight Championship .", {});
    auto dict = build_dictionary(corpus, {});
    dict.entries.at({TaskKind::RE, "religion"}).descriptions = {
        "This type of relation is about the connection between a subject and their religious belief or faith."};
    dict.entries.at({TaskKind::RE, "religion"}).description_origins = {Origin::Curated};

    GuidelineConfig cfg = GuidelineConfig::all_off();
    cfg.use_description = 1.0;
    cfg.n_examples_min = cfg.n_examples_max = 2;
    cfg.typical_values = 0;
    const auto a = inject_guidelines(corpus[0], dict, cfg, 1);
    ASSERT_EQ(a.examples.size(), 2u);
    const auto r = render_compound(a, {TaskKind::RE, 1}, OutputFormat::JSON);
    const auto prompt = ojson::parse(r.prompt);
    EXPECT_NE(prompt["instruction"].get<std::string>().find("You can refer to the example for extraction."),
              std::string::npos);
    EXPECT_EQ(prompt["schema"][0]["relation"], "religion");
    EXPECT_TRUE(prompt["schema"][0].contains("description"));
    EXPECT_EQ(prompt["example"].size(), 2u);
    EXPECT_TRUE(r.has(Strategy::GUIDELINES));
    EXPECT_EQ(r.target, "{\"religion\":[{\"subject\":\"Vincent Madeley Harris\",\"object\":\"Catholic Church\"}]}");
}

TEST(RenderCompound, GuidelineEventSchemaCarriesTypicalValuesAndRoleDescriptions) {
    UnifiedSample s;
    s.id = "guideline:1";
    s.task = TaskKind::EE;
    s.text = "Two days later , Timothy Morgan of Blindspot Security came forward and presented a more ominious "
             "exploitation scenario where the FTP URL handlers in Java and Python could be used to bypass firewalls .";
    SchemaEntry e{"discover vulnerability", EntryKind::EventType};
    e.trigger = true;
    e.roles = {"vulnerable system version", "time", "vulnerable system"};
    s.schema.entries.push_back(e);
    s.gold = EventSet{{EventMention{"discover vulnerability",
                                    "came forward",
                                    {{"time", std::string("Two days later")},
                                     {"vulnerable system", std::vector<std::string>{"Java", "Python"}}}}}};
    SchemaDictionary dict;
    GuidelineEntry g;
    g.label = "discover vulnerability";
    g.task = TaskKind::EE;
    g.descriptions = {"Event type for identifying and reporting software or system weaknesses."};
    g.description_origins = {Origin::Curated};
    g.typical_values = {"have had their fair share"};
    g.roles = {{"vulnerable system version",
                {"Vulnerable system versions can vary from specific ones like '3.2.2' to ranges like '2.3.5-2.3.31'."},
                {"versions 2.5"}},
               {"time", {"When was the vulnerability discovered?"}, {"last Saturday"}}};
    dict.entries[{TaskKind::EE, g.label}] = g;

    GuidelineConfig cfg = GuidelineConfig::all_off();
    cfg.use_description = 1.0;
    const auto a = inject_guidelines(s, dict, cfg, 1);
    const auto r = render_compound(a, {TaskKind::EE, 0}, OutputFormat::JSON);
    EXPECT_NE(r.prompt.find("typical examples: versions 2.5"), std::string::npos) << r.prompt;
    EXPECT_NE(r.prompt.find("typical examples: have had their fair share"), std::string::npos);
    const auto schema = ojson::parse(r.prompt)["schema"][0];
    EXPECT_EQ(schema["arguments"][0]["argument"], "vulnerable system version");
    EXPECT_TRUE(schema["arguments"][0].contains("description"));
    EXPECT_FALSE(schema["arguments"][2].contains("description"));
    const auto parsed = parse(r.target, TaskKind::EE, OutputFormat::JSON, s.schema);
    EXPECT_EQ(parsed.gold, canonicalize_gold(s.gold, TaskKind::EE, s.schema));
}

TEST(RenderCompound, UnsupportedFormatThrows) {
    const auto& f = fixture();
    for (const auto& s : f.corpus) {
        if (s.task != TaskKind::EE) continue;
        try {
            render_compound(plain_annotation(s, 1), {TaskKind::EE, 0}, OutputFormat::MARKDOWN_TABLE);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::UnsupportedFormat);
        }
        break;
    }
}

TEST(RenderCompound, MaskedTargetsUnmaskToOriginalGold) {
    const auto& f = fixture();
    GuidelineConfig cfg;
    cfg.mask_ratio = 0.6;
    cfg.variant_prob = 0.5;
    std::size_t masked = 0;
    const EmptyWeights weights;
    for (const auto& s : f.corpus) {
        if (s.task == TaskKind::IG) continue;
        for (auto format : supported_formats(s.task)) {
            const auto a = inject_guidelines(s, f.dict, cfg, 21);
            const auto r = render_compound(a, {s.task, 0}, format, &weights);
            masked += !a.mask_map.empty();
            EXPECT_EQ(r.provenance["mask_map"], encode_name_map(a.mask_map));
            const auto parsed = parse(r.target, s.task, format, a.shown_schema);
            EXPECT_TRUE(parsed.unknown_labels.empty());
            EXPECT_EQ(canonicalize_gold(unmask_gold(parsed.gold, a.mask_map, a.variant_map), s.task, s.schema),
                      canonicalize_gold(s.gold, s.task, s.schema))
                << s.id << " " << to_string(format) << "\n" << r.target;
        }
    }
    EXPECT_GT(masked, 100u);
}

TEST(GuidelineConfigJson, RoundTripsAndRejectsBadValues) {
    GuidelineConfig c;
    c.mask_ratio = 0.3;
    c.placeholder_pattern = "<L{i}>";
    const auto back = decode_guideline_config(encode_guideline_config(c));
    EXPECT_EQ(back.mask_ratio, 0.3);
    EXPECT_EQ(back.placeholder_pattern, "<L{i}>");
    EXPECT_THROW(decode_guideline_config(ojson{{"use_description", 1.5}}), Error);
    EXPECT_THROW(decode_guideline_config(ojson{{"n_examples_min", 5}, {"n_examples_max", 2}}), Error);
}

}  // namespace
