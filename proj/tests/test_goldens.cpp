#include <gtest/gtest.h>

#include <set>

#include "nluforge/basic.hpp"
#include "nluforge/compound.hpp"
#include "nluforge/formats.hpp"
#include "synthetic.hpp"

using namespace nluforge;

namespace {

class TableGolden : public ::testing::TestWithParam<nftest::Golden> {};

TEST_P(TableGolden, PromptAndTargetAreByteExact) {
    const auto& g = GetParam();
    const TemplateId id{g.sample.task, g.template_index};
    RenderedInstruction r;
    if (g.style == Style::B) {
        ASSERT_EQ(g.format, default_format(g.sample.task));
        r = render_basic(g.sample, id, 7);
    } else {
        r = render_compound(nftest::golden_annotation(g), id, g.format);
    }
    EXPECT_EQ(r.prompt, g.prompt);
    EXPECT_EQ(r.target, g.target);
    EXPECT_EQ(r.style, g.style);
    EXPECT_EQ(r.format, g.format);
}

TEST_P(TableGolden, TargetParsesBackToGold) {
    const auto& g = GetParam();
    const auto parsed = parse(g.target, g.sample.task, g.format, g.sample.schema);
    EXPECT_TRUE(parsed.unknown_labels.empty());
    EXPECT_EQ(parsed.gold, canonicalize_gold(g.sample.gold, g.sample.task, g.sample.schema));
}

class TableLabel : public ::testing::TestWithParam<nftest::Golden> {};

TEST_P(TableLabel, ListOfRecordsShapeParses) {
    const auto& g = GetParam();
    const auto parsed = parse(g.label, g.sample.task, OutputFormat::JSON, g.sample.schema);
    EXPECT_EQ(parsed.gold, canonicalize_gold(g.sample.gold, g.sample.task, g.sample.schema));
}

INSTANTIATE_TEST_SUITE_P(Goldens, TableGolden, ::testing::ValuesIn(nftest::load_goldens()),
                         [](const auto& info) { return info.param.name; });

std::vector<nftest::Golden> with_label() {
    std::vector<nftest::Golden> out;
    for (auto& g : nftest::load_goldens())
        if (!g.label.empty()) out.push_back(g);
    return out;
}

INSTANTIATE_TEST_SUITE_P(Goldens, TableLabel, ::testing::ValuesIn(with_label()),
                         [](const auto& info) { return info.param.name; });

TEST(TableGoldens, CoverEveryStructuredTask) {
    std::set<TaskKind> seen;
    for (const auto& g : nftest::load_goldens()) seen.insert(g.sample.task);
    for (auto task : kAllTasks) {
        if (task == TaskKind::IG) continue;
        EXPECT_TRUE(seen.count(task)) << to_string(task);
    }
}

TEST(InstructionGeneralist, PassesThroughUnchanged) {
    UnifiedSample s;
    s.id = "ig:1";
    s.task = TaskKind::IG;
    s.text = "Give three tips for staying healthy.";
    s.gold = FreeResponse{"1. Eat a balanced diet.\n2. Exercise regularly.\n3. Get enough sleep."};
    const auto r = render_basic(s, {TaskKind::IG, 0}, 1);
    EXPECT_EQ(r.prompt, s.text);
    EXPECT_EQ(r.target, std::get<FreeResponse>(s.gold).text);
    EXPECT_EQ(r.id, "ig:1#B");
    EXPECT_EQ(r.style, Style::B);
    EXPECT_TRUE(r.strategies.empty());
}

}  // namespace
