#include "rule_fuzz.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "nluforge/formats.hpp"
#include "nluforge/rng.hpp"
#include "synthetic.hpp"

using namespace nluforge;

namespace nftest {

UnifiedSample rule_fuzz_sample(std::size_t index, SeededRng& rng) {
    static const std::vector<std::string> titles = {"President of the United States", "President", "Dr.", "Mr.",
                                                    "Prof.", "Senator"};
    static const std::vector<std::string> names = {"Biden", "Alice Wong", "Li Lei", "Ada", "Grace Hopper"};
    static const std::vector<std::pair<std::string, std::string>> money = {
        {"$ ", ""}, {"", " $"}, {"", " %"}, {"US$", ""}, {"", " million dollars"}, {"\xC2\xA5", ""}, {"", "\xE5\x85\x83"}};
    static const std::vector<std::pair<std::string, std::string>> quotes = {
        {"\"", "\""}, {"\xE3\x80\x8A", "\xE3\x80\x8B"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"", ""}};
    static const std::vector<std::string> books = {"War and Peace", "Dune", "Red Chamber"};
    static const std::vector<std::string> degrees = {"bachelor", "master's degree", "Ph.D.", "MBA", "diploma", "PhD"};
    static const std::vector<std::string> positions = {"intern", "senior engineer", "director", "CEO", "chef"};

    UnifiedSample s;
    s.id = "rf-" + std::to_string(index);
    s.task = TaskKind::NER;
    s.schema.entries = {{"person", EntryKind::EntityType}, {"money", EntryKind::EntityType},
                        {"book", EntryKind::EntityType},   {"degree", EntryKind::EntityType},
                        {"organization", EntryKind::EntityType}, {"location", EntryKind::EntityType},
                        {"position", EntryKind::EntityType}};
    std::vector<std::string> pieces;
    std::vector<Entity> gold;
    auto add = [&](const std::string& label, const std::string& span) {
        Entity e{label, span};
        if (std::find(gold.begin(), gold.end(), e) == gold.end()) gold.push_back(e);
    };
    const auto n = 1 + rng.below(5);
    for (std::size_t i = 0; i < n; ++i) {
        switch (rng.below(6)) {
            case 0: {
                const auto& name = names[rng.below(names.size())];
                const std::string title = rng.bernoulli(0.6) ? titles[rng.below(titles.size())] + " " : "";
                pieces.push_back(title + name);
                add("person", rng.bernoulli(0.5) ? title + name : name);
                break;
            }
            case 1: {
                const auto& [pre, post] = money[rng.below(money.size())];
                const auto amount = std::to_string(1 + rng.below(900)) + "," + std::to_string(100 + rng.below(900));
                pieces.push_back(pre + amount + post);
                add("money", rng.bernoulli(0.5) ? pre + amount + post : amount);
                break;
            }
            case 2: {
                const auto& [open, close] = quotes[rng.below(quotes.size())];
                const auto& book = books[rng.below(books.size())];
                pieces.push_back(open + book + close);
                add("book", rng.bernoulli(0.5) ? open + book + close : book);
                break;
            }
            case 3: {
                const auto& d = degrees[rng.below(degrees.size())];
                pieces.push_back(d);
                add("degree", d);
                break;
            }
            case 4: {
                const auto& p = positions[rng.below(positions.size())];
                pieces.push_back("served as " + p);
                add("position", p);
                break;
            }
            default: {
                const std::string city = rng.bernoulli(0.5) ? "Beijing" : "Oxford";
                pieces.push_back(city + " Sport University");
                add("organization", city + " Sport University");
                if (rng.bernoulli(0.7)) add("location", city);
                break;
            }
        }
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) s.text += (i ? ", " : "") + pieces[i];
    s.text += ".";
    s.gold = canonicalize_gold(EntitySet{gold}, s.task, s.schema);
    return s;
}

std::vector<UnifiedSample> rule_fuzz_corpus() {
    std::vector<UnifiedSample> out;
    SeededRng rng(20240601);
    for (std::size_t i = 0; i < 700; ++i) out.push_back(rule_fuzz_sample(i, rng));
    // Relation, triple and trigger samples with reversible predicates.
    const std::vector<std::string> preds = {"direct", "found", "employer", "located in", "acquire"};
    for (std::size_t i = 0; i < 300; ++i) {
        const auto task = std::array{TaskKind::RE, TaskKind::SPO, TaskKind::EET}[i % 3];
        auto s = nftest::synthetic_sample(task, i, rng);
        if (task != TaskKind::EET) {
            std::map<std::string, std::string> renames;
            for (const auto& name : s.schema.names())
                if (rng.bernoulli(0.5)) renames[name] = preds[rng.below(preds.size())];
            std::set<std::string> seen;
            bool clash = false;
            for (const auto& name : s.schema.names()) {
                auto it = renames.find(name);
                clash |= !seen.insert(it == renames.end() ? name : it->second).second;
            }
            if (!clash) {
                for (auto& e : s.schema.entries)
                    if (renames.count(e.name)) e.name = renames[e.name];
                s.gold = rename_labels(s.gold, renames);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nftest
