#include "nluforge/rules.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <regex>

#include "nluforge/detail/overloaded.hpp"
#include "nluforge/embedded.hpp"
#include "nluforge/error.hpp"
#include "nluforge/llm.hpp"
#include "nluforge/validate.hpp"

namespace nluforge {

using detail::overloaded;

namespace {

constexpr std::array<std::pair<RuleStrategy, std::string_view>, 6> kStrategyNames = {{
    {RuleStrategy::ENTITY_BOUNDARIES, "ENTITY_BOUNDARIES"},
    {RuleStrategy::NUMERICAL, "NUMERICAL"},
    {RuleStrategy::GRANULARITY, "GRANULARITY"},
    {RuleStrategy::PUNCTUATION, "PUNCTUATION"},
    {RuleStrategy::NESTING, "NESTING"},
    {RuleStrategy::REVERSE, "REVERSE"},
}};

constexpr std::array<std::pair<Transform, std::string_view>, 11> kTransformNames = {{
    {Transform::BoundaryTrim, "boundary_trim"},
    {Transform::BoundaryExtend, "boundary_extend"},
    {Transform::KeepFirstK, "keep_first_k"},
    {Transform::KeepMaxByOrder, "keep_max_by_order"},
    {Transform::UnitInclude, "unit_include"},
    {Transform::UnitStrip, "unit_strip"},
    {Transform::QuoteInclude, "quote_include"},
    {Transform::QuoteStrip, "quote_strip"},
    {Transform::NestedDropInner, "nested_drop_inner"},
    {Transform::NestedKeepInner, "nested_keep_inner"},
    {Transform::ReverseWithInverse, "reverse_with_inverse"},
}};

}  // namespace

std::string_view to_string(RuleStrategy strategy) {
    for (const auto& [s, name] : kStrategyNames)
        if (s == strategy) return name;
    return "?";
}

std::optional<RuleStrategy> parse_rule_strategy(std::string_view text) {
    for (const auto& [s, name] : kStrategyNames)
        if (name == text) return s;
    return std::nullopt;
}

std::string_view to_string(Transform transform) {
    for (const auto& [t, name] : kTransformNames)
        if (t == transform) return name;
    return "?";
}

std::optional<Transform> parse_transform(std::string_view text) {
    for (const auto& [t, name] : kTransformNames)
        if (name == text) return t;
    return std::nullopt;
}

std::string_view to_string(RuleSource source) {
    switch (source) {
        case RuleSource::Llm: return "llm";
        case RuleSource::Fallback: return "fallback";
        case RuleSource::Skip: return "skip";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::InvalidConfig, "rule catalog: " + what); }

std::vector<std::string> string_list(const ojson& v, const std::string& what) {
    if (!v.is_array()) bad_config(what + " must be a list");
    std::vector<std::string> out;
    for (const auto& s : v) {
        if (!s.is_string()) bad_config(what + " must hold strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

std::map<std::string, std::string> string_map(const ojson& v, const std::string& what) {
    if (!v.is_object()) bad_config(what + " must be an object");
    std::map<std::string, std::string> out;
    for (const auto& [k, s] : v.items()) {
        if (!s.is_string()) bad_config(what + " must map to strings");
        out[k] = s.get<std::string>();
    }
    return out;
}

RuleLexicon lexicon_from_json(const ojson& doc) {
    RuleLexicon lex;
    if (doc.contains("ladders")) {
        if (!doc["ladders"].is_object()) bad_config("ladders must be an object");
        for (const auto& [name, levels] : doc["ladders"].items()) {
            if (!levels.is_array() || levels.empty()) bad_config("ladder " + name + " needs levels");
            auto& ladder = lex.ladders[name];
            for (const auto& level : levels) ladder.push_back(string_list(level, "ladder " + name));
        }
    }
    if (doc.contains("units")) lex.units = string_list(doc["units"], "units");
    if (doc.contains("title_prefixes")) lex.title_prefixes = string_list(doc["title_prefixes"], "title_prefixes");
    if (doc.contains("quote_pairs")) {
        for (const auto& p : doc["quote_pairs"]) {
            const auto pair = string_list(p, "quote pair");
            if (pair.size() != 2 || pair[0].empty() || pair[1].empty()) bad_config("quote pairs need two marks");
            lex.quote_pairs.emplace_back(pair[0], pair[1]);
        }
    }
    if (doc.contains("inverses")) lex.inverses = string_map(doc["inverses"], "inverses");
    return lex;
}

PreferenceRule rule_from_json(const ojson& r, const RuleLexicon& lex) {
    if (!r.is_object()) bad_config("rules must be objects");
    PreferenceRule rule;
    rule.id = r.value("id", "");
    if (rule.id.empty()) bad_config("rule without id");
    const auto strategy = parse_rule_strategy(r.value("strategy", ""));
    if (!strategy) bad_config(rule.id + ": unknown strategy");
    rule.strategy = *strategy;
    rule.rule_text = r.value("text", "");
    if (rule.rule_text.empty()) bad_config(rule.id + ": empty text");
    if (r.contains("transform") && !r["transform"].is_null()) {
        const auto t = parse_transform(r["transform"].get<std::string>());
        if (!t) bad_config(rule.id + ": unknown transform");
        rule.transform = *t;
    }
    rule.k = r.value("k", std::size_t{1});
    rule.ladder = r.value("ladder", "");
    if (r.contains("inverses")) rule.inverses = string_map(r["inverses"], rule.id + " inverses");
    for (const auto& name : string_list(r.value("tasks", ojson::array()), rule.id + " tasks")) {
        const auto task = parse_task(name);
        if (!task) bad_config(rule.id + ": unknown task " + name);
        rule.tasks.insert(*task);
    }
    if (rule.tasks.empty()) bad_config(rule.id + ": no tasks");
    if (r.contains("labels"))
        for (auto& l : string_list(r["labels"], rule.id + " labels")) rule.labels.insert(std::move(l));

    if (rule.transform == Transform::KeepFirstK && rule.k == 0) bad_config(rule.id + ": k must be positive");
    if (rule.transform == Transform::KeepMaxByOrder && !lex.ladders.count(rule.ladder))
        bad_config(rule.id + ": unknown ladder '" + rule.ladder + "'");
    if (rule.transform == Transform::ReverseWithInverse && rule.inverses.empty() && lex.inverses.empty())
        bad_config(rule.id + ": no inverse names");
    if (rule.transform == Transform::ReverseWithInverse) {
        for (auto t : rule.tasks)
            if (t != TaskKind::RE && t != TaskKind::SPO) bad_config(rule.id + ": reverse needs RE or SPO");
    }
    return rule;
}

}  // namespace

RuleCatalog RuleCatalog::from_json(const ojson& doc) {
    if (!doc.is_object() || !doc.contains("rules")) bad_config("expected {\"rules\": [...]}");
    RuleCatalog catalog;
    catalog.lexicon_ = lexicon_from_json(doc);
    std::set<std::string> ids;
    for (const auto& r : doc["rules"]) {
        auto rule = rule_from_json(r, catalog.lexicon_);
        if (!ids.insert(rule.id).second) bad_config("duplicate id " + rule.id);
        catalog.rules_.push_back(std::move(rule));
    }
    return catalog;
}

const RuleCatalog& RuleCatalog::builtin() {
    static const RuleCatalog catalog = from_json(ojson::parse(embedded::rules()));
    return catalog;
}

RuleCatalog RuleCatalog::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    try {
        return from_json(ojson::parse(in));
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
}

const PreferenceRule* RuleCatalog::find(std::string_view id) const {
    for (const auto& r : rules_)
        if (r.id == id) return &r;
    return nullptr;
}

std::vector<const PreferenceRule*> RuleCatalog::applicable(RuleStrategy strategy, const UnifiedSample& sample) const {
    std::vector<const PreferenceRule*> out;
    for (const auto& r : rules_) {
        if (r.strategy != strategy || !r.deterministic() || !r.tasks.count(sample.task)) continue;
        if (!rule_targets(r, sample, lexicon_).empty()) out.push_back(&r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Span helpers

namespace {

bool ascii_alnum(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool has_digit(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::size_t> occurrences(std::string_view text, std::string_view span) {
    std::vector<std::size_t> out;
    if (span.empty()) return out;
    for (auto pos = text.find(span); pos != std::string_view::npos; pos = text.find(span, pos + 1)) out.push_back(pos);
    return out;
}

std::vector<std::string> longest_first(std::vector<std::string> tokens) {
    std::stable_sort(tokens.begin(), tokens.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return tokens;
}

// A token glued to text must not cut a word in half.
bool left_edge_ok(std::string_view text, std::size_t start, std::string_view token) {
    return start == 0 || !ascii_alnum(token.front()) || !ascii_alnum(text[start - 1]);
}

bool right_edge_ok(std::string_view text, std::size_t end, std::string_view token) {
    return end >= text.size() || !ascii_alnum(token.back()) || !ascii_alnum(text[end]);
}

std::string trim_titles(std::string span, const std::vector<std::string>& prefixes) {
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& p : prefixes) {
            if (span.size() > p.size() + 1 && span.compare(0, p.size(), p) == 0 && span[p.size()] == ' ') {
                auto rest = trim(std::string_view(span).substr(p.size()));
                if (rest.empty()) continue;
                span = std::move(rest);
                changed = true;
                break;
            }
        }
    }
    return span;
}

std::string extend_titles(std::string span, std::string_view text, const std::vector<std::string>& prefixes) {
    for (bool changed = true; changed;) {
        changed = false;
        for (auto pos : occurrences(text, span)) {
            for (const auto& p : prefixes) {
                if (pos < p.size() + 1) continue;
                const auto start = pos - p.size() - 1;
                if (text.substr(start, p.size()) != p || text[pos - 1] != ' ') continue;
                if (!left_edge_ok(text, start, p)) continue;
                span = std::string(text.substr(start, pos - start)) + span;
                changed = true;
                break;
            }
            if (changed) break;
        }
    }
    return span;
}

std::string include_units(std::string span, std::string_view text, const std::vector<std::string>& units) {
    if (!has_digit(span)) return span;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto pos : occurrences(text, span)) {
            const auto end = pos + span.size();
            for (const auto& u : units) {
                for (std::string_view sep : {"", " "}) {
                    const auto need = u.size() + sep.size();
                    if (pos >= need && text.substr(pos - need, u.size()) == u &&
                        text.substr(pos - sep.size(), sep.size()) == sep && left_edge_ok(text, pos - need, u) &&
                        (!sep.empty() || !ascii_alnum(u.back()) || !ascii_alnum(span.front()))) {
                        span = std::string(text.substr(pos - need, need + span.size()));
                        changed = true;
                    } else if (text.substr(end, sep.size()) == sep && text.substr(end + sep.size(), u.size()) == u &&
                               right_edge_ok(text, end + need, u)) {
                        span = std::string(text.substr(pos, span.size() + need));
                        changed = true;
                    }
                    if (changed) break;
                }
                if (changed) break;
            }
            if (changed) break;
        }
    }
    return span;
}

std::string strip_units(std::string span, const std::vector<std::string>& units) {
    if (!has_digit(span)) return span;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& u : units) {
            if (span.size() > u.size() && span.compare(0, u.size(), u) == 0) {
                auto rest = trim(std::string_view(span).substr(u.size()));
                const bool glued = rest.size() == span.size() - u.size();
                if (has_digit(rest) && !(glued && ascii_alnum(u.back()) && ascii_alnum(rest.front()))) {
                    span = std::move(rest);
                    changed = true;
                    break;
                }
            }
            if (span.size() > u.size() && span.compare(span.size() - u.size(), u.size(), u) == 0) {
                auto rest = trim(std::string_view(span).substr(0, span.size() - u.size()));
                const bool glued = rest.size() == span.size() - u.size();
                if (has_digit(rest) && !(glued && ascii_alnum(u.front()) && ascii_alnum(rest.back()) &&
                                         !(rest.back() >= '0' && rest.back() <= '9'))) {
                    span = std::move(rest);
                    changed = true;
                    break;
                }
            }
        }
    }
    return span;
}

std::string include_quotes(std::string span, std::string_view text,
                           const std::vector<std::pair<std::string, std::string>>& pairs) {
    for (bool changed = true; changed;) {
        changed = false;
        for (auto pos : occurrences(text, span)) {
            const auto end = pos + span.size();
            for (const auto& [open, close] : pairs) {
                if (pos >= open.size() && text.substr(pos - open.size(), open.size()) == open &&
                    text.substr(end, close.size()) == close) {
                    span = std::string(text.substr(pos - open.size(), open.size() + span.size() + close.size()));
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }
    return span;
}

std::string strip_quotes(std::string span, const std::vector<std::pair<std::string, std::string>>& pairs) {
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [open, close] : pairs) {
            if (span.size() > open.size() + close.size() && span.compare(0, open.size(), open) == 0 &&
                span.compare(span.size() - close.size(), close.size(), close) == 0) {
                auto rest = trim(std::string_view(span).substr(open.size(), span.size() - open.size() - close.size()));
                if (rest.empty()) continue;
                span = std::move(rest);
                changed = true;
                break;
            }
        }
    }
    return span;
}

std::string fold(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        // Typographic apostrophe (U+2019) compares equal to '.
        if (s.substr(i, 3) == "\xE2\x80\x99") {
            out += '\'';
            i += 2;
            continue;
        }
        char c = s[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out += c;
    }
    return trim(out);
}

std::optional<std::size_t> ladder_rank(const std::vector<std::vector<std::string>>& ladder, std::string_view span) {
    const auto key = fold(span);
    for (std::size_t level = ladder.size(); level-- > 0;)
        for (const auto& alias : ladder[level])
            if (fold(alias) == key) return level;
    return std::nullopt;
}

// Span-valued items of one label: entity spans or event triggers.
bool span_task(TaskKind task) { return task == TaskKind::NER || task == TaskKind::EET; }

std::vector<std::string> spans_of(const GoldLabel& slice) {
    std::vector<std::string> out;
    std::visit(overloaded{
                   [&](const EntitySet& s) {
                       for (const auto& e : s.items) out.push_back(e.span);
                   },
                   [&](const EventSet& s) {
                       for (const auto& m : s.items)
                           if (m.trigger) out.push_back(*m.trigger);
                   },
                   [](const auto&) {},
               },
               slice);
    return out;
}

// Rewrites each span of the slice; items whose span becomes a duplicate are
// dropped so the result is a set again.
GoldLabel map_spans(const GoldLabel& slice, const std::function<std::string(const std::string&)>& f) {
    return std::visit(overloaded{
                          [&](const EntitySet& s) -> GoldLabel {
                              EntitySet out;
                              for (const auto& e : s.items) {
                                  Entity n{e.label, f(e.span)};
                                  if (std::find(out.items.begin(), out.items.end(), n) == out.items.end())
                                      out.items.push_back(std::move(n));
                              }
                              return out;
                          },
                          [&](const EventSet& s) -> GoldLabel {
                              EventSet out;
                              for (const auto& m : s.items) {
                                  auto n = m;
                                  if (n.trigger) n.trigger = f(*n.trigger);
                                  if (std::find(out.items.begin(), out.items.end(), n) == out.items.end())
                                      out.items.push_back(std::move(n));
                              }
                              return out;
                          },
                          [](const auto& other) -> GoldLabel { return other; },
                      },
                      slice);
}

template <typename Keep>
GoldLabel filter_items(const GoldLabel& slice, Keep keep) {
    return std::visit(
        [&](const auto& s) -> GoldLabel {
            using T = std::decay_t<decltype(s)>;
            if constexpr (requires { s.items; }) {
                T out;
                for (std::size_t i = 0; i < s.items.size(); ++i)
                    if (keep(i)) out.items.push_back(s.items[i]);
                return out;
            } else {
                return s;
            }
        },
        slice);
}

std::size_t item_count(const GoldLabel& slice) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            if constexpr (requires { s.items; })
                return s.items.size();
            else
                return 0;
        },
        slice);
}

const std::map<std::string, std::string>& inverse_table(const PreferenceRule& rule, const RuleLexicon& lex) {
    return rule.inverses.empty() ? lex.inverses : rule.inverses;
}

std::optional<std::string> inverse_of(const PreferenceRule& rule, const RuleLexicon& lex, const std::string& label) {
    const auto& table = inverse_table(rule, lex);
    auto it = table.find(label);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

// Spans of every item in the gold, for nesting checks.
std::vector<std::string> all_spans(const GoldLabel& gold) { return spans_of(gold); }

bool proper_substring(const std::string& inner, const std::string& outer) {
    return inner.size() < outer.size() && outer.find(inner) != std::string::npos;
}

std::string fill_rule_text(const std::string& text, const std::string& label, const std::string& original) {
    std::string out;
    for (std::size_t i = 0; i < text.size();) {
        if (text.compare(i, 7, "{label}") == 0) {
            out += label;
            i += 7;
        } else if (text.compare(i, 10, "{original}") == 0) {
            out += original;
            i += 10;
        } else {
            out += text[i++];
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> rule_targets(const PreferenceRule& rule, const UnifiedSample& sample,
                                      const RuleLexicon& lexicon) {
    std::vector<std::string> out;
    if (!rule.tasks.count(sample.task)) return out;
    for (const auto& entry : sample.schema.entries) {
        if (!rule.labels.empty() && !rule.labels.count(entry.name)) continue;
        const auto slice = gold_slice(sample.gold, entry.name);
        if (item_count(slice) == 0) continue;
        if (rule.transform == Transform::KeepMaxByOrder) {
            const auto& ladder = lexicon.ladders.at(rule.ladder);
            const auto spans = spans_of(slice);
            if (std::none_of(spans.begin(), spans.end(), [&](const auto& s) { return ladder_rank(ladder, s).has_value(); }))
                continue;
        }
        if (rule.transform == Transform::ReverseWithInverse) {
            const auto inv = inverse_of(rule, lexicon, entry.name);
            if (!inv || sample.schema.find(*inv)) continue;
        }
        out.push_back(entry.name);
    }
    return out;
}

GoldLabel transform_gold(const PreferenceRule& rule, const RuleLexicon& lex, const UnifiedSample& sample,
                         const std::string& label) {
    if (!rule.transform) throw Error(ErrorCode::NotDeterministic, rule.id + " has no deterministic transform");
    const auto slice = gold_slice(sample.gold, label);
    const auto& text = sample.text;
    GoldLabel out_slice = slice;

    switch (*rule.transform) {
        case Transform::BoundaryTrim: {
            const auto prefixes = longest_first(lex.title_prefixes);
            out_slice = map_spans(slice, [&](const std::string& s) { return trim_titles(s, prefixes); });
            break;
        }
        case Transform::BoundaryExtend: {
            const auto prefixes = longest_first(lex.title_prefixes);
            out_slice = map_spans(slice, [&](const std::string& s) { return extend_titles(s, text, prefixes); });
            break;
        }
        case Transform::UnitInclude: {
            const auto units = longest_first(lex.units);
            out_slice = map_spans(slice, [&](const std::string& s) { return include_units(s, text, units); });
            break;
        }
        case Transform::UnitStrip: {
            const auto units = longest_first(lex.units);
            out_slice = map_spans(slice, [&](const std::string& s) { return strip_units(s, units); });
            break;
        }
        case Transform::QuoteInclude:
            out_slice = map_spans(slice, [&](const std::string& s) { return include_quotes(s, text, lex.quote_pairs); });
            break;
        case Transform::QuoteStrip:
            out_slice = map_spans(slice, [&](const std::string& s) { return strip_quotes(s, lex.quote_pairs); });
            break;
        case Transform::KeepFirstK:
            out_slice = filter_items(slice, [&](std::size_t i) { return i < rule.k; });
            break;
        case Transform::KeepMaxByOrder: {
            const auto& ladder = lex.ladders.at(rule.ladder);
            const auto spans = spans_of(slice);
            std::optional<std::size_t> best;
            for (const auto& s : spans)
                if (auto r = ladder_rank(ladder, s); r && (!best || *r > *best)) best = r;
            if (best && spans.size() == item_count(slice))
                out_slice = filter_items(slice, [&](std::size_t i) { return ladder_rank(ladder, spans[i]) == best; });
            break;
        }
        case Transform::NestedDropInner:
        case Transform::NestedKeepInner: {
            if (!span_task(sample.task)) break;
            const auto everything = all_spans(sample.gold);
            const auto spans = spans_of(slice);
            if (spans.size() != item_count(slice)) break;
            const bool drop_inner = *rule.transform == Transform::NestedDropInner;
            out_slice = filter_items(slice, [&](std::size_t i) {
                for (const auto& other : everything) {
                    if (drop_inner ? proper_substring(spans[i], other) : proper_substring(other, spans[i])) return false;
                }
                return true;
            });
            break;
        }
        case Transform::ReverseWithInverse: {
            const auto inv = inverse_of(rule, lex, label);
            if (!inv) break;
            auto reversed = std::visit(overloaded{
                                           [&](const RelationSet& s) -> GoldLabel {
                                               RelationSet out;
                                               for (const auto& r : s.items) out.items.push_back({*inv, r.object, r.subject});
                                               return out;
                                           },
                                           [&](const SpoSet& s) -> GoldLabel {
                                               SpoSet out;
                                               for (const auto& t : s.items)
                                                   out.items.push_back(
                                                       {*inv, t.object, t.object_type, t.subject, t.subject_type});
                                               return out;
                                           },
                                           [](const auto& other) -> GoldLabel { return other; },
                                       },
                                       slice);
            if (item_count(slice) == 0) return sample.gold;
            // Reversed items join whatever the inverse name already holds.
            auto merged = gold_slice(sample.gold, *inv);
            std::visit(
                [&](auto& m) {
                    using T = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<T, RelationSet> || std::is_same_v<T, SpoSet>) {
                        const auto& add = std::get<T>(reversed).items;
                        m.items.insert(m.items.end(), add.begin(), add.end());
                    }
                },
                merged);
            auto rest = replace_label_items(sample.gold, label, empty_gold(sample.task));
            return replace_label_items(rest, *inv, merged);
        }
    }
    return replace_label_items(sample.gold, label, out_slice);
}

UnifiedSample apply_rule(const PreferenceRule& rule, const UnifiedSample& sample, const RuleLexicon& lexicon) {
    if (!rule.deterministic()) throw Error(ErrorCode::NotDeterministic, rule.id + " needs an LLM proposal");
    if (!rule.tasks.count(sample.task))
        throw Error(ErrorCode::TaskNotApplicable, rule.id + " does not apply to " + std::string(to_string(sample.task)));
    const auto targets = rule_targets(rule, sample, lexicon);
    if (targets.empty()) throw Error(ErrorCode::TaskNotApplicable, rule.id + ": no label of " + sample.id + " qualifies");

    UnifiedSample out = sample;
    for (const auto& label : targets) {
        // Two predicates can share an inverse; only the first is renamed.
        if (rule.transform == Transform::ReverseWithInverse && out.schema.find(*inverse_of(rule, lexicon, label)))
            continue;
        out.gold = transform_gold(rule, lexicon, out, label);
        auto* entry = out.schema.find(label);
        if (rule.transform == Transform::ReverseWithInverse) {
            const auto inv = *inverse_of(rule, lexicon, label);
            entry->name = inv;
            entry->description.reset();
            std::swap(entry->subject_type, entry->object_type);
            entry->rule = fill_rule_text(rule.rule_text, inv, label);
        } else {
            entry->rule = fill_rule_text(rule.rule_text, label, label);
        }
    }
    out.gold = canonicalize_gold(out.gold, out.task, out.schema);
    out.origin = SampleOrigin{rule.id, sample.gold};
    return out;
}

// ---------------------------------------------------------------------------
// Strategy book and prompt

StrategyBook StrategyBook::from_json(const ojson& doc) {
    auto bad = [](const std::string& what) -> Error { return Error(ErrorCode::InvalidConfig, "strategy file: " + what); };
    if (!doc.is_object() || !doc.contains("strategies") || !doc["strategies"].is_object())
        throw bad("expected {\"strategies\": {...}}");
    StrategyBook book;
    book.instruction = doc.value("instruction", "");
    book.correction = doc.value("correction", "");
    if (book.instruction.empty()) throw bad("missing instruction");
    for (const auto& [name, g] : doc["strategies"].items()) {
        const auto strategy = parse_rule_strategy(name);
        if (!strategy) throw bad("unknown strategy " + name);
        StrategyGuide guide;
        guide.text = g.value("text", "");
        for (const auto& e : g.value("exemplars", ojson::array())) {
            RuleExemplar ex;
            ex.text = e.value("text", "");
            ex.schema = e.value("schema", "");
            ex.label = e.value("label", ojson::array());
            ex.new_rule = e.value("new_rule", "");
            ex.new_label = e.value("new_label", ojson::array());
            if (ex.text.empty() || ex.schema.empty() || ex.new_rule.empty()) throw bad(name + ": incomplete exemplar");
            guide.exemplars.push_back(std::move(ex));
        }
        if (guide.text.empty()) throw bad(name + ": missing text");
        book.strategies[*strategy] = std::move(guide);
    }
    for (auto s : kAllRuleStrategies)
        if (!book.strategies.count(s)) throw bad("no entry for " + std::string(to_string(s)));
    return book;
}

const StrategyBook& StrategyBook::builtin() {
    static const StrategyBook book = from_json(ojson::parse(embedded::strategies()));
    return book;
}

StrategyBook StrategyBook::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    try {
        return from_json(ojson::parse(in));
    } catch (const ojson::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
}

const StrategyGuide& StrategyBook::guide(RuleStrategy strategy) const { return strategies.at(strategy); }

bool rule_llm_task(TaskKind task) {
    return task == TaskKind::NER || task == TaskKind::RE || task == TaskKind::SPO || task == TaskKind::EET;
}

ojson label_payload(const UnifiedSample& sample, const std::string& label) {
    if (!rule_llm_task(sample.task))
        throw Error(ErrorCode::TaskNotApplicable, "no rule label payload for " + std::string(to_string(sample.task)));
    ojson out = ojson::array();
    std::visit(overloaded{
                   [&](const RelationSet& s) {
                       for (const auto& r : s.items) out.push_back({{"subject", r.subject}, {"object", r.object}});
                   },
                   [&](const SpoSet& s) {
                       for (const auto& t : s.items) out.push_back({{"subject", t.subject}, {"object", t.object}});
                   },
                   [&](const auto& other) {
                       for (const auto& s : spans_of(other)) out.push_back(s);
                   },
               },
               gold_slice(sample.gold, label));
    return out;
}

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

std::string build_rule_prompt(const UnifiedSample& sample, const std::string& label, RuleStrategy strategy,
                              const std::vector<RuleExemplar>& exemplars, const StrategyBook& book) {
    if (exemplars.size() != 2)
        throw Error(ErrorCode::WrongExemplarCount, "expected 2 exemplars, got " + std::to_string(exemplars.size()));
    if (!sample.schema.find(label)) throw Error(ErrorCode::UnknownLabel, label);
    std::string out;
    out += "Instruction: " + replace_all(book.instruction, "{task}", to_string(sample.task)) + "\n";
    out += "Modification Strategy: " + book.guide(strategy).text + "\n";
    out += "Examples:";
    for (const auto& ex : exemplars) {
        ojson e;
        e["text"] = ex.text;
        e["schema"] = ex.schema;
        e["label"] = ex.label;
        e["new_rule"] = ex.new_rule;
        e["new_label"] = ex.new_label;
        out += "\n" + dump_compact(e);
    }
    out += "\nText: " + sample.text + "\n";
    out += "Schema: " + label + "\n";
    out += "Label: " + dump_compact(label_payload(sample, label));
    return out;
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

struct FieldSpec {
    std::string_view name;
    const char* pattern;
};

constexpr std::array<FieldSpec, 4> kFields = {{
    {"Schema Description", R"(schema\s*description)"},
    {"Original Rule", R"(original\s*rule)"},
    {"New Rule", R"(new\s*rule)"},
    {"New Label", R"(new\s*label)"},
}};

std::string strip_markup(std::string s) {
    s = trim(s);
    while (s.size() >= 2 && s.compare(0, 2, "**") == 0) s = trim(std::string_view(s).substr(2));
    while (s.size() >= 2 && s.compare(s.size() - 2, 2, "**") == 0) s = trim(std::string_view(s).substr(0, s.size() - 2));
    return s;
}

std::optional<ojson> parse_list(std::string payload) {
    auto attempt = [](const std::string& s) -> std::optional<ojson> {
        try {
            auto v = ojson::parse(s);
            if (v.is_array()) return v;
        } catch (const ojson::exception&) {
        }
        return std::nullopt;
    };
    const auto open = payload.find('[');
    const auto close = payload.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    payload = payload.substr(open, close - open + 1);
    if (auto v = attempt(payload)) return v;
    // Typeset quotes: ``x'' or ``x" or curly double quotes.
    for (auto [from, to] : std::array<std::pair<std::string_view, std::string_view>, 4>{
             {{"``", "\""}, {"''", "\""}, {"\xE2\x80\x9C", "\""}, {"\xE2\x80\x9D", "\""}}})
        payload = replace_all(payload, from, to);
    return attempt(payload);
}

GoldLabel gold_from_payload(const ojson& list, const UnifiedSample& sample, const std::string& label) {
    auto unparsable = [&](const std::string& why) { return Error(ErrorCode::UnparsableLabel, why); };
    const auto* entry = sample.schema.find(label);
    auto field = [&](const ojson& item, std::size_t idx, const char* key) -> std::string {
        if (item.is_object() && item.contains(key) && item[key].is_string()) return item[key].get<std::string>();
        if (item.is_array() && item.size() == 2 && item[idx].is_string()) return item[idx].get<std::string>();
        throw unparsable(std::string("relation item without ") + key);
    };
    switch (sample.task) {
        case TaskKind::NER: {
            EntitySet out;
            for (const auto& v : list) {
                if (!v.is_string()) throw unparsable("entity items must be strings");
                out.items.push_back({label, v.get<std::string>()});
            }
            return out;
        }
        case TaskKind::EET: {
            EventSet out;
            for (const auto& v : list) {
                if (!v.is_string()) throw unparsable("trigger items must be strings");
                out.items.push_back({label, v.get<std::string>(), {}});
            }
            return out;
        }
        case TaskKind::RE: {
            RelationSet out;
            for (const auto& v : list) out.items.push_back({label, field(v, 0, "subject"), field(v, 1, "object")});
            return out;
        }
        case TaskKind::SPO: {
            SpoSet out;
            for (const auto& v : list)
                out.items.push_back({label, field(v, 0, "subject"), entry->subject_type.value_or(""), field(v, 1, "object"),
                                     entry->object_type.value_or("")});
            return out;
        }
        default: throw Error(ErrorCode::TaskNotApplicable, "no rule labels for " + std::string(to_string(sample.task)));
    }
}

std::vector<std::string> gold_strings(const GoldLabel& slice) {
    std::vector<std::string> out = spans_of(slice);
    std::visit(overloaded{
                   [&](const RelationSet& s) {
                       for (const auto& r : s.items) out.insert(out.end(), {r.subject, r.object});
                   },
                   [&](const SpoSet& s) {
                       for (const auto& t : s.items) out.insert(out.end(), {t.subject, t.object});
                   },
                   [](const auto&) {},
               },
               slice);
    return out;
}

}  // namespace

RuleProposal parse_rule_response(std::string_view text, const UnifiedSample& sample, const std::string& label) {
    const std::string body(text);
    struct Hit {
        std::size_t field, header, value;
    };
    std::vector<Hit> hits;
    for (std::size_t f = 0; f < kFields.size(); ++f) {
        const std::regex re(std::string(R"((?:^|[\s*#>\\]))") + kFields[f].pattern + R"(\s*\**\s*:)",
                            std::regex::icase | std::regex::ECMAScript);
        std::smatch m;
        if (std::regex_search(body, m, re)) {
            auto start = static_cast<std::size_t>(m.position(0));
            while (start > 0 && (body[start - 1] == '*' || body[start - 1] == '#')) --start;
            hits.push_back({f, start, start + static_cast<std::size_t>(m.length(0))});
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.header < b.header; });
    std::array<std::optional<std::string>, 4> values;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto end = i + 1 < hits.size() ? hits[i + 1].header : body.size();
        auto v = strip_markup(body.substr(hits[i].value, end - hits[i].value));
        if (!v.empty()) values[hits[i].field] = std::move(v);
    }
    for (std::size_t f = 0; f < kFields.size(); ++f)
        if (!values[f]) throw Error(ErrorCode::MissingField, std::string(kFields[f].name));

    const auto* entry = sample.schema.find(label);
    if (!entry) throw Error(ErrorCode::UnknownLabel, label);
    const auto list = parse_list(*values[3]);
    if (!list) throw Error(ErrorCode::UnparsableLabel, "New Label is not a JSON list: " + *values[3]);
    const auto slice = gold_from_payload(*list, sample, label);

    RuleProposal p;
    p.schema_description = *values[0];
    p.original_rule = *values[1];
    p.new_rule = *values[2];
    p.new_gold = canonicalize_gold(replace_label_items(sample.gold, label, slice), sample.task, sample.schema);
    if (const auto v = validate_gold(p.new_gold, sample.task, sample.schema); !v.empty())
        throw Error(ErrorCode::InvalidNewGold, v.front().detail);
    for (const auto& s : gold_strings(slice))
        if (s.empty() || sample.text.find(s) == std::string::npos)
            throw Error(ErrorCode::InvalidNewGold, "span not in text: \"" + s + "\"");
    return p;
}

// ---------------------------------------------------------------------------
// Synthesis

RuleOutcome synthesize_rule_sample(const UnifiedSample& sample, RuleStrategy strategy, LlmClient& llm, SeededRng& rng,
                                   const RuleCatalog& catalog, const StrategyBook& book) {
    RuleOutcome outcome;
    auto fallback = [&](std::string reason) {
        outcome.reason = std::move(reason);
        const auto rules = catalog.applicable(strategy, sample);
        if (rules.empty()) {
            outcome.source = RuleSource::Skip;
            return outcome;
        }
        const auto* rule = rules[rng.below(rules.size())];
        outcome.sample = apply_rule(*rule, sample, catalog.lexicon());
        outcome.source = RuleSource::Fallback;
        outcome.label = rule_targets(*rule, sample, catalog.lexicon()).front();
        return outcome;
    };

    if (!rule_llm_task(sample.task)) return fallback("task has no rule prompt");
    std::vector<std::string> labels;
    for (const auto& e : sample.schema.entries)
        if (item_count(gold_slice(sample.gold, e.name)) > 0) labels.push_back(e.name);
    if (labels.empty()) return fallback("no annotated label");
    outcome.label = labels[rng.below(labels.size())];

    const auto prompt = build_rule_prompt(sample, outcome.label, strategy, book.guide(strategy).exemplars, book);
    std::string failure;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto request =
            attempt == 0 ? prompt : prompt + "\n" + replace_all(book.correction, "{error}", failure);
        const auto response = llm.complete(request);
        ++outcome.llm_calls;
        try {
            auto proposal = parse_rule_response(response, sample, outcome.label);
            UnifiedSample out = sample;
            out.gold = std::move(proposal.new_gold);
            auto* entry = out.schema.find(outcome.label);
            entry->rule = proposal.new_rule;
            if (!entry->description) entry->description = proposal.schema_description;
            out.origin = SampleOrigin{"llm:" + std::string(to_string(strategy)), sample.gold};
            outcome.sample = std::move(out);
            outcome.source = RuleSource::Llm;
            return outcome;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MissingField && e.code() != ErrorCode::UnparsableLabel &&
                e.code() != ErrorCode::InvalidNewGold)
                throw;
            failure = e.what();
        }
    }
    return fallback(failure);
}

}  // namespace nluforge
