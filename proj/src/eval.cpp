#include "nluforge/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "nluforge/basic.hpp"
#include "nluforge/compound.hpp"
#include "nluforge/detail/overloaded.hpp"
#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"
#include "nluforge/llm.hpp"

namespace nluforge {

using detail::overloaded;

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::MICRO_F1: return "MICRO_F1";
        case Metric::TRIGGER_ARG_F1: return "TRIGGER_ARG_F1";
        case Metric::CHOICE_ACC: return "CHOICE_ACC";
        case Metric::LABEL_ACC: return "LABEL_ACC";
    }
    return "?";
}

std::optional<Metric> parse_metric(std::string_view text) {
    for (auto m : {Metric::MICRO_F1, Metric::TRIGGER_ARG_F1, Metric::CHOICE_ACC, Metric::LABEL_ACC})
        if (to_string(m) == text) return m;
    return std::nullopt;
}

Metric metric_for(TaskKind task) {
    switch (task) {
        case TaskKind::EE: return Metric::TRIGGER_ARG_F1;
        case TaskKind::MRC: return Metric::CHOICE_ACC;
        case TaskKind::TC: return Metric::LABEL_ACC;
        default: return Metric::MICRO_F1;
    }
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

// Body of the first ``` fenced block, if any.
std::optional<std::string> fenced_block(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return std::nullopt;
    const auto line_end = text.find('\n', open);
    if (line_end == std::string_view::npos) return std::nullopt;
    const auto close = text.find("```", line_end);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(text.substr(line_end + 1, close - line_end - 1));
}

// From the first opening bracket to the last matching closer.
std::optional<std::string> json_span(std::string_view text) {
    const auto open = text.find_first_of("{[");
    if (open == std::string_view::npos) return std::nullopt;
    const char closer = text[open] == '{' ? '}' : ']';
    const auto close = text.rfind(closer);
    if (close == std::string_view::npos || close < open) return std::nullopt;
    return std::string(text.substr(open, close - open + 1));
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

// The first run of lines accepted by `keep`.
std::optional<std::string> line_block(std::string_view text, bool (*keep)(std::string_view)) {
    std::string out;
    bool in = false;
    for (const auto& line : lines_of(text)) {
        const auto t = trim(line);
        if (keep(t)) {
            if (!out.empty()) out += '\n';
            out += t;
            in = true;
        } else if (in) {
            break;
        }
    }
    if (out.empty()) return std::nullopt;
    return out;
}

bool table_line(std::string_view line) { return !line.empty() && line.front() == '|'; }
bool tuple_line(std::string_view line) { return !line.empty() && (line.front() == '(' || line.front() == '['); }

}  // namespace

Extraction tolerant_extract(std::string_view output, TaskKind task, const TaskSchema& schema) {
    Extraction result;
    const auto formats = supported_formats(task);
    const std::string bare = strip_code_fence(output);
    std::vector<std::string> bodies{bare};
    if (auto fenced = fenced_block(output)) bodies.push_back(trim(*fenced));

    constexpr std::array<OutputFormat, 4> order = {OutputFormat::JSON, OutputFormat::MARKDOWN_TABLE,
                                                   OutputFormat::TUPLE_TEXT, OutputFormat::PLAIN_TEXT};
    for (auto format : order) {
        if (std::find(formats.begin(), formats.end(), format) == formats.end()) continue;
        std::vector<std::string> candidates;
        for (const auto& body : bodies) {
            candidates.push_back(body);
            std::optional<std::string> cut;
            if (format == OutputFormat::JSON) cut = json_span(body);
            if (format == OutputFormat::MARKDOWN_TABLE) cut = line_block(body, table_line);
            if (format == OutputFormat::TUPLE_TEXT) cut = line_block(body, tuple_line);
            if (cut && *cut != body) candidates.push_back(*cut);
        }
        for (const auto& text : candidates) {
            try {
                auto parsed = parse(text, task, format, schema);
                if (format != OutputFormat::JSON && !parsed.unknown_labels.empty()) {
                    const auto used = referenced_labels(parsed.gold);
                    if (std::all_of(used.begin(), used.end(), [&](const auto& l) { return !schema.find(l); })) {
                        result.error = "no schema label in " + std::string(to_string(format)) + " reading";
                        continue;
                    }
                }
                result.gold = std::move(parsed.gold);
                result.format = format;
                result.error.clear();
                return result;
            } catch (const Error& e) {
                result.error = e.what();
            }
        }
    }
    if (result.error.empty()) result.error = "no supported format";
    return result;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

using Tuple = std::vector<std::string>;

void add_value(std::set<Tuple>& out, Tuple prefix, const ArgValue& value) {
    std::visit(overloaded{
                   [&](const std::string& s) {
                       prefix.push_back(trim(s));
                       out.insert(prefix);
                   },
                   [&](const std::vector<std::string>& list) {
                       for (const auto& s : list) {
                           auto t = prefix;
                           t.push_back(trim(s));
                           out.insert(t);
                       }
                   },
                   [](const Nan&) {},
               },
               value);
}

std::set<Tuple> argument_tuples(const EventSet& events) {
    std::set<Tuple> out;
    for (const auto& ev : events.items)
        for (const auto& [role, value] : ev.arguments) add_value(out, {ev.event_type, role}, value);
    return out;
}

std::set<Tuple> tuples(const GoldLabel& gold, TaskKind task) {
    std::set<Tuple> out;
    std::visit(overloaded{
                   [&](const EntitySet& g) {
                       for (const auto& e : g.items) out.insert({e.label, trim(e.span)});
                   },
                   [&](const RelationSet& g) {
                       for (const auto& r : g.items) out.insert({r.predicate, trim(r.subject), trim(r.object)});
                   },
                   [&](const SpoSet& g) {
                       for (const auto& t : g.items) out.insert({t.predicate, trim(t.subject), trim(t.object)});
                   },
                   [&](const EventSet& g) {
                       if (task == TaskKind::EEA) {
                           out = argument_tuples(g);
                           return;
                       }
                       for (const auto& ev : g.items) out.insert({ev.event_type, trim(ev.trigger.value_or(""))});
                   },
                   [&](const OpenTuples& g) {
                       for (const auto& tuple : g.items) {
                           Tuple t;
                           for (const auto& el : tuple) {
                               t.push_back(el.role);
                               t.push_back(trim(el.text));
                           }
                           out.insert(t);
                       }
                   },
                   [&](const KgEntities& g) {
                       for (const auto& type : g.types)
                           for (const auto& ent : type.entities) {
                               out.insert({type.type, trim(ent.name)});
                               for (const auto& [attr, value] : ent.attributes) {
                                   std::visit(overloaded{
                                                  [&](const std::string& s) {
                                                      out.insert({type.type, trim(ent.name), attr, trim(s)});
                                                  },
                                                  [&](const std::vector<std::string>& list) {
                                                      for (const auto& s : list)
                                                          out.insert({type.type, trim(ent.name), attr, trim(s)});
                                                  },
                                              },
                                              value);
                               }
                           }
                   },
                   [&](const auto&) {
                       throw Error(ErrorCode::TaskNotApplicable,
                                   "micro-F1 does not apply to " + std::string(to_string(task)));
                   },
               },
               gold);
    return out;
}

void count(const std::set<Tuple>& gold, const std::set<Tuple>* pred, Prf& prf) {
    if (!pred) {
        prf.fn += gold.size();
        return;
    }
    for (const auto& t : *pred) (gold.count(t) ? prf.tp : prf.fp) += 1;
    for (const auto& t : gold)
        if (!pred->count(t)) ++prf.fn;
}

void finish(Prf& prf) {
    if (prf.tp + prf.fp + prf.fn == 0) {
        prf.precision = prf.recall = prf.f1 = 1.0;
        return;
    }
    prf.precision = prf.tp + prf.fp ? double(prf.tp) / double(prf.tp + prf.fp) : 0.0;
    prf.recall = prf.tp + prf.fn ? double(prf.tp) / double(prf.tp + prf.fn) : 0.0;
    prf.f1 = prf.precision + prf.recall > 0 ? 2 * prf.precision * prf.recall / (prf.precision + prf.recall) : 0.0;
}

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b)
        throw Error(ErrorCode::LengthMismatch, std::to_string(a) + " gold vs " + std::to_string(b) + " predictions");
}

}  // namespace

Prf score_micro_f1(std::span<const GoldLabel> gold, std::span<const Prediction> pred, TaskKind task) {
    check_lengths(gold.size(), pred.size());
    Prf prf;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto g = tuples(gold[i], task);
        if (pred[i]) {
            const auto p = tuples(*pred[i], task);
            count(g, &p, prf);
        } else {
            count(g, nullptr, prf);
        }
    }
    finish(prf);
    return prf;
}

EventScores score_event(std::span<const GoldLabel> gold, std::span<const Prediction> pred) {
    check_lengths(gold.size(), pred.size());
    EventScores s;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto* g = std::get_if<EventSet>(&gold[i]);
        if (!g) throw Error(ErrorCode::TaskMismatch, "event scoring needs event gold");
        const auto gt = tuples(*g, TaskKind::EE);
        const auto ga = argument_tuples(*g);
        const EventSet* p = pred[i] ? std::get_if<EventSet>(&*pred[i]) : nullptr;
        if (p) {
            const auto pt = tuples(*p, TaskKind::EE);
            const auto pa = argument_tuples(*p);
            count(gt, &pt, s.trigger);
            count(ga, &pa, s.argument);
        } else {
            count(gt, nullptr, s.trigger);
            count(ga, nullptr, s.argument);
        }
    }
    finish(s.trigger);
    finish(s.argument);
    return s;
}

double score_choice(std::span<const std::string> gold, std::span<const std::optional<std::string>> pred,
                    std::span<const std::vector<std::string>> choices) {
    check_lengths(gold.size(), pred.size());
    check_lengths(gold.size(), choices.size());
    if (gold.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto g = trim(gold[i]);
        const auto& c = choices[i];
        if (std::none_of(c.begin(), c.end(), [&](const std::string& x) { return trim(x) == g; }))
            throw Error(ErrorCode::GoldNotInChoices, "item " + std::to_string(i) + ": \"" + g + "\"");
        if (pred[i] && trim(*pred[i]) == g) ++correct;
    }
    return double(correct) / double(gold.size());
}

double score_label(std::span<const std::string> gold, std::span<const std::optional<std::string>> pred) {
    check_lengths(gold.size(), pred.size());
    if (gold.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (pred[i] && trim(*pred[i]) == trim(gold[i])) ++correct;
    return double(correct) / double(gold.size());
}

// ---------------------------------------------------------------------------
// Harness

std::vector<EvalItem> prepare_eval_items(std::span<const UnifiedSample> samples, Style style,
                                         const SchemaDictionary* dict, std::uint64_t seed) {
    if (style == Style::C && !dict) throw Error(ErrorCode::InvalidConfig, "style C evaluation needs a dictionary");
    GuidelineConfig config = GuidelineConfig::all_off();
    config.use_description = 1.0;
    config.n_examples_min = 2;
    config.n_examples_max = 2;
    std::vector<EvalItem> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        const TemplateId tid{s.task, 0};
        if (style == Style::B) {
            out.push_back({s, s.task == TaskKind::IG ? render_ig(s) : render_basic(s, tid, seed)});
        } else {
            const auto annotated = inject_guidelines(s, *dict, config, seed);
            out.push_back({s, render_compound(annotated, tid, default_format(s.task))});
        }
    }
    return out;
}

EvalReport run_eval(const EvalTask& spec, std::span<const EvalItem> items, LlmClient& model) {
    if (spec.metric != metric_for(spec.task))
        throw Error(ErrorCode::InvalidConfig, std::string(to_string(spec.metric)) + " does not fit " +
                                                  std::string(to_string(spec.task)));
    for (const auto& item : items) {
        if (item.rendered.style != spec.style)
            throw Error(ErrorCode::StyleMismatch, item.rendered.id + " is style " +
                                                      std::string(to_string(item.rendered.style)) + ", task wants " +
                                                      std::string(to_string(spec.style)));
        if (item.sample.task != spec.task)
            throw Error(ErrorCode::TaskMismatch, item.sample.id + " is " + std::string(to_string(item.sample.task)));
    }

    EvalReport report;
    report.name = spec.name;
    report.task = spec.task;
    report.style = spec.style;
    report.metric = spec.metric;
    report.n = items.size();
    if (items.empty()) {
        report.undefined = true;
        return report;
    }

    std::vector<std::string> prompts;
    for (const auto& item : items) prompts.push_back(item.rendered.prompt);
    const auto outputs = model.complete_all(prompts);

    std::vector<GoldLabel> gold;
    std::vector<Prediction> pred;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto ex = tolerant_extract(outputs[i], spec.task, items[i].sample.schema);
        if (!ex.ok()) ++report.parse_failures;
        gold.push_back(items[i].sample.gold);
        pred.push_back(std::move(ex.gold));
    }

    auto text_of = [](const Prediction& p) -> std::optional<std::string> {
        if (!p) return std::nullopt;
        if (const auto* a = std::get_if<Answer>(&*p)) return a->text;
        if (const auto* c = std::get_if<ClassLabel>(&*p)) return c->label;
        return std::nullopt;
    };
    switch (spec.metric) {
        case Metric::MICRO_F1: report.prf = score_micro_f1(gold, pred, spec.task); break;
        case Metric::TRIGGER_ARG_F1: report.events = score_event(gold, pred); break;
        case Metric::CHOICE_ACC: {
            std::vector<std::string> g;
            std::vector<std::optional<std::string>> p;
            std::vector<std::vector<std::string>> choices;
            for (std::size_t i = 0; i < items.size(); ++i) {
                g.push_back(std::get<Answer>(gold[i]).text);
                p.push_back(text_of(pred[i]));
                const auto& entries = items[i].sample.schema.entries;
                choices.push_back(entries.empty() ? std::vector<std::string>{} : entries.front().choices);
            }
            report.accuracy = score_choice(g, p, choices);
            break;
        }
        case Metric::LABEL_ACC: {
            std::vector<std::string> g;
            std::vector<std::optional<std::string>> p;
            for (std::size_t i = 0; i < items.size(); ++i) {
                g.push_back(std::get<ClassLabel>(gold[i]).label);
                p.push_back(text_of(pred[i]));
            }
            report.accuracy = score_label(g, p);
            break;
        }
    }
    return report;
}

namespace {

ojson encode_prf(const Prf& p) {
    return ojson{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}, {"tp", p.tp}, {"fp", p.fp}, {"fn", p.fn}};
}

}  // namespace

ojson encode_report(const EvalReport& r) {
    ojson out{{"name", r.name},
              {"task", to_string(r.task)},
              {"style", to_string(r.style)},
              {"metric", to_string(r.metric)},
              {"n", r.n},
              {"parse_failures", r.parse_failures},
              {"undefined", r.undefined}};
    if (r.undefined) return out;
    switch (r.metric) {
        case Metric::MICRO_F1: out["scores"] = encode_prf(r.prf); break;
        case Metric::TRIGGER_ARG_F1:
            out["scores"] = ojson{{"trigger", encode_prf(r.events.trigger)}, {"argument", encode_prf(r.events.argument)}};
            break;
        case Metric::CHOICE_ACC:
        case Metric::LABEL_ACC: out["scores"] = ojson{{"accuracy", r.accuracy}}; break;
    }
    return out;
}

std::string report_table(const std::vector<EvalReport>& reports) {
    std::string out;
    char line[200];
    std::snprintf(line, sizeof line, "%-16s %-6s %-5s %6s %6s  %s\n", "name", "task", "style", "n", "fail", "score");
    out += line;
    for (const auto& r : reports) {
        std::string score;
        char buf[64];
        if (r.undefined) {
            score = "undefined";
        } else if (r.metric == Metric::MICRO_F1) {
            std::snprintf(buf, sizeof buf, "F1 %.2f", 100 * r.prf.f1);
            score = buf;
        } else if (r.metric == Metric::TRIGGER_ARG_F1) {
            std::snprintf(buf, sizeof buf, "%.2f/%.2f", 100 * r.events.trigger.f1, 100 * r.events.argument.f1);
            score = buf;
        } else {
            std::snprintf(buf, sizeof buf, "acc %.2f", 100 * r.accuracy);
            score = buf;
        }
        std::snprintf(line, sizeof line, "%-16s %-6s %-5s %6zu %6zu  %s\n", r.name.c_str(),
                      std::string(to_string(r.task)).c_str(), std::string(to_string(r.style)).c_str(), r.n,
                      r.parse_failures, score.c_str());
        out += line;
    }
    return out;
}

}  // namespace nluforge
