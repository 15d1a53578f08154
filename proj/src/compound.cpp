#include "nluforge/compound.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nluforge/basic.hpp"
#include "nluforge/error.hpp"

namespace nluforge {

void GuidelineConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be in [0, 1]");
    };
    prob(use_description, "use_description");
    prob(mask_ratio, "mask_ratio");
    prob(variant_prob, "variant_prob");
    if (n_examples_min > n_examples_max) throw Error(ErrorCode::InvalidConfig, "n_examples_min > n_examples_max");
    if (placeholder_name(placeholder_pattern, 1) == placeholder_name(placeholder_pattern, 2))
        throw Error(ErrorCode::InvalidConfig, "placeholder_pattern must contain {i}");
}

GuidelineConfig GuidelineConfig::all_off() {
    GuidelineConfig c;
    c.use_description = 0;
    c.n_examples_min = c.n_examples_max = 0;
    c.mask_ratio = 0;
    c.variant_prob = 0;
    return c;
}

ojson encode_guideline_config(const GuidelineConfig& c) {
    return ojson{{"use_description", c.use_description},
                 {"n_examples_min", c.n_examples_min},
                 {"n_examples_max", c.n_examples_max},
                 {"mask_ratio", c.mask_ratio},
                 {"variant_prob", c.variant_prob},
                 {"placeholder_pattern", c.placeholder_pattern},
                 {"typical_values", c.typical_values}};
}

GuidelineConfig decode_guideline_config(const ojson& v) {
    if (!v.is_object()) throw Error(ErrorCode::InvalidConfig, "guidelines: expected an object");
    GuidelineConfig c;
    try {
        c.use_description = v.value("use_description", c.use_description);
        c.n_examples_min = v.value("n_examples_min", c.n_examples_min);
        c.n_examples_max = v.value("n_examples_max", c.n_examples_max);
        c.mask_ratio = v.value("mask_ratio", c.mask_ratio);
        c.variant_prob = v.value("variant_prob", c.variant_prob);
        c.placeholder_pattern = v.value("placeholder_pattern", c.placeholder_pattern);
        c.typical_values = v.value("typical_values", c.typical_values);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("guidelines: ") + e.what());
    }
    c.validate();
    return c;
}

std::string placeholder_name(const std::string& pattern, std::size_t i) {
    const auto pos = pattern.find("{i}");
    if (pos == std::string::npos) throw Error(ErrorCode::InvalidConfig, "placeholder pattern without {i}: " + pattern);
    std::string out = pattern;
    out.replace(pos, 3, std::to_string(i));
    return out;
}

std::pair<TaskSchema, MaskMap> mask_labels(const TaskSchema& schema, double mask_ratio, const std::string& pattern,
                                           SeededRng& rng) {
    const std::size_t n = schema.entries.size();
    const auto k = static_cast<std::size_t>(std::floor(std::clamp(mask_ratio, 0.0, 1.0) * static_cast<double>(n) + 1e-9));
    std::pair<TaskSchema, MaskMap> out{schema, {}};
    if (k == 0) return out;

    auto picked = rng.sample_indices(n, k);
    std::sort(picked.begin(), picked.end());
    std::set<std::string> taken;
    for (const auto& e : schema.entries) taken.insert(e.name);

    std::size_t i = 0;
    for (auto idx : picked) {
        std::string name;
        do {
            name = placeholder_name(pattern, ++i);
        } while (taken.count(name));
        auto& entry = out.first.entries[idx];
        out.second[name] = entry.name;
        entry.name = name;
    }
    return out;
}

std::pair<TaskSchema, VariantMap> apply_label_variants(const TaskSchema& schema, TaskKind task,
                                                       const SchemaDictionary& dict, double variant_prob,
                                                       SeededRng& rng) {
    std::pair<TaskSchema, VariantMap> out{schema, {}};
    if (variant_prob <= 0.0 || !has_renamable_labels(task)) return out;
    std::set<std::string> taken;
    for (const auto& e : schema.entries) taken.insert(e.name);
    for (auto& entry : out.first.entries) {
        // One draw per entry whether or not it has variants, so later entries
        // see the same stream position regardless of dictionary contents.
        const bool flip = rng.bernoulli(variant_prob);
        const GuidelineEntry* g = dict.find(task, entry.name);
        if (!flip || !g || g->name_variants.empty()) continue;
        const std::string& variant = g->name_variants[rng.below(g->name_variants.size())];
        if (taken.count(variant)) continue;
        taken.insert(variant);
        out.second[variant] = entry.name;
        entry.name = variant;
    }
    return out;
}

AnnotatedSample plain_annotation(const UnifiedSample& sample, std::uint64_t seed) {
    AnnotatedSample a;
    a.sample = sample;
    a.shown_schema = sample.schema;
    a.seed = seed;
    return a;
}

namespace {

std::string with_typical(std::string text, const std::vector<std::string>& values, std::size_t n) {
    if (n == 0 || values.empty()) return text;
    std::string joined;
    for (std::size_t i = 0; i < std::min(n, values.size()); ++i) {
        if (i) joined += ", ";
        joined += values[i];
    }
    if (!text.empty()) text += "\n";
    return text + "typical examples: " + joined;
}

}  // namespace

AnnotatedSample inject_guidelines(const UnifiedSample& sample, const SchemaDictionary& dict,
                                  const GuidelineConfig& config, std::uint64_t seed) {
    config.validate();
    if (sample.task == TaskKind::IG) throw Error(ErrorCode::TaskNotApplicable, "IG samples take no guidelines");

    std::vector<const GuidelineEntry*> entries;
    for (const auto& e : sample.schema.entries) {
        const auto* g = dict.find(sample.task, e.name);
        if (!g) throw Error(ErrorCode::UnknownLabel, dict_key_tag(sample.task, e.name) + " is not in the dictionary");
        entries.push_back(g);
    }

    AnnotatedSample a = plain_annotation(sample, seed);

    auto desc_rng = SeededRng::stream(seed, sample.id, "description");
    for (const auto* g : entries) {
        if (!desc_rng.bernoulli(config.use_description)) continue;
        std::string text;
        if (!g->descriptions.empty()) text = g->descriptions[desc_rng.below(g->descriptions.size())];
        text = with_typical(std::move(text), g->typical_values, config.typical_values);
        if (text.empty()) continue;
        a.descriptions[g->label] = text;
        for (const auto& role : g->roles) {
            std::string rt = role.descriptions.empty() ? std::string()
                                                       : role.descriptions[desc_rng.below(role.descriptions.size())];
            rt = with_typical(std::move(rt), role.typical_values, config.typical_values);
            if (!rt.empty()) a.role_descriptions[g->label][role.role] = rt;
        }
    }

    auto ex_rng = SeededRng::stream(seed, sample.id, "examples");
    const std::size_t n_examples =
        config.n_examples_min + ex_rng.below(config.n_examples_max - config.n_examples_min + 1);
    if (n_examples > 0 && !entries.empty()) {
        // Spread the quota over labels, then interleave label by label.
        const std::size_t L = entries.size();
        std::vector<std::vector<GuidelineExample>> per_label(L);
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t quota = n_examples / L + (l < n_examples % L ? 1 : 0);
            if (quota == 0) continue;
            GuidelineSelector wants;
            wants.positive = (quota + 1) / 2;
            wants.negative = quota / 2;
            wants.exclude_id = sample.id;
            per_label[l] = sample_guidelines(dict, sample.task, entries[l]->label, ex_rng, wants).examples;
        }
        std::set<std::string> seen{sample.id};
        for (std::size_t round = 0; a.examples.size() < n_examples; ++round) {
            bool any = false;
            for (auto& list : per_label) {
                if (round >= list.size()) continue;
                any = true;
                if (a.examples.size() < n_examples && seen.insert(list[round].source_id).second)
                    a.examples.push_back(list[round]);
            }
            if (!any) break;
        }
    }

    auto variant_rng = SeededRng::stream(seed, sample.id, "variant");
    auto [varied, variant_map] = apply_label_variants(sample.schema, sample.task, dict, config.variant_prob, variant_rng);
    auto mask_rng = SeededRng::stream(seed, sample.id, "mask");
    auto [masked, mask_map] = has_renamable_labels(sample.task)
                                  ? mask_labels(varied, config.mask_ratio, config.placeholder_pattern, mask_rng)
                                  : std::pair<TaskSchema, MaskMap>{varied, {}};
    a.shown_schema = std::move(masked);
    a.variant_map = std::move(variant_map);
    a.mask_map = std::move(mask_map);
    for (std::size_t i = 0; i < sample.schema.entries.size(); ++i) {
        const auto& from = sample.schema.entries[i].name;
        const auto& to = a.shown_schema.entries[i].name;
        if (from != to) a.renames[from] = to;
    }

    a.guidelines_injected = !a.descriptions.empty() || !a.examples.empty() || !a.renames.empty();
    return a;
}

namespace {

template <typename V>
std::map<std::string, V> rekey(const std::map<std::string, V>& by_original, const std::map<std::string, std::string>& renames) {
    std::map<std::string, V> out;
    for (const auto& [k, v] : by_original) {
        auto it = renames.find(k);
        out[it == renames.end() ? k : it->second] = v;
    }
    return out;
}

TaskSchema rename_schema(TaskSchema schema, const std::map<std::string, std::string>& renames) {
    for (auto& e : schema.entries)
        if (auto it = renames.find(e.name); it != renames.end()) e.name = it->second;
    return schema;
}

}  // namespace

RenderedInstruction render_compound(const AnnotatedSample& a, TemplateId id, OutputFormat format,
                                    const EmptyWeights* empty_weights, const TemplatePack& pack) {
    const UnifiedSample& sample = a.sample;
    if (id.task != sample.task) {
        throw Error(ErrorCode::TemplateTaskMismatch, "template for " + std::string(to_string(id.task)) + " used on " +
                                                         std::string(to_string(sample.task)) + " sample " + sample.id);
    }
    if (sample.task == TaskKind::IG) throw Error(ErrorCode::TaskNotApplicable, "IG samples have no compound form");
    if (!format_supported(sample.task, format)) {
        throw Error(ErrorCode::UnsupportedFormat,
                    std::string(to_string(sample.task)) + " cannot be rendered as " + std::string(to_string(format)));
    }
    if (sample.schema.empty()) throw Error(ErrorCode::EmptySchema, "sample " + sample.id);

    UnifiedSample shown = sample;
    shown.schema = a.shown_schema;
    shown.gold = rename_labels(sample.gold, a.renames);

    PromptParts parts;
    parts.format = format;
    parts.annotations = basic_annotations(shown);
    for (auto& [k, v] : rekey(a.descriptions, a.renames)) parts.annotations.descriptions[k] = v;
    parts.annotations.role_descriptions = rekey(a.role_descriptions, a.renames);
    parts.annotations.show_rules = true;
    for (const auto& ex : a.examples) {
        ExampleView view;
        view.input = ex.input;
        view.schema = rename_schema(ex.schema, a.renames);
        view.output = rename_labels(ex.output, a.renames);
        if (sample.task == TaskKind::MRC && !ex.schema.entries.empty()) {
            view.question = ex.schema.entries.front().question;
            view.choices = ex.schema.entries.front().choices;
        }
        parts.examples.push_back(std::move(view));
    }

    const InstructionTemplate& tmpl = pack.get(id, sample.language);

    RenderedInstruction out;
    out.id = sample.id + "#C";
    out.task = sample.task;
    out.style = Style::C;
    out.format = format;
    out.prompt = assemble_prompt(tmpl, shown, parts);
    const std::string canonical = serialize(shown.gold, sample.task, format, shown.schema);
    if (empty_weights && is_empty_gold(shown.gold)) {
        auto rng = SeededRng::stream(a.seed, sample.id, "empty");
        out.target = serialize(shown.gold, sample.task, format, shown.schema, *empty_weights, rng);
    } else {
        out.target = canonical;
    }

    if (a.guidelines_injected) out.add(Strategy::GUIDELINES);
    if (sample.origin) out.add(Strategy::RULES);
    if (format != default_format(sample.task) || out.target != canonical) out.add(Strategy::FORMAT);

    out.provenance = ojson{{"source_id", sample.id},
                           {"seed", a.seed},
                           {"template", template_tag(tmpl)},
                           {"mask_map", encode_name_map(a.mask_map)},
                           {"variant_map", encode_name_map(a.variant_map)}};
    if (sample.origin) out.provenance["rule_id"] = sample.origin->rule_id;
    return out;
}

GoldLabel unmask_gold(const GoldLabel& gold, const MaskMap& mask_map, const VariantMap& variant_map) {
    return rename_labels(rename_labels(gold, mask_map), variant_map);
}

ojson encode_name_map(const std::map<std::string, std::string>& map) {
    ojson out = ojson::object();
    for (const auto& [k, v] : map) out[k] = v;
    return out;
}

}  // namespace nluforge
