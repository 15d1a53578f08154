#include "nluforge/render.hpp"

#include <algorithm>

#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"

namespace nluforge {

bool RenderedInstruction::has(Strategy strategy) const {
    return std::find(strategies.begin(), strategies.end(), strategy) != strategies.end();
}

void RenderedInstruction::add(Strategy strategy) {
    if (has(strategy)) return;
    strategies.push_back(strategy);
    std::sort(strategies.begin(), strategies.end());
}

ojson encode_record(const RenderedInstruction& record) {
    ojson strategies = ojson::array();
    for (auto s : record.strategies) strategies.push_back(to_string(s));
    return ojson{{"id", record.id},
                 {"task", to_string(record.task)},
                 {"style", to_string(record.style)},
                 {"strategies", std::move(strategies)},
                 {"format", to_string(record.format)},
                 {"prompt", record.prompt},
                 {"target", record.target},
                 {"provenance", record.provenance}};
}

RenderedInstruction decode_record(const ojson& value) {
    auto bad = [](const std::string& cause) -> Error { return Error(ErrorCode::MalformedRecord, cause); };
    if (!value.is_object()) throw bad("record must be an object");
    try {
        RenderedInstruction r;
        r.id = value.at("id").get<std::string>();
        auto task = parse_task(value.at("task").get<std::string>());
        auto style = parse_style(value.at("style").get<std::string>());
        auto format = parse_format(value.at("format").get<std::string>());
        if (!task || !style || !format) throw bad("bad task/style/format in record " + r.id);
        r.task = *task;
        r.style = *style;
        r.format = *format;
        for (const auto& s : value.at("strategies")) {
            auto strategy = parse_strategy(s.get<std::string>());
            if (!strategy) throw bad("bad strategy in record " + r.id);
            r.add(*strategy);
        }
        r.prompt = value.at("prompt").get<std::string>();
        r.target = value.at("target").get<std::string>();
        r.provenance = value.value("provenance", ojson::object());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw bad(e.what());
    }
}

std::string record_line(const RenderedInstruction& record) { return dump_compact(encode_record(record)); }

namespace {

const char* name_key(TaskKind task) {
    switch (task) {
        case TaskKind::NER:
        case TaskKind::KGE: return "entity_type";
        case TaskKind::RE: return "relation";
        case TaskKind::TC: return "type";
        default: return "event_type";
    }
}

void add_guideline_fields(ojson& obj, const SchemaEntry& entry, const SchemaAnnotations& ann) {
    if (auto d = ann.descriptions.find(entry.name); d != ann.descriptions.end()) obj["description"] = d->second;
    if (ann.show_rules && entry.rule) obj["rule"] = *entry.rule;
}

bool annotated(const SchemaEntry& entry, const SchemaAnnotations& ann) {
    return ann.descriptions.count(entry.name) > 0 || (ann.show_rules && entry.rule);
}

ojson roles_block(const SchemaEntry& entry, const SchemaAnnotations& ann) {
    auto it = ann.role_descriptions.find(entry.name);
    ojson roles = ojson::array();
    if (it == ann.role_descriptions.end() || it->second.empty()) {
        for (const auto& role : entry.roles) roles.push_back(role);
        return roles;
    }
    for (const auto& role : entry.roles) {
        ojson r{{"argument", role}};
        if (auto d = it->second.find(role); d != it->second.end()) r["description"] = d->second;
        roles.push_back(std::move(r));
    }
    return roles;
}

}  // namespace

ojson schema_block(TaskKind task, const TaskSchema& schema, const SchemaAnnotations& ann) {
    const bool any = std::any_of(schema.entries.begin(), schema.entries.end(),
                                 [&](const SchemaEntry& e) { return annotated(e, ann); });
    ojson block = ojson::array();
    switch (task) {
        case TaskKind::NER:
        case TaskKind::RE:
            for (const auto& e : schema.entries) {
                if (!any) {
                    block.push_back(e.name);
                    continue;
                }
                ojson obj{{name_key(task), e.name}};
                add_guideline_fields(obj, e, ann);
                block.push_back(std::move(obj));
            }
            return block;
        case TaskKind::SPO:
            for (const auto& e : schema.entries) {
                ojson obj{{"subject_type", e.subject_type.value_or("")},
                          {"predicate", e.name},
                          {"object_type", e.object_type.value_or("")}};
                add_guideline_fields(obj, e, ann);
                block.push_back(std::move(obj));
            }
            return block;
        case TaskKind::EE:
        case TaskKind::EEA:
            for (const auto& e : schema.entries) {
                ojson obj{{"event_type", e.name}};
                if (task == TaskKind::EE) obj["trigger"] = e.trigger;
                if (e.given_trigger) obj["trigger"] = *e.given_trigger;
                add_guideline_fields(obj, e, ann);
                obj["arguments"] = roles_block(e, ann);
                block.push_back(std::move(obj));
            }
            return block;
        case TaskKind::EET: {
            const bool all_described =
                !schema.entries.empty() && std::all_of(schema.entries.begin(), schema.entries.end(), [&](const SchemaEntry& e) {
                    return ann.descriptions.count(e.name) > 0;
                });
            const bool rules = std::any_of(schema.entries.begin(), schema.entries.end(),
                                           [&](const SchemaEntry& e) { return ann.show_rules && e.rule; });
            if (all_described && !rules) {
                ojson obj = ojson::object();
                for (const auto& e : schema.entries) obj[e.name] = ann.descriptions.at(e.name);
                return obj;
            }
            for (const auto& e : schema.entries) {
                if (!any) {
                    block.push_back(e.name);
                    continue;
                }
                ojson obj{{"event_type", e.name}};
                add_guideline_fields(obj, e, ann);
                block.push_back(std::move(obj));
            }
            return block;
        }
        case TaskKind::KGE:
            for (const auto& e : schema.entries) {
                ojson obj{{"entity_type", e.name}};
                add_guideline_fields(obj, e, ann);
                obj["attributes"] = e.roles;
                block.push_back(std::move(obj));
            }
            return block;
        case TaskKind::TC: {
            if (!any) {
                std::string joined;
                for (const auto& e : schema.entries) {
                    if (!joined.empty()) joined += ", ";
                    joined += e.name;
                }
                block.push_back(joined);
                return block;
            }
            for (const auto& e : schema.entries) {
                ojson obj{{"type", e.name}};
                add_guideline_fields(obj, e, ann);
                block.push_back(std::move(obj));
            }
            return block;
        }
        case TaskKind::MRC:
        case TaskKind::OPENIE:
        case TaskKind::IG: break;
    }
    return nullptr;
}

namespace {

const SchemaEntry* mrc_entry(const UnifiedSample& s) {
    if (s.task != TaskKind::MRC || s.schema.entries.empty()) return nullptr;
    return &s.schema.entries.front();
}

ojson example_output_json(const ExampleView& ex, TaskKind task, OutputFormat format) {
    if (format == OutputFormat::JSON) return to_json_value(ex.output, task, ex.schema);
    return serialize(ex.output, task, format, ex.schema);
}

std::string example_output_text(const ExampleView& ex, TaskKind task, OutputFormat format) {
    return serialize(ex.output, task, format, ex.schema);
}

}  // namespace

std::string assemble_prompt(const InstructionTemplate& tmpl, const UnifiedSample& shown, const PromptParts& parts) {
    std::string sentence = tmpl.instruction(parts.format);
    if (!parts.examples.empty()) sentence += tmpl.examples_suffix;
    const ojson schema = schema_block(shown.task, shown.schema, parts.annotations);
    const SchemaEntry* mrc = mrc_entry(shown);

    if (tmpl.layout == PromptLayout::Json) {
        ojson obj{{"instruction", sentence}};
        if (!schema.is_null()) obj["schema"] = schema;
        if (parts.format == OutputFormat::JSON && tmpl.output_format) obj["output_format"] = *tmpl.output_format;
        if (!parts.examples.empty()) {
            ojson list = ojson::array();
            for (const auto& ex : parts.examples) {
                ojson item{{"input", ex.input}};
                if (ex.question) item["question"] = *ex.question;
                if (!ex.choices.empty()) item["choice"] = ex.choices;
                item["output"] = example_output_json(ex, shown.task, parts.format);
                list.push_back(std::move(item));
            }
            obj["example"] = std::move(list);
        }
        obj["input"] = shown.text;
        if (mrc && mrc->question) obj["question"] = *mrc->question;
        if (mrc && !mrc->choices.empty()) obj["choice"] = mrc->choices;
        return dump_compact(obj);
    }

    std::string out = sentence;
    if (!schema.is_null()) out += "\nSchema:" + dump_compact(schema);
    if (!parts.examples.empty()) {
        out += "\nExamples:";
        for (const auto& ex : parts.examples) {
            out += "\nInput:" + ex.input;
            if (ex.question) out += "\nQuestion:" + *ex.question;
            if (!ex.choices.empty()) out += "\nChoice:" + dump_compact(ojson(ex.choices));
            out += "\nOutput:" + example_output_text(ex, shown.task, parts.format);
        }
    }
    out += "\nInput:" + shown.text;
    if (mrc && mrc->question) out += "\nQuestion:" + *mrc->question;
    if (mrc && !mrc->choices.empty()) out += "\nChoice:" + dump_compact(ojson(mrc->choices));
    return out;
}

std::string template_tag(const InstructionTemplate& tmpl) {
    return std::string(to_string(tmpl.task)) + "/" + std::to_string(tmpl.index) + "/" + tmpl.language;
}

}  // namespace nluforge
