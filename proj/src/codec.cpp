#include "nluforge/codec.hpp"

#include "nluforge/detail/overloaded.hpp"
#include "nluforge/error.hpp"

namespace nluforge {

using detail::overloaded;

namespace {

[[noreturn]] void malformed(const std::string& cause) { throw Error(ErrorCode::MalformedRecord, cause); }

const ojson& require(const ojson& obj, const char* key) {
    if (!obj.is_object()) malformed(std::string("expected object holding '") + key + "'");
    auto it = obj.find(key);
    if (it == obj.end()) malformed(std::string("missing key '") + key + "'");
    return *it;
}

std::string require_string(const ojson& obj, const char* key) {
    const ojson& v = require(obj, key);
    if (!v.is_string()) malformed(std::string("key '") + key + "' must be a string");
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const ojson& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) malformed(std::string("key '") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const ojson& v, const char* what) {
    if (!v.is_array()) malformed(std::string(what) + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) malformed(std::string(what) + " must be a list of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

const ojson& require_array(const ojson& obj, const char* key) {
    const ojson& v = require(obj, key);
    if (!v.is_array()) malformed(std::string("key '") + key + "' must be a list");
    return v;
}

ojson encode_arg(const ArgValue& value) {
    return std::visit(overloaded{
                          [](const std::string& s) { return ojson(s); },
                          [](const std::vector<std::string>& list) { return ojson(list); },
                          [](const Nan&) { return ojson(std::string(kNanLiteral)); },
                      },
                      value);
}

ArgValue decode_arg(const ojson& v) {
    if (v.is_string()) {
        auto s = v.get<std::string>();
        if (s == kNanLiteral) return Nan{};
        return s;
    }
    return string_list(v, "argument value");
}

ojson encode_attr(const AttrValue& value) {
    return std::visit([](const auto& x) { return ojson(x); }, value);
}

AttrValue decode_attr(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    return string_list(v, "attribute value");
}

}  // namespace

std::string dump_compact(const ojson& value) {
    return value.dump(-1, ' ', false, nlohmann::detail::error_handler_t::strict);
}

ojson encode_schema(const TaskSchema& schema) {
    ojson out = ojson::array();
    for (const auto& entry : schema.entries) {
        ojson e = ojson::object();
        e["name"] = entry.name;
        e["kind"] = std::string(to_string(entry.kind));
        if (entry.description) e["description"] = *entry.description;
        ojson constraints = ojson::object();
        if (entry.subject_type) constraints["subject_type"] = *entry.subject_type;
        if (entry.object_type) constraints["object_type"] = *entry.object_type;
        if (!entry.roles.empty()) constraints["roles"] = entry.roles;
        if (entry.trigger) constraints["trigger"] = true;
        if (entry.given_trigger) constraints["given_trigger"] = *entry.given_trigger;
        if (entry.question) constraints["question"] = *entry.question;
        if (!entry.choices.empty()) constraints["choices"] = entry.choices;
        if (!constraints.empty()) e["constraints"] = std::move(constraints);
        if (entry.rule) e["rule"] = *entry.rule;
        out.push_back(std::move(e));
    }
    return out;
}

TaskSchema decode_schema(const ojson& value) {
    if (!value.is_array()) malformed("schema must be a list");
    TaskSchema schema;
    for (const auto& e : value) {
        SchemaEntry entry;
        entry.name = require_string(e, "name");
        auto kind = parse_entry_kind(require_string(e, "kind"));
        if (!kind) malformed("unknown schema kind for '" + entry.name + "'");
        entry.kind = *kind;
        entry.description = optional_string(e, "description");
        entry.rule = optional_string(e, "rule");
        if (auto it = e.find("constraints"); it != e.end()) {
            const ojson& c = *it;
            if (!c.is_object()) malformed("constraints must be an object");
            entry.subject_type = optional_string(c, "subject_type");
            entry.object_type = optional_string(c, "object_type");
            if (auto r = c.find("roles"); r != c.end()) entry.roles = string_list(*r, "roles");
            if (auto t = c.find("trigger"); t != c.end()) {
                if (!t->is_boolean()) malformed("trigger must be a boolean");
                entry.trigger = t->get<bool>();
            }
            entry.given_trigger = optional_string(c, "given_trigger");
            entry.question = optional_string(c, "question");
            if (auto ch = c.find("choices"); ch != c.end()) entry.choices = string_list(*ch, "choices");
        }
        schema.entries.push_back(std::move(entry));
    }
    return schema;
}

ojson encode_gold(const GoldLabel& gold) {
    ojson out = ojson::object();
    std::visit(overloaded{
                   [&](const EntitySet& g) {
                       ojson items = ojson::array();
                       for (const auto& e : g.items) items.push_back(ojson{{"label", e.label}, {"span", e.span}});
                       out["entities"] = std::move(items);
                   },
                   [&](const RelationSet& g) {
                       ojson items = ojson::array();
                       for (const auto& r : g.items)
                           items.push_back(ojson{{"predicate", r.predicate}, {"subject", r.subject}, {"object", r.object}});
                       out["relations"] = std::move(items);
                   },
                   [&](const SpoSet& g) {
                       ojson items = ojson::array();
                       for (const auto& t : g.items) {
                           items.push_back(ojson{{"predicate", t.predicate},
                                                 {"subject", t.subject},
                                                 {"subject_type", t.subject_type},
                                                 {"object", t.object},
                                                 {"object_type", t.object_type}});
                       }
                       out["triples"] = std::move(items);
                   },
                   [&](const EventSet& g) {
                       ojson items = ojson::array();
                       for (const auto& ev : g.items) {
                           ojson e = ojson::object();
                           e["event_type"] = ev.event_type;
                           if (ev.trigger) e["trigger"] = *ev.trigger;
                           ojson args = ojson::object();
                           for (const auto& [role, value] : ev.arguments) args[role] = encode_arg(value);
                           e["arguments"] = std::move(args);
                           items.push_back(std::move(e));
                       }
                       out["events"] = std::move(items);
                   },
                   [&](const OpenTuples& g) {
                       ojson items = ojson::array();
                       for (const auto& tuple : g.items) {
                           ojson t = ojson::array();
                           for (const auto& el : tuple) t.push_back(ojson{{"role", el.role}, {"text", el.text}});
                           items.push_back(std::move(t));
                       }
                       out["tuples"] = std::move(items);
                   },
                   [&](const KgEntities& g) {
                       ojson types = ojson::array();
                       for (const auto& type : g.types) {
                           ojson entities = ojson::array();
                           for (const auto& entity : type.entities) {
                               ojson attrs = ojson::object();
                               for (const auto& [attr, value] : entity.attributes) attrs[attr] = encode_attr(value);
                               entities.push_back(ojson{{"name", entity.name}, {"attributes", std::move(attrs)}});
                           }
                           types.push_back(ojson{{"type", type.type}, {"entities", std::move(entities)}});
                       }
                       out["kg"] = std::move(types);
                   },
                   [&](const Answer& g) { out["answer"] = g.text; },
                   [&](const ClassLabel& g) { out["class_label"] = g.label; },
                   [&](const FreeResponse& g) { out["response"] = g.text; },
               },
               gold);
    return out;
}

GoldLabel decode_gold(const ojson& v) {
    if (!v.is_object() || v.size() != 1) malformed("gold must be an object with exactly one variant key");
    const std::string& key = v.begin().key();
    const ojson& body = v.begin().value();
    if (key == "entities") {
        if (!body.is_array()) malformed("entities must be a list");
        EntitySet g;
        for (const auto& e : body) g.items.push_back({require_string(e, "label"), require_string(e, "span")});
        return g;
    }
    if (key == "relations") {
        if (!body.is_array()) malformed("relations must be a list");
        RelationSet g;
        for (const auto& r : body)
            g.items.push_back({require_string(r, "predicate"), require_string(r, "subject"), require_string(r, "object")});
        return g;
    }
    if (key == "triples") {
        if (!body.is_array()) malformed("triples must be a list");
        SpoSet g;
        for (const auto& t : body) {
            g.items.push_back({require_string(t, "predicate"), require_string(t, "subject"),
                               require_string(t, "subject_type"), require_string(t, "object"),
                               require_string(t, "object_type")});
        }
        return g;
    }
    if (key == "events") {
        if (!body.is_array()) malformed("events must be a list");
        EventSet g;
        for (const auto& e : body) {
            EventMention ev;
            ev.event_type = require_string(e, "event_type");
            ev.trigger = optional_string(e, "trigger");
            if (auto it = e.find("arguments"); it != e.end()) {
                if (!it->is_object()) malformed("arguments must be an object");
                for (const auto& [role, value] : it->items()) ev.arguments.emplace_back(role, decode_arg(value));
            }
            g.items.push_back(std::move(ev));
        }
        return g;
    }
    if (key == "tuples") {
        if (!body.is_array()) malformed("tuples must be a list");
        OpenTuples g;
        for (const auto& t : body) {
            if (!t.is_array()) malformed("each tuple must be a list");
            OpenTuple tuple;
            for (const auto& el : t) tuple.push_back({require_string(el, "role"), require_string(el, "text")});
            g.items.push_back(std::move(tuple));
        }
        return g;
    }
    if (key == "kg") {
        if (!body.is_array()) malformed("kg must be a list");
        KgEntities g;
        for (const auto& t : body) {
            KgType type{require_string(t, "type"), {}};
            for (const auto& e : require_array(t, "entities")) {
                KgEntity entity{require_string(e, "name"), {}};
                const ojson& attrs = require(e, "attributes");
                if (!attrs.is_object()) malformed("attributes must be an object");
                for (const auto& [attr, value] : attrs.items()) entity.attributes.emplace_back(attr, decode_attr(value));
                type.entities.push_back(std::move(entity));
            }
            g.types.push_back(std::move(type));
        }
        return g;
    }
    if (key == "answer") return Answer{require_string(v, "answer")};
    if (key == "class_label") return ClassLabel{require_string(v, "class_label")};
    if (key == "response") return FreeResponse{require_string(v, "response")};
    malformed("unknown gold variant '" + key + "'");
}

ojson encode_sample(const UnifiedSample& sample) {
    ojson out = ojson::object();
    out["id"] = sample.id;
    out["task"] = std::string(to_string(sample.task));
    out["text"] = sample.text;
    out["schema"] = encode_schema(sample.schema);
    out["gold"] = encode_gold(sample.gold);
    out["source"] = sample.source;
    out["language"] = sample.language;
    if (sample.origin) {
        out["provenance"] = ojson{{"rule_id", sample.origin->rule_id},
                                  {"original_gold", encode_gold(sample.origin->original_gold)}};
    }
    return out;
}

UnifiedSample decode_sample(const ojson& v) {
    if (!v.is_object()) malformed("record must be a JSON object");
    UnifiedSample s;
    s.id = require_string(v, "id");
    auto task = parse_task(require_string(v, "task"));
    if (!task) malformed("unknown task kind");
    s.task = *task;
    s.text = require_string(v, "text");
    s.schema = decode_schema(require(v, "schema"));
    s.gold = decode_gold(require(v, "gold"));
    s.source = require_string(v, "source");
    s.language = require_string(v, "language");
    if (auto it = v.find("provenance"); it != v.end()) {
        s.origin = SampleOrigin{require_string(*it, "rule_id"), decode_gold(require(*it, "original_gold"))};
    }
    return s;
}

}  // namespace nluforge
