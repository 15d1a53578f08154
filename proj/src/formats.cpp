#include "nluforge/formats.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "nluforge/detail/overloaded.hpp"
#include "nluforge/error.hpp"

namespace nluforge {

using detail::overloaded;

namespace {

[[noreturn]] void fail(std::size_t position, const std::string& cause) {
    throw Error(ErrorCode::ParseFailure, "at " + std::to_string(position) + ": " + cause);
}

[[noreturn]] void unsupported(TaskKind task, OutputFormat format) {
    throw Error(ErrorCode::UnsupportedFormat,
                std::string(to_string(task)) + " cannot be rendered as " + std::string(to_string(format)));
}

// ---------------------------------------------------------------------------
// Escaping shared by the line-oriented formats.

std::string escape(std::string_view text, std::string_view specials) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '\\' || specials.find(c) != std::string_view::npos) {
            out.push_back('\\');
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string unescape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) {
            char next = text[++i];
            if (next == 'n') {
                out.push_back('\n');
            } else if (next == 'r') {
                out.push_back('\r');
            } else {
                out.push_back(next);
            }
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

/// Split on `delim` where it is not backslash-escaped. Pieces keep escapes.
std::vector<std::string> split_unescaped(std::string_view text, char delim, std::size_t max_pieces = 0) {
    std::vector<std::string> out(1);
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\\' && i + 1 < text.size()) {
            out.back().push_back(c);
            out.back().push_back(text[++i]);
        } else if (c == delim && (max_pieces == 0 || out.size() < max_pieces)) {
            out.emplace_back();
        } else {
            out.back().push_back(c);
        }
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty() && current.back() == '\r') current.pop_back();
    lines.push_back(std::move(current));
    return lines;
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// ---------------------------------------------------------------------------
// Label bookkeeping for parse results.

struct LabelTracker {
    const TaskSchema& schema;
    std::vector<std::string> unknown;

    void see(const std::string& label) {
        if (schema.find(label) == nullptr && std::find(unknown.begin(), unknown.end(), label) == unknown.end()) {
            unknown.push_back(label);
        }
    }
};

// ---------------------------------------------------------------------------
// JSON

std::string span_from_json(const ojson& v, const char* what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    fail(0, std::string(what) + " must be a string");
}

std::vector<std::string> span_list_from_json(const ojson& v, const char* what) {
    std::vector<std::string> out;
    if (v.is_array()) {
        for (const auto& item : v) out.push_back(span_from_json(item, what));
    } else if (v.is_string() && v.get<std::string>() == kNanLiteral) {
        // a label explicitly answered with NAN: no mentions
    } else {
        out.push_back(span_from_json(v, what));
    }
    return out;
}

ojson arg_to_json(const ArgValue& value) {
    return std::visit(overloaded{
                          [](const std::string& s) { return ojson(s); },
                          [](const std::vector<std::string>& list) { return ojson(list); },
                          [](const Nan&) { return ojson(std::string(kNanLiteral)); },
                      },
                      value);
}

ArgValue arg_from_json(const ojson& v) {
    if (v.is_string()) {
        auto s = v.get<std::string>();
        if (s == kNanLiteral) return Nan{};
        return s;
    }
    if (v.is_array()) {
        std::vector<std::string> list;
        for (const auto& item : v) list.push_back(span_from_json(item, "argument value"));
        return list;
    }
    if (v.is_null()) return Nan{};
    return span_from_json(v, "argument value");
}

ojson attr_to_json(const AttrValue& value) {
    return std::visit([](const auto& x) { return ojson(x); }, value);
}

AttrValue attr_from_json(const ojson& v) {
    if (v.is_array()) {
        std::vector<std::string> list;
        for (const auto& item : v) list.push_back(span_from_json(item, "attribute value"));
        return list;
    }
    return span_from_json(v, "attribute value");
}

/// Ordered names for a keyed JSON object: schema order first, then labels the
/// gold uses that the schema lacks.
std::vector<std::string> keyed_names(const TaskSchema& schema, const GoldLabel& gold) {
    std::vector<std::string> names = schema.names();
    for (const auto& label : referenced_labels(gold)) {
        if (std::find(names.begin(), names.end(), label) == names.end()) names.push_back(label);
    }
    return names;
}

ojson gold_to_json(const GoldLabel& raw, TaskKind task, const TaskSchema& schema) {
    const GoldLabel gold = canonicalize_gold(raw, task, schema);
    ojson out = ojson::object();
    switch (task) {
        case TaskKind::NER: {
            const auto& g = std::get<EntitySet>(gold);
            for (const auto& name : keyed_names(schema, gold)) {
                ojson spans = ojson::array();
                for (const auto& e : g.items)
                    if (e.label == name) spans.push_back(e.span);
                out[name] = std::move(spans);
            }
            return out;
        }
        case TaskKind::RE: {
            const auto& g = std::get<RelationSet>(gold);
            for (const auto& name : keyed_names(schema, gold)) {
                ojson pairs = ojson::array();
                for (const auto& r : g.items)
                    if (r.predicate == name) pairs.push_back(ojson{{"subject", r.subject}, {"object", r.object}});
                out[name] = std::move(pairs);
            }
            return out;
        }
        case TaskKind::SPO: {
            const auto& g = std::get<SpoSet>(gold);
            for (const auto& name : keyed_names(schema, gold)) {
                ojson pairs = ojson::array();
                for (const auto& t : g.items)
                    if (t.predicate == name) pairs.push_back(ojson{{"subject", t.subject}, {"object", t.object}});
                out[name] = std::move(pairs);
            }
            return out;
        }
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: {
            const auto& g = std::get<EventSet>(gold);
            for (const auto& name : keyed_names(schema, gold)) {
                ojson mentions = ojson::array();
                for (const auto& ev : g.items) {
                    if (ev.event_type != name) continue;
                    if (task == TaskKind::EET) {
                        mentions.push_back(ev.trigger.value_or(""));
                        continue;
                    }
                    ojson args = ojson::object();
                    for (const auto& [role, value] : ev.arguments) args[role] = arg_to_json(value);
                    if (task == TaskKind::EEA) {
                        mentions.push_back(std::move(args));
                    } else {
                        ojson m = ojson::object();
                        if (ev.trigger) m["trigger"] = *ev.trigger;
                        m["arguments"] = std::move(args);
                        mentions.push_back(std::move(m));
                    }
                }
                out[name] = std::move(mentions);
            }
            return out;
        }
        case TaskKind::OPENIE: {
            ojson list = ojson::array();
            for (const auto& tuple : std::get<OpenTuples>(gold).items) {
                ojson t = ojson::object();
                for (const auto& el : tuple) t[el.role] = el.text;
                list.push_back(std::move(t));
            }
            return list;
        }
        case TaskKind::KGE: {
            for (const auto& type : std::get<KgEntities>(gold).types) {
                ojson entities = ojson::object();
                for (const auto& entity : type.entities) {
                    ojson attrs = ojson::object();
                    for (const auto& [attr, value] : entity.attributes) attrs[attr] = attr_to_json(value);
                    entities[entity.name] = std::move(attrs);
                }
                out[type.type] = std::move(entities);
            }
            return out;
        }
        case TaskKind::MRC: out["answer"] = std::get<Answer>(gold).text; return out;
        case TaskKind::TC: out["type"] = std::get<ClassLabel>(gold).label; return out;
        case TaskKind::IG: break;
    }
    unsupported(task, OutputFormat::JSON);
}

const ojson& expect_array(const ojson& v, const std::string& what) {
    if (!v.is_array()) fail(0, what + " must be a list");
    return v;
}

const ojson& expect_object(const ojson& v, const std::string& what) {
    if (!v.is_object()) fail(0, what + " must be an object");
    return v;
}

GoldLabel gold_from_json(const ojson& v, TaskKind task, const TaskSchema& schema, LabelTracker& labels) {
    switch (task) {
        case TaskKind::NER: {
            EntitySet g;
            if (v.is_array()) {
                // [{"entity_type": ..., "entity": ...}] records
                for (const auto& item : v) {
                    expect_object(item, "entity record");
                    auto type = item.find("entity_type");
                    auto entity = item.find("entity");
                    if (type == item.end() || entity == item.end()) fail(0, "entity record needs entity_type and entity");
                    std::string label = span_from_json(*type, "entity_type");
                    labels.see(label);
                    g.items.push_back({label, span_from_json(*entity, "entity")});
                }
                return g;
            }
            for (const auto& [label, spans] : expect_object(v, "NER output").items()) {
                labels.see(label);
                for (auto& span : span_list_from_json(spans, "entity span")) g.items.push_back({label, std::move(span)});
            }
            return g;
        }
        case TaskKind::RE:
        case TaskKind::SPO: {
            RelationSet rel;
            SpoSet spo;
            for (const auto& [predicate, pairs] : expect_object(v, "relation output").items()) {
                labels.see(predicate);
                if (pairs.is_string() && pairs.get<std::string>() == kNanLiteral) continue;
                for (const auto& pair : expect_array(pairs, "relation '" + predicate + "'")) {
                    expect_object(pair, "relation instance");
                    auto s = pair.find("subject");
                    auto o = pair.find("object");
                    if (s == pair.end() || o == pair.end()) fail(0, "relation instance needs subject and object");
                    if (task == TaskKind::RE) {
                        rel.items.push_back({predicate, span_from_json(*s, "subject"), span_from_json(*o, "object")});
                    } else {
                        const SchemaEntry* entry = schema.find(predicate);
                        spo.items.push_back({predicate, span_from_json(*s, "subject"),
                                             entry && entry->subject_type ? *entry->subject_type : "",
                                             span_from_json(*o, "object"),
                                             entry && entry->object_type ? *entry->object_type : ""});
                    }
                }
            }
            if (task == TaskKind::RE) return rel;
            return spo;
        }
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: {
            EventSet g;
            for (const auto& [type, mentions] : expect_object(v, "event output").items()) {
                labels.see(type);
                if (mentions.is_string() && mentions.get<std::string>() == kNanLiteral) continue;
                for (const auto& m : expect_array(mentions, "event '" + type + "'")) {
                    EventMention ev{type, std::nullopt, {}};
                    if (task == TaskKind::EET) {
                        ev.trigger = span_from_json(m, "trigger");
                    } else if (task == TaskKind::EEA) {
                        for (const auto& [role, value] : expect_object(m, "argument map").items())
                            ev.arguments.emplace_back(role, arg_from_json(value));
                    } else {
                        expect_object(m, "event mention");
                        if (auto t = m.find("trigger"); t != m.end()) ev.trigger = span_from_json(*t, "trigger");
                        if (auto a = m.find("arguments"); a != m.end()) {
                            for (const auto& [role, value] : expect_object(*a, "arguments").items())
                                ev.arguments.emplace_back(role, arg_from_json(value));
                        }
                    }
                    g.items.push_back(std::move(ev));
                }
            }
            return canonicalize_gold(g, task, schema);
        }
        case TaskKind::OPENIE: {
            OpenTuples g;
            for (const auto& t : expect_array(v, "OpenIE output")) {
                OpenTuple tuple;
                for (const auto& [role, text] : expect_object(t, "tuple").items())
                    tuple.push_back({role, span_from_json(text, "tuple element")});
                g.items.push_back(std::move(tuple));
            }
            return g;
        }
        case TaskKind::KGE: {
            KgEntities g;
            for (const auto& [type, entities] : expect_object(v, "KGE output").items()) {
                labels.see(type);
                KgType kt{type, {}};
                for (const auto& [name, attrs] : expect_object(entities, "entities of '" + type + "'").items()) {
                    KgEntity entity{name, {}};
                    for (const auto& [attr, value] : expect_object(attrs, "attributes of '" + name + "'").items())
                        entity.attributes.emplace_back(attr, attr_from_json(value));
                    kt.entities.push_back(std::move(entity));
                }
                g.types.push_back(std::move(kt));
            }
            return g;
        }
        case TaskKind::MRC: {
            if (v.is_string()) return Answer{v.get<std::string>()};
            auto it = expect_object(v, "MRC output").find("answer");
            if (it == v.end()) fail(0, "missing 'answer'");
            return Answer{span_from_json(*it, "answer")};
        }
        case TaskKind::TC: {
            if (v.is_string()) {
                labels.see(v.get<std::string>());
                return ClassLabel{v.get<std::string>()};
            }
            auto it = expect_object(v, "TC output").find("type");
            if (it == v.end()) fail(0, "missing 'type'");
            ClassLabel g{span_from_json(*it, "type")};
            labels.see(g.label);
            return g;
        }
        case TaskKind::IG: break;
    }
    unsupported(task, OutputFormat::JSON);
}

// ---------------------------------------------------------------------------
// PLAIN_TEXT

// "label: a; b" lines, one per label that has mentions.
std::string keyed_lines(const std::vector<std::pair<std::string, std::vector<std::string>>>& groups) {
    std::string out;
    for (const auto& [label, values] : groups) {
        if (values.empty()) continue;
        if (!out.empty()) out.push_back('\n');
        out += escape(label, ":;");
        out += ": ";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) out += "; ";
            out += escape(values[i], ";");
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<std::string>>> parse_keyed_lines(std::string_view text) {
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (trim(lines[n]).empty()) continue;
        auto parts = split_unescaped(lines[n], ':', 2);
        if (parts.size() != 2) fail(n + 1, "expected 'label: value; value'");
        std::string label = unescape(trim(parts[0]));
        if (label.empty()) fail(n + 1, "empty label");
        std::vector<std::string> values;
        for (const auto& piece : split_unescaped(parts[1], ';')) {
            std::string value = trim(piece);
            if (!value.empty()) values.push_back(unescape(value));
        }
        out.emplace_back(std::move(label), std::move(values));
    }
    return out;
}

std::string triple_lines(const std::vector<std::array<std::string, 3>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        if (!out.empty()) out.push_back('\n');
        out += escape(row[0], "|") + " | " + escape(row[1], "|") + " | " + escape(row[2], "|");
    }
    return out;
}

std::vector<std::array<std::string, 3>> parse_triple_lines(std::string_view text) {
    std::vector<std::array<std::string, 3>> rows;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (trim(lines[n]).empty()) continue;
        auto cells = split_unescaped(lines[n], '|');
        if (cells.size() != 3) fail(n + 1, "expected 'subject | predicate | object'");
        rows.push_back({unescape(trim(cells[0])), unescape(trim(cells[1])), unescape(trim(cells[2]))});
    }
    return rows;
}

std::string plain_from_gold(const GoldLabel& raw, TaskKind task, const TaskSchema& schema) {
    const GoldLabel gold = canonicalize_gold(raw, task, schema);
    switch (task) {
        case TaskKind::NER: {
            std::vector<std::pair<std::string, std::vector<std::string>>> groups;
            for (const auto& name : keyed_names(schema, gold)) {
                groups.emplace_back(name, std::vector<std::string>{});
                for (const auto& e : std::get<EntitySet>(gold).items)
                    if (e.label == name) groups.back().second.push_back(e.span);
            }
            return keyed_lines(groups);
        }
        case TaskKind::EET: {
            std::vector<std::pair<std::string, std::vector<std::string>>> groups;
            for (const auto& name : keyed_names(schema, gold)) {
                groups.emplace_back(name, std::vector<std::string>{});
                for (const auto& ev : std::get<EventSet>(gold).items)
                    if (ev.event_type == name) groups.back().second.push_back(ev.trigger.value_or(""));
            }
            return keyed_lines(groups);
        }
        case TaskKind::RE: {
            std::vector<std::array<std::string, 3>> rows;
            for (const auto& r : std::get<RelationSet>(gold).items) rows.push_back({r.subject, r.predicate, r.object});
            return triple_lines(rows);
        }
        case TaskKind::SPO: {
            std::vector<std::array<std::string, 3>> rows;
            for (const auto& t : std::get<SpoSet>(gold).items) rows.push_back({t.subject, t.predicate, t.object});
            return triple_lines(rows);
        }
        case TaskKind::MRC: return std::get<Answer>(gold).text;
        case TaskKind::TC: return std::get<ClassLabel>(gold).label;
        default: unsupported(task, OutputFormat::PLAIN_TEXT);
    }
}

GoldLabel plain_to_gold(std::string_view text, TaskKind task, const TaskSchema& schema, LabelTracker& labels) {
    switch (task) {
        case TaskKind::NER: {
            EntitySet g;
            for (auto& [label, values] : parse_keyed_lines(text)) {
                labels.see(label);
                for (auto& v : values) g.items.push_back({label, std::move(v)});
            }
            return g;
        }
        case TaskKind::EET: {
            EventSet g;
            for (auto& [label, values] : parse_keyed_lines(text)) {
                labels.see(label);
                for (auto& v : values) g.items.push_back({label, std::move(v), {}});
            }
            return g;
        }
        case TaskKind::RE: {
            RelationSet g;
            for (auto& row : parse_triple_lines(text)) {
                labels.see(row[1]);
                g.items.push_back({row[1], row[0], row[2]});
            }
            return g;
        }
        case TaskKind::SPO: {
            SpoSet g;
            for (auto& row : parse_triple_lines(text)) {
                labels.see(row[1]);
                const SchemaEntry* entry = schema.find(row[1]);
                g.items.push_back({row[1], row[0], entry && entry->subject_type ? *entry->subject_type : "", row[2],
                                   entry && entry->object_type ? *entry->object_type : ""});
            }
            return g;
        }
        case TaskKind::MRC: return Answer{trim(text)};
        case TaskKind::TC: {
            ClassLabel g{trim(text)};
            if (!g.label.empty()) labels.see(g.label);
            return g;
        }
        default: unsupported(task, OutputFormat::PLAIN_TEXT);
    }
}

// ---------------------------------------------------------------------------
// MARKDOWN_TABLE

constexpr std::string_view kTripleHeader = "| subject |predicate | object |\n| --- | --- |--- |";
constexpr std::string_view kEntityHeader = "| entity_type | entity |\n| --- | --- |";

std::string markdown_cell(std::string_view text) { return escape(text, "|"); }

std::string markdown_from_gold(const GoldLabel& raw, TaskKind task, const TaskSchema& schema) {
    const GoldLabel gold = canonicalize_gold(raw, task, schema);
    std::string out;
    switch (task) {
        case TaskKind::NER:
            out = kEntityHeader;
            for (const auto& e : std::get<EntitySet>(gold).items)
                out += "\n| " + markdown_cell(e.label) + " | " + markdown_cell(e.span) + " |";
            return out;
        case TaskKind::RE:
            out = kTripleHeader;
            for (const auto& r : std::get<RelationSet>(gold).items)
                out += "\n| " + markdown_cell(r.subject) + "| " + markdown_cell(r.predicate) + " | " +
                       markdown_cell(r.object) + " |";
            return out;
        case TaskKind::SPO:
            out = kTripleHeader;
            for (const auto& t : std::get<SpoSet>(gold).items)
                out += "\n| " + markdown_cell(t.subject) + "| " + markdown_cell(t.predicate) + " | " +
                       markdown_cell(t.object) + " |";
            return out;
        default: unsupported(task, OutputFormat::MARKDOWN_TABLE);
    }
}

std::vector<std::string> markdown_cells(std::string_view line) {
    std::string body = trim(line);
    if (!body.empty() && body.front() == '|') body.erase(body.begin());
    if (body.size() >= 1 && body.back() == '|' && (body.size() < 2 || body[body.size() - 2] != '\\')) body.pop_back();
    std::vector<std::string> cells;
    for (const auto& piece : split_unescaped(body, '|')) cells.push_back(trim(piece));
    return cells;
}

bool separator_row(const std::vector<std::string>& cells) {
    if (cells.empty()) return false;
    for (const auto& cell : cells) {
        if (cell.empty()) return false;
        for (char c : cell)
            if (c != '-' && c != ':') return false;
    }
    return true;
}

GoldLabel markdown_to_gold(std::string_view text, TaskKind task, const TaskSchema& schema, LabelTracker& labels) {
    if (task != TaskKind::NER && task != TaskKind::RE && task != TaskKind::SPO) unsupported(task, OutputFormat::MARKDOWN_TABLE);
    const auto lines = split_lines(text);
    std::vector<std::string> columns =
        task == TaskKind::NER ? std::vector<std::string>{"entity_type", "entity"}
                              : std::vector<std::string>{"subject", "predicate", "object"};
    std::vector<std::size_t> index(columns.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;

    bool header_seen = false;
    bool after_header = false;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        std::string line = trim(lines[n]);
        if (line.empty()) continue;
        if (line.front() != '|') fail(n + 1, "table rows must start with '|'");
        auto cells = markdown_cells(line);
        if (after_header) {
            after_header = false;
            if (separator_row(cells)) continue;
        }
        if (!header_seen) {
            header_seen = true;
            after_header = true;
            std::vector<std::string> names;
            for (const auto& c : cells) names.push_back(lower(c));
            bool is_header = true;
            for (std::size_t i = 0; i < columns.size(); ++i) {
                auto it = std::find(names.begin(), names.end(), columns[i]);
                if (task == TaskKind::NER && it == names.end()) {
                    for (const char* alias : {"type", "label", "entity type"}) {
                        if (i == 0 && (it = std::find(names.begin(), names.end(), alias)) != names.end()) break;
                    }
                    if (i == 1 && it == names.end()) it = std::find(names.begin(), names.end(), "span");
                }
                if (it == names.end()) {
                    is_header = false;
                    break;
                }
                index[i] = static_cast<std::size_t>(it - names.begin());
            }
            if (is_header) continue;
            for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
        }
        if (cells.size() != columns.size()) fail(n + 1, "expected " + std::to_string(columns.size()) + " cells");
        std::vector<std::string> row;
        for (std::size_t i : index) row.push_back(unescape(cells[i]));
        rows.push_back(std::move(row));
    }
    if (!header_seen) fail(0, "no table found");
    switch (task) {
        case TaskKind::NER: {
            EntitySet g;
            for (auto& row : rows) {
                labels.see(row[0]);
                g.items.push_back({row[0], row[1]});
            }
            return g;
        }
        case TaskKind::RE: {
            RelationSet g;
            for (auto& row : rows) {
                labels.see(row[1]);
                g.items.push_back({row[1], row[0], row[2]});
            }
            return g;
        }
        default: {
            SpoSet g;
            for (auto& row : rows) {
                labels.see(row[1]);
                const SchemaEntry* entry = schema.find(row[1]);
                g.items.push_back({row[1], row[0], entry && entry->subject_type ? *entry->subject_type : "", row[2],
                                   entry && entry->object_type ? *entry->object_type : ""});
            }
            return g;
        }
    }
}

// ---------------------------------------------------------------------------
// TUPLE_TEXT: ("text":[role], "text":[role]) one tuple per line.

std::string tuple_from_gold(const GoldLabel& gold, TaskKind task) {
    if (task != TaskKind::OPENIE) unsupported(task, OutputFormat::TUPLE_TEXT);
    std::string out;
    for (const auto& tuple : std::get<OpenTuples>(gold).items) {
        if (!out.empty()) out.push_back('\n');
        out.push_back('(');
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            if (i > 0) out += ", ";
            out += "\"" + escape(tuple[i].text, "\"") + "\":[" + escape(tuple[i].role, "]") + "]";
        }
        out.push_back(')');
    }
    return out;
}

class TupleScanner {
  public:
    explicit TupleScanner(std::string_view text) : text_(text) {}

    OpenTuples run() {
        OpenTuples out;
        skip_space();
        while (pos_ < text_.size()) {
            expect('(');
            OpenTuple tuple;
            skip_space();
            if (peek() != ')') {
                while (true) {
                    skip_space();
                    std::string value = quoted();
                    skip_space();
                    expect(':');
                    skip_space();
                    expect('[');
                    std::string role = until(']');
                    expect(']');
                    tuple.push_back({unescape(role), std::move(value)});
                    skip_space();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            expect(')');
            out.items.push_back(std::move(tuple));
            skip_space();
        }
        return out;
    }

  private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        if (peek() != c) fail(pos_, std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string quoted() {
        expect('"');
        std::string raw;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) raw.push_back(text_[pos_++]);
            raw.push_back(text_[pos_++]);
        }
        expect('"');
        return unescape(raw);
    }

    std::string until(char stop) {
        std::string raw;
        while (pos_ < text_.size() && text_[pos_] != stop) {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) raw.push_back(text_[pos_++]);
            raw.push_back(text_[pos_++]);
        }
        return raw;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

bool is_empty_token(std::string_view text, TaskKind task, OutputFormat format) {
    if (legal_empty_candidates(task, format).empty()) return false;
    return text.empty() || text == kNanLiteral || text == "[]";
}

}  // namespace

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

std::string strip_code_fence(std::string_view text) {
    std::string body = trim(text);
    if (body.rfind("```", 0) != 0) return body;
    auto newline = body.find('\n');
    if (newline == std::string::npos) return body;
    body.erase(0, newline + 1);
    auto close = body.rfind("```");
    if (close != std::string::npos) body.erase(close);
    return trim(body);
}

std::string_view to_string(EmptyCandidate candidate) {
    switch (candidate) {
        case EmptyCandidate::EmptyList: return "[]";
        case EmptyCandidate::Nan: return "NAN";
        case EmptyCandidate::EmptyString: return "\"\"";
    }
    return "?";
}

bool format_supported(TaskKind task, OutputFormat format) {
    const auto formats = supported_formats(task);
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::vector<OutputFormat> supported_formats(TaskKind task) {
    using F = OutputFormat;
    switch (task) {
        case TaskKind::NER:
        case TaskKind::RE:
        case TaskKind::SPO: return {F::JSON, F::PLAIN_TEXT, F::MARKDOWN_TABLE};
        case TaskKind::EET:
        case TaskKind::MRC:
        case TaskKind::TC: return {F::JSON, F::PLAIN_TEXT};
        case TaskKind::EE:
        case TaskKind::EEA:
        case TaskKind::KGE: return {F::JSON};
        case TaskKind::OPENIE: return {F::TUPLE_TEXT, F::JSON};
        case TaskKind::IG: return {};
    }
    return {};
}

OutputFormat default_format(TaskKind task) {
    return task == TaskKind::OPENIE ? OutputFormat::TUPLE_TEXT : OutputFormat::JSON;
}

std::vector<EmptyCandidate> legal_empty_candidates(TaskKind task, OutputFormat format) {
    if (!format_supported(task, format) || task == TaskKind::MRC || task == TaskKind::TC) return {};
    return {EmptyCandidate::EmptyList, EmptyCandidate::Nan, EmptyCandidate::EmptyString};
}

std::string empty_candidate_text(EmptyCandidate candidate, TaskKind task, OutputFormat format,
                                 const TaskSchema& schema) {
    switch (candidate) {
        case EmptyCandidate::Nan: return std::string(kNanLiteral);
        case EmptyCandidate::EmptyString: return "";
        case EmptyCandidate::EmptyList: break;
    }
    switch (format) {
        case OutputFormat::JSON: return dump_compact(gold_to_json(empty_gold(task), task, schema));
        case OutputFormat::MARKDOWN_TABLE: return markdown_from_gold(empty_gold(task), task, schema);
        default: return "[]";
    }
}

EmptyCandidate choose_empty_candidate(TaskKind task, OutputFormat format, const EmptyWeights& weights,
                                      SeededRng& rng) {
    const auto legal = legal_empty_candidates(task, format);
    std::vector<double> w;
    for (auto c : legal) {
        double value = c == EmptyCandidate::EmptyList ? weights.empty_list
                       : c == EmptyCandidate::Nan     ? weights.nan
                                                      : weights.empty_string;
        w.push_back(std::max(0.0, value));
    }
    if (legal.empty() || std::all_of(w.begin(), w.end(), [](double x) { return x <= 0.0; })) {
        throw Error(ErrorCode::NoLegalCandidate,
                    std::string(to_string(task)) + "/" + std::string(to_string(format)) + " has no weighted empty candidate");
    }
    return legal[rng.weighted(w)];
}

std::string choose_empty(TaskKind task, OutputFormat format, const EmptyWeights& weights, SeededRng& rng,
                         const TaskSchema& schema) {
    return empty_candidate_text(choose_empty_candidate(task, format, weights, rng), task, format, schema);
}

ojson to_json_value(const GoldLabel& gold, TaskKind task, const TaskSchema& schema) {
    if (!format_supported(task, OutputFormat::JSON)) unsupported(task, OutputFormat::JSON);
    return gold_to_json(gold, task, schema);
}

std::string serialize(const GoldLabel& gold, TaskKind task, OutputFormat format, const TaskSchema& schema) {
    if (!format_supported(task, format)) unsupported(task, format);
    if (!gold_matches_task(gold, task)) throw Error(ErrorCode::TaskMismatch, "gold does not match task");
    if (is_empty_gold(gold) && !legal_empty_candidates(task, format).empty()) {
        return empty_candidate_text(EmptyCandidate::EmptyList, task, format, schema);
    }
    switch (format) {
        case OutputFormat::JSON: return dump_compact(gold_to_json(gold, task, schema));
        case OutputFormat::PLAIN_TEXT: return plain_from_gold(gold, task, schema);
        case OutputFormat::MARKDOWN_TABLE: return markdown_from_gold(gold, task, schema);
        case OutputFormat::TUPLE_TEXT: return tuple_from_gold(gold, task);
    }
    unsupported(task, format);
}

std::string serialize(const GoldLabel& gold, TaskKind task, OutputFormat format, const TaskSchema& schema,
                      const EmptyWeights& weights, SeededRng& rng) {
    if (!format_supported(task, format)) unsupported(task, format);
    if (is_empty_gold(gold) && !legal_empty_candidates(task, format).empty()) {
        return choose_empty(task, format, weights, rng, schema);
    }
    return serialize(gold, task, format, schema);
}

ParsedGold parse(std::string_view text, TaskKind task, OutputFormat format, const TaskSchema& schema) {
    if (!format_supported(task, format)) unsupported(task, format);
    const std::string body = strip_code_fence(text);
    LabelTracker labels{schema, {}};
    if (is_empty_token(body, task, format)) return {empty_gold(task), {}};

    GoldLabel gold = empty_gold(task);
    switch (format) {
        case OutputFormat::JSON: {
            ojson value;
            try {
                value = ojson::parse(body);
            } catch (const nlohmann::json::parse_error& e) {
                fail(e.byte, "invalid JSON");
            }
            gold = gold_from_json(value, task, schema, labels);
            break;
        }
        case OutputFormat::PLAIN_TEXT: gold = plain_to_gold(body, task, schema, labels); break;
        case OutputFormat::MARKDOWN_TABLE: gold = markdown_to_gold(body, task, schema, labels); break;
        case OutputFormat::TUPLE_TEXT: gold = TupleScanner(body).run(); break;
    }
    return {std::move(gold), std::move(labels.unknown)};
}

std::string format_directive(TaskKind task, OutputFormat format, std::string_view language) {
    if (!format_supported(task, format)) unsupported(task, format);
    const bool zh = language.rfind("zh", 0) == 0;
    switch (format) {
        case OutputFormat::JSON:
            if (task == TaskKind::OPENIE)
                return zh ? "请以JSON列表的格式返回结果，每个元组是一个以角色为键的对象。"
                          : "Please respond in the format of a JSON string: a list of objects keyed by role.";
            return zh ? "请按照JSON字符串的格式回答。" : "Please respond in the format of a JSON string.";
        case OutputFormat::MARKDOWN_TABLE:
            if (task == TaskKind::NER)
                return zh ? "请以markdown表格的格式返回结果。表头为 | entity_type | entity |"
                          : "Please return the results in the format of markdown Table.The header is | entity_type | entity |";
            return zh ? "请以markdown表格的格式返回结果。表头为 | subject | predicate | object |"
                      : "Please return the results in the format of markdown Table.The header is | subject | predicate | object |";
        case OutputFormat::PLAIN_TEXT:
            switch (task) {
                case TaskKind::NER:
                case TaskKind::EET:
                    return zh ? "请以纯文本格式返回结果，每行一个类型，格式为 \"类型: 结果1; 结果2\"。"
                              : "Please return the results as plain text, one line per type in the form \"type: item1; item2\".";
                case TaskKind::RE:
                case TaskKind::SPO:
                    return zh ? "请以纯文本格式返回结果，每行一个三元组，格式为 \"subject | predicate | object\"。"
                              : "Please return the results as plain text, one triple per line in the form \"subject | predicate | object\".";
                default:
                    return zh ? "请直接输出答案，不要输出任何额外内容。"
                              : "Please directly output the answer without any additional content.";
            }
        case OutputFormat::TUPLE_TEXT:
            return zh ? "请以 (\"文本\":[角色], ...) 的格式返回结果，每行一个元组，按其在文本中出现的顺序排列。"
                      : "Return them in the format: (\"text\":[role], ...), one tuple per line, arranged in the order "
                        "they appear in the text.";
    }
    unsupported(task, format);
}

}  // namespace nluforge
