#include "nluforge/validate.hpp"

#include <algorithm>
#include <set>

#include "nluforge/detail/overloaded.hpp"

namespace nluforge {

using detail::overloaded;

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::EmptyId: return "EmptyId";
        case ViolationKind::GoldTaskMismatch: return "GoldTaskMismatch";
        case ViolationKind::SchemaKindMismatch: return "SchemaKindMismatch";
        case ViolationKind::DuplicateSchemaName: return "DuplicateSchemaName";
        case ViolationKind::SchemaMismatch: return "SchemaMismatch";
        case ViolationKind::SpoTypeConstraint: return "SpoTypeConstraint";
        case ViolationKind::TriggerPlacement: return "TriggerPlacement";
        case ViolationKind::ArgumentPlacement: return "ArgumentPlacement";
        case ViolationKind::EmptySpan: return "EmptySpan";
        case ViolationKind::DuplicateRole: return "DuplicateRole";
        case ViolationKind::MrcSchema: return "MrcSchema";
    }
    return "?";
}

namespace {

bool contains(const std::vector<std::string>& list, const std::string& value) {
    return std::find(list.begin(), list.end(), value) != list.end();
}

class Checker {
  public:
    Checker(TaskKind task, const TaskSchema& schema, std::vector<Violation>& out)
        : task_(task), schema_(schema), out_(out) {}

    void add(ViolationKind kind, std::string field, std::string detail) {
        out_.push_back({kind, std::move(field), std::move(detail)});
    }

    const SchemaEntry* label(const std::string& name, const std::string& field) {
        const SchemaEntry* entry = schema_.find(name);
        if (entry == nullptr) add(ViolationKind::SchemaMismatch, field, "label '" + name + "' is not in schema");
        return entry;
    }

    void span(const std::string& text, const std::string& field) {
        if (text.empty()) add(ViolationKind::EmptySpan, field, "empty span");
    }

    void check(const GoldLabel& gold) {
        if (!gold_matches_task(gold, task_)) {
            add(ViolationKind::GoldTaskMismatch, "gold", "gold variant does not match task " + std::string(to_string(task_)));
            return;
        }
        std::visit(overloaded{
                       [&](const EntitySet& g) {
                           for (std::size_t i = 0; i < g.items.size(); ++i) {
                               const auto field = "gold.entities[" + std::to_string(i) + "]";
                               label(g.items[i].label, field + ".label");
                               span(g.items[i].span, field + ".span");
                           }
                       },
                       [&](const RelationSet& g) {
                           for (std::size_t i = 0; i < g.items.size(); ++i) {
                               const auto field = "gold.relations[" + std::to_string(i) + "]";
                               label(g.items[i].predicate, field + ".predicate");
                               span(g.items[i].subject, field + ".subject");
                               span(g.items[i].object, field + ".object");
                           }
                       },
                       [&](const SpoSet& g) {
                           for (std::size_t i = 0; i < g.items.size(); ++i) {
                               const auto& t = g.items[i];
                               const auto field = "gold.triples[" + std::to_string(i) + "]";
                               span(t.subject, field + ".subject");
                               span(t.object, field + ".object");
                               const SchemaEntry* entry = label(t.predicate, field + ".predicate");
                               if (entry != nullptr && entry->subject_type && entry->object_type &&
                                   (t.subject_type != *entry->subject_type || t.object_type != *entry->object_type)) {
                                   add(ViolationKind::SpoTypeConstraint, field,
                                       "types (" + t.subject_type + ", " + t.object_type + ") disagree with schema");
                               }
                           }
                       },
                       [&](const EventSet& g) { events(g); },
                       [&](const OpenTuples& g) {
                           const SchemaEntry* entry = schema_.entries.empty() ? nullptr : &schema_.entries.front();
                           for (std::size_t i = 0; i < g.items.size(); ++i) {
                               std::set<std::string> roles;
                               for (std::size_t j = 0; j < g.items[i].size(); ++j) {
                                   const auto& el = g.items[i][j];
                                   const auto field = "gold.tuples[" + std::to_string(i) + "][" + std::to_string(j) + "]";
                                   span(el.text, field + ".text");
                                   if (!roles.insert(el.role).second)
                                       add(ViolationKind::DuplicateRole, field, "role '" + el.role + "' repeated in tuple");
                                   if (entry != nullptr && !entry->roles.empty() && !contains(entry->roles, el.role))
                                       add(ViolationKind::SchemaMismatch, field + ".role", "role '" + el.role + "' is not in schema");
                               }
                           }
                       },
                       [&](const KgEntities& g) {
                           for (std::size_t i = 0; i < g.types.size(); ++i) {
                               const auto field = "gold.kg[" + std::to_string(i) + "]";
                               const SchemaEntry* entry = label(g.types[i].type, field + ".type");
                               for (const auto& entity : g.types[i].entities) {
                                   span(entity.name, field + ".entities.name");
                                   std::set<std::string> attrs;
                                   for (const auto& [attr, value] : entity.attributes) {
                                       if (!attrs.insert(attr).second)
                                           add(ViolationKind::DuplicateRole, field, "attribute '" + attr + "' repeated");
                                       if (entry != nullptr && !entry->roles.empty() && !contains(entry->roles, attr))
                                           add(ViolationKind::SchemaMismatch, field + ".attributes",
                                               "attribute '" + attr + "' is not in schema");
                                   }
                               }
                           }
                       },
                       [&](const ClassLabel& g) {
                           if (!g.label.empty()) label(g.label, "gold.class_label");
                       },
                       [](const auto&) {},
                   },
                   gold);
    }

  private:
    void events(const EventSet& g) {
        for (std::size_t i = 0; i < g.items.size(); ++i) {
            const auto& ev = g.items[i];
            const auto field = "gold.events[" + std::to_string(i) + "]";
            const SchemaEntry* entry = label(ev.event_type, field + ".event_type");
            if (task_ == TaskKind::EEA && ev.trigger) {
                add(ViolationKind::TriggerPlacement, field + ".trigger", "EEA triggers belong in the schema, not in gold");
            }
            if (task_ == TaskKind::EET && !ev.arguments.empty()) {
                add(ViolationKind::ArgumentPlacement, field + ".arguments", "EET gold carries triggers only");
            }
            if (task_ == TaskKind::EET && !ev.trigger) {
                add(ViolationKind::TriggerPlacement, field + ".trigger", "EET mention without trigger");
            }
            if (ev.trigger) span(*ev.trigger, field + ".trigger");
            std::set<std::string> roles;
            for (const auto& [role, value] : ev.arguments) {
                if (!roles.insert(role).second)
                    add(ViolationKind::DuplicateRole, field + ".arguments", "role '" + role + "' repeated");
                if (entry != nullptr && !entry->roles.empty() && !contains(entry->roles, role))
                    add(ViolationKind::SchemaMismatch, field + ".arguments", "role '" + role + "' is not in schema");
                if (const auto* s = std::get_if<std::string>(&value)) span(*s, field + ".arguments." + role);
                if (const auto* list = std::get_if<std::vector<std::string>>(&value)) {
                    for (const auto& s : *list) span(s, field + ".arguments." + role);
                }
            }
        }
    }

    TaskKind task_;
    const TaskSchema& schema_;
    std::vector<Violation>& out_;
};

}  // namespace

std::vector<Violation> validate_gold(const GoldLabel& gold, TaskKind task, const TaskSchema& schema) {
    std::vector<Violation> out;
    Checker(task, schema, out).check(gold);
    return out;
}

std::vector<Violation> validate_sample(const UnifiedSample& sample) {
    std::vector<Violation> out;
    Checker checker(sample.task, sample.schema, out);
    if (sample.id.empty()) checker.add(ViolationKind::EmptyId, "id", "empty id");

    std::set<std::string> names;
    const EntryKind expected = entry_kind_for(sample.task);
    for (std::size_t i = 0; i < sample.schema.entries.size(); ++i) {
        const auto& entry = sample.schema.entries[i];
        const auto field = "schema[" + std::to_string(i) + "]";
        if (!names.insert(entry.name).second)
            checker.add(ViolationKind::DuplicateSchemaName, field, "name '" + entry.name + "' repeated");
        if (sample.task != TaskKind::IG && entry.kind != expected)
            checker.add(ViolationKind::SchemaKindMismatch, field + ".kind",
                        std::string(to_string(entry.kind)) + " used for task " + std::string(to_string(sample.task)));
        if (entry.kind == EntryKind::SpoPattern && (!entry.subject_type || !entry.object_type))
            checker.add(ViolationKind::SpoTypeConstraint, field, "SPO entries need subject_type and object_type");
        if (sample.task != TaskKind::EEA && entry.given_trigger)
            checker.add(ViolationKind::TriggerPlacement, field, "given trigger outside EEA");
    }
    if (sample.task == TaskKind::MRC) {
        if (sample.schema.entries.size() != 1 || !sample.schema.entries.front().question) {
            checker.add(ViolationKind::MrcSchema, "schema", "MRC samples carry exactly one question entry");
        } else if (const auto* answer = std::get_if<Answer>(&sample.gold)) {
            const auto& choices = sample.schema.entries.front().choices;
            if (!choices.empty() && !answer->text.empty() && !contains(choices, answer->text))
                checker.add(ViolationKind::SchemaMismatch, "gold.answer", "answer is not one of the choices");
        }
    }
    checker.check(sample.gold);
    return out;
}

}  // namespace nluforge
