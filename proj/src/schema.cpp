#include "nluforge/schema.hpp"

#include <array>

namespace nluforge {

namespace {
constexpr std::array<EntryKind, 7> kAllKinds = {EntryKind::EntityType, EntryKind::Relation,
                                                EntryKind::SpoPattern, EntryKind::EventType,
                                                EntryKind::ClassLabel, EntryKind::MrcQuestion,
                                                EntryKind::AttributeSet};
}

std::string_view to_string(EntryKind kind) {
    switch (kind) {
        case EntryKind::EntityType: return "entity_type";
        case EntryKind::Relation: return "relation";
        case EntryKind::SpoPattern: return "spo_pattern";
        case EntryKind::EventType: return "event_type";
        case EntryKind::ClassLabel: return "class_label";
        case EntryKind::MrcQuestion: return "mrc_question";
        case EntryKind::AttributeSet: return "attribute_set";
    }
    return "?";
}

std::optional<EntryKind> parse_entry_kind(std::string_view text) {
    for (EntryKind kind : kAllKinds) {
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

EntryKind entry_kind_for(TaskKind task) {
    switch (task) {
        case TaskKind::NER: return EntryKind::EntityType;
        case TaskKind::RE: return EntryKind::Relation;
        case TaskKind::SPO: return EntryKind::SpoPattern;
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: return EntryKind::EventType;
        case TaskKind::TC: return EntryKind::ClassLabel;
        case TaskKind::MRC: return EntryKind::MrcQuestion;
        case TaskKind::OPENIE:
        case TaskKind::KGE:
        case TaskKind::IG: return EntryKind::AttributeSet;
    }
    return EntryKind::EntityType;
}

const SchemaEntry* TaskSchema::find(std::string_view name) const {
    for (const auto& entry : entries) {
        if (entry.name == name) return &entry;
    }
    return nullptr;
}

SchemaEntry* TaskSchema::find(std::string_view name) {
    for (auto& entry : entries) {
        if (entry.name == name) return &entry;
    }
    return nullptr;
}

std::size_t TaskSchema::position(std::string_view name) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].name == name) return i;
    }
    return entries.size();
}

std::vector<std::string> TaskSchema::names() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& entry : entries) out.push_back(entry.name);
    return out;
}

TaskSchema TaskSchema::slice(std::string_view name) const {
    TaskSchema out;
    if (const auto* entry = find(name)) out.entries.push_back(*entry);
    return out;
}

}  // namespace nluforge
