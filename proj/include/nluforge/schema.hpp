#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nluforge/task.hpp"

namespace nluforge {

enum class EntryKind { EntityType, Relation, SpoPattern, EventType, ClassLabel, MrcQuestion, AttributeSet };

std::string_view to_string(EntryKind kind);
std::optional<EntryKind> parse_entry_kind(std::string_view text);

/// The schema entry kind every sample of `task` must use.
EntryKind entry_kind_for(TaskKind task);

struct SchemaEntry {
    std::string name;
    EntryKind kind = EntryKind::EntityType;
    std::optional<std::string> description;

    // SPO type constraints.
    std::optional<std::string> subject_type;
    std::optional<std::string> object_type;

    // Event argument roles, KGE attributes, or OpenIE element roles.
    std::vector<std::string> roles;
    // Event types: trigger extraction requested (EE/EET).
    bool trigger = false;
    // EEA: the trigger word supplied to the model.
    std::optional<std::string> given_trigger;

    // MRC: the question and optional closed answer set.
    std::optional<std::string> question;
    std::vector<std::string> choices;

    // Preference rule attached to this entry by rule synthesis.
    std::optional<std::string> rule;

    bool operator==(const SchemaEntry&) const = default;
};

struct TaskSchema {
    std::vector<SchemaEntry> entries;

    const SchemaEntry* find(std::string_view name) const;
    SchemaEntry* find(std::string_view name);
    /// Position of `name` in schema order, or entries.size() when absent.
    std::size_t position(std::string_view name) const;
    std::vector<std::string> names() const;
    bool empty() const { return entries.empty(); }
    /// A schema holding only the named entry.
    TaskSchema slice(std::string_view name) const;

    bool operator==(const TaskSchema&) const = default;
};

}  // namespace nluforge
