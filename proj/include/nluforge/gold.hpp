#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nluforge/schema.hpp"
#include "nluforge/task.hpp"

namespace nluforge {

/// Marker for an event argument the annotator declared absent. Serialized as
/// the literal "NAN"; distinct from an empty string and from a missing key.
struct Nan {
    bool operator==(const Nan&) const = default;
};

inline constexpr std::string_view kNanLiteral = "NAN";

struct Entity {
    std::string label;
    std::string span;
    bool operator==(const Entity&) const = default;
};

struct Relation {
    std::string predicate;
    std::string subject;
    std::string object;
    bool operator==(const Relation&) const = default;
};

struct SpoTriple {
    std::string predicate;
    std::string subject;
    std::string subject_type;
    std::string object;
    std::string object_type;
    bool operator==(const SpoTriple&) const = default;
};

using ArgValue = std::variant<std::string, std::vector<std::string>, Nan>;

struct EventMention {
    std::string event_type;
    std::optional<std::string> trigger;
    std::vector<std::pair<std::string, ArgValue>> arguments;
    bool operator==(const EventMention&) const = default;
};

struct OpenElement {
    std::string role;
    std::string text;
    bool operator==(const OpenElement&) const = default;
};

using OpenTuple = std::vector<OpenElement>;

using AttrValue = std::variant<std::string, std::vector<std::string>>;

struct KgEntity {
    std::string name;
    std::vector<std::pair<std::string, AttrValue>> attributes;
    bool operator==(const KgEntity&) const = default;
};

struct KgType {
    std::string type;
    std::vector<KgEntity> entities;
    bool operator==(const KgType&) const = default;
};

struct EntitySet {
    std::vector<Entity> items;
    bool operator==(const EntitySet&) const = default;
};
struct RelationSet {
    std::vector<Relation> items;
    bool operator==(const RelationSet&) const = default;
};
struct SpoSet {
    std::vector<SpoTriple> items;
    bool operator==(const SpoSet&) const = default;
};
struct EventSet {
    std::vector<EventMention> items;
    bool operator==(const EventSet&) const = default;
};
struct OpenTuples {
    std::vector<OpenTuple> items;
    bool operator==(const OpenTuples&) const = default;
};
struct KgEntities {
    std::vector<KgType> types;
    bool operator==(const KgEntities&) const = default;
};
struct Answer {
    std::string text;
    bool operator==(const Answer&) const = default;
};
struct ClassLabel {
    std::string label;
    bool operator==(const ClassLabel&) const = default;
};
struct FreeResponse {
    std::string text;
    bool operator==(const FreeResponse&) const = default;
};

using GoldLabel = std::variant<EntitySet, RelationSet, SpoSet, EventSet, OpenTuples, KgEntities,
                               Answer, ClassLabel, FreeResponse>;

/// True when the variant held by `gold` is the one `task` requires.
bool gold_matches_task(const GoldLabel& gold, TaskKind task);

/// The empty gold of a task (no mentions, empty answer, ...).
GoldLabel empty_gold(TaskKind task);

bool is_empty_gold(const GoldLabel& gold);

/// Every top-level schema name the gold refers to, in first-use order.
std::vector<std::string> referenced_labels(const GoldLabel& gold);

/// Canonical form used by every serializer: items grouped by schema order
/// (stable within a label), event arguments completed with NAN in role order.
GoldLabel canonicalize_gold(const GoldLabel& gold, TaskKind task, const TaskSchema& schema);

/// The part of `gold` that concerns one top-level label.
GoldLabel gold_slice(const GoldLabel& gold, std::string_view label);

/// Replace the items for `label` in `gold` by the items of `replacement`.
GoldLabel replace_label_items(const GoldLabel& gold, std::string_view label,
                              const GoldLabel& replacement);

/// Rename top-level labels (entity types, predicates, event types, KGE types,
/// class labels). Names missing from `renames` are kept.
GoldLabel rename_labels(const GoldLabel& gold, const std::map<std::string, std::string>& renames);

}  // namespace nluforge
