#include "nluforge/gold.hpp"

#include "nluforge/detail/overloaded.hpp"

#include <algorithm>
#include <set>

namespace nluforge {

namespace {

using detail::overloaded;

template <typename Item, typename KeyFn>
void stable_group(std::vector<Item>& items, const TaskSchema& schema, KeyFn key) {
    std::stable_sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        return schema.position(key(a)) < schema.position(key(b));
    });
}

template <typename Item, typename KeyFn>
void erase_label(std::vector<Item>& items, std::string_view label, KeyFn key, std::size_t& first) {
    first = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (key(items[i]) == label) {
            first = i;
            break;
        }
    }
    std::erase_if(items, [&](const Item& item) { return key(item) == label; });
    first = std::min(first, items.size());
}

template <typename Item, typename KeyFn>
void splice_label(std::vector<Item>& items, std::string_view label, const std::vector<Item>& repl,
                  KeyFn key) {
    std::size_t first = 0;
    erase_label(items, label, key, first);
    std::vector<Item> incoming;
    for (const auto& item : repl) {
        if (key(item) == label) incoming.push_back(item);
    }
    items.insert(items.begin() + static_cast<std::ptrdiff_t>(first), incoming.begin(), incoming.end());
}

}  // namespace

bool gold_matches_task(const GoldLabel& gold, TaskKind task) {
    switch (task) {
        case TaskKind::NER: return std::holds_alternative<EntitySet>(gold);
        case TaskKind::RE: return std::holds_alternative<RelationSet>(gold);
        case TaskKind::SPO: return std::holds_alternative<SpoSet>(gold);
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: return std::holds_alternative<EventSet>(gold);
        case TaskKind::OPENIE: return std::holds_alternative<OpenTuples>(gold);
        case TaskKind::KGE: return std::holds_alternative<KgEntities>(gold);
        case TaskKind::MRC: return std::holds_alternative<Answer>(gold);
        case TaskKind::TC: return std::holds_alternative<ClassLabel>(gold);
        case TaskKind::IG: return std::holds_alternative<FreeResponse>(gold);
    }
    return false;
}

GoldLabel empty_gold(TaskKind task) {
    switch (task) {
        case TaskKind::NER: return EntitySet{};
        case TaskKind::RE: return RelationSet{};
        case TaskKind::SPO: return SpoSet{};
        case TaskKind::EE:
        case TaskKind::EET:
        case TaskKind::EEA: return EventSet{};
        case TaskKind::OPENIE: return OpenTuples{};
        case TaskKind::KGE: return KgEntities{};
        case TaskKind::MRC: return Answer{};
        case TaskKind::TC: return ClassLabel{};
        case TaskKind::IG: return FreeResponse{};
    }
    return EntitySet{};
}

bool is_empty_gold(const GoldLabel& gold) {
    return std::visit(overloaded{
                          [](const EntitySet& g) { return g.items.empty(); },
                          [](const RelationSet& g) { return g.items.empty(); },
                          [](const SpoSet& g) { return g.items.empty(); },
                          [](const EventSet& g) { return g.items.empty(); },
                          [](const OpenTuples& g) { return g.items.empty(); },
                          [](const KgEntities& g) { return g.types.empty(); },
                          [](const Answer& g) { return g.text.empty(); },
                          [](const ClassLabel& g) { return g.label.empty(); },
                          [](const FreeResponse& g) { return g.text.empty(); },
                      },
                      gold);
}

std::vector<std::string> referenced_labels(const GoldLabel& gold) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto add = [&](const std::string& name) {
        if (seen.insert(name).second) out.push_back(name);
    };
    std::visit(overloaded{
                   [&](const EntitySet& g) {
                       for (const auto& e : g.items) add(e.label);
                   },
                   [&](const RelationSet& g) {
                       for (const auto& r : g.items) add(r.predicate);
                   },
                   [&](const SpoSet& g) {
                       for (const auto& t : g.items) add(t.predicate);
                   },
                   [&](const EventSet& g) {
                       for (const auto& e : g.items) add(e.event_type);
                   },
                   [&](const KgEntities& g) {
                       for (const auto& t : g.types) add(t.type);
                   },
                   [&](const ClassLabel& g) {
                       if (!g.label.empty()) add(g.label);
                   },
                   [](const auto&) {},
               },
               gold);
    return out;
}

GoldLabel canonicalize_gold(const GoldLabel& gold, TaskKind task, const TaskSchema& schema) {
    GoldLabel out = gold;
    std::visit(overloaded{
                   [&](EntitySet& g) { stable_group(g.items, schema, [](const Entity& e) { return e.label; }); },
                   [&](RelationSet& g) {
                       stable_group(g.items, schema, [](const Relation& r) { return r.predicate; });
                   },
                   [&](SpoSet& g) { stable_group(g.items, schema, [](const SpoTriple& t) { return t.predicate; }); },
                   [&](EventSet& g) {
                       stable_group(g.items, schema, [](const EventMention& e) { return e.event_type; });
                       if (task == TaskKind::EET) return;
                       for (auto& mention : g.items) {
                           const SchemaEntry* entry = schema.find(mention.event_type);
                           if (entry == nullptr || entry->roles.empty()) continue;
                           std::vector<std::pair<std::string, ArgValue>> ordered;
                           for (const auto& role : entry->roles) {
                               auto it = std::find_if(mention.arguments.begin(), mention.arguments.end(),
                                                      [&](const auto& kv) { return kv.first == role; });
                               ordered.emplace_back(role, it == mention.arguments.end() ? ArgValue{Nan{}} : it->second);
                           }
                           for (const auto& kv : mention.arguments) {
                               if (std::find(entry->roles.begin(), entry->roles.end(), kv.first) == entry->roles.end()) {
                                   ordered.push_back(kv);
                               }
                           }
                           mention.arguments = std::move(ordered);
                       }
                   },
                   [&](KgEntities& g) {
                       std::vector<KgType> merged;
                       for (auto& type : g.types) {
                           auto it = std::find_if(merged.begin(), merged.end(),
                                                  [&](const KgType& t) { return t.type == type.type; });
                           if (it == merged.end()) {
                               merged.push_back(KgType{type.type, {}});
                               it = std::prev(merged.end());
                           }
                           for (auto& entity : type.entities) {
                               auto et = std::find_if(it->entities.begin(), it->entities.end(),
                                                      [&](const KgEntity& e) { return e.name == entity.name; });
                               if (et == it->entities.end()) {
                                   it->entities.push_back(entity);
                               } else {
                                   et->attributes.insert(et->attributes.end(), entity.attributes.begin(),
                                                         entity.attributes.end());
                               }
                           }
                       }
                       stable_group(merged, schema, [](const KgType& t) { return t.type; });
                       g.types = std::move(merged);
                   },
                   [](auto&) {},
               },
               out);
    return out;
}

GoldLabel gold_slice(const GoldLabel& gold, std::string_view label) {
    GoldLabel out = gold;
    std::visit(overloaded{
                   [&](EntitySet& g) { std::erase_if(g.items, [&](const Entity& e) { return e.label != label; }); },
                   [&](RelationSet& g) {
                       std::erase_if(g.items, [&](const Relation& r) { return r.predicate != label; });
                   },
                   [&](SpoSet& g) { std::erase_if(g.items, [&](const SpoTriple& t) { return t.predicate != label; }); },
                   [&](EventSet& g) {
                       std::erase_if(g.items, [&](const EventMention& e) { return e.event_type != label; });
                   },
                   [&](KgEntities& g) { std::erase_if(g.types, [&](const KgType& t) { return t.type != label; }); },
                   [](auto&) {},
               },
               out);
    return out;
}

GoldLabel replace_label_items(const GoldLabel& gold, std::string_view label, const GoldLabel& replacement) {
    GoldLabel out = gold;
    std::visit(overloaded{
                   [&](EntitySet& g) {
                       if (const auto* r = std::get_if<EntitySet>(&replacement))
                           splice_label(g.items, label, r->items, [](const Entity& e) { return e.label; });
                   },
                   [&](RelationSet& g) {
                       if (const auto* r = std::get_if<RelationSet>(&replacement))
                           splice_label(g.items, label, r->items, [](const Relation& x) { return x.predicate; });
                   },
                   [&](SpoSet& g) {
                       if (const auto* r = std::get_if<SpoSet>(&replacement))
                           splice_label(g.items, label, r->items, [](const SpoTriple& x) { return x.predicate; });
                   },
                   [&](EventSet& g) {
                       if (const auto* r = std::get_if<EventSet>(&replacement))
                           splice_label(g.items, label, r->items, [](const EventMention& x) { return x.event_type; });
                   },
                   [&](KgEntities& g) {
                       if (const auto* r = std::get_if<KgEntities>(&replacement))
                           splice_label(g.types, label, r->types, [](const KgType& x) { return x.type; });
                   },
                   [&](auto& g) {
                       using T = std::decay_t<decltype(g)>;
                       if (const auto* r = std::get_if<T>(&replacement)) g = *r;
                   },
               },
               out);
    return out;
}

GoldLabel rename_labels(const GoldLabel& gold, const std::map<std::string, std::string>& renames) {
    if (renames.empty()) return gold;
    auto apply = [&](std::string& name) {
        if (auto it = renames.find(name); it != renames.end()) name = it->second;
    };
    GoldLabel out = gold;
    std::visit(overloaded{
                   [&](EntitySet& g) {
                       for (auto& e : g.items) apply(e.label);
                   },
                   [&](RelationSet& g) {
                       for (auto& r : g.items) apply(r.predicate);
                   },
                   [&](SpoSet& g) {
                       for (auto& t : g.items) apply(t.predicate);
                   },
                   [&](EventSet& g) {
                       for (auto& e : g.items) apply(e.event_type);
                   },
                   [&](KgEntities& g) {
                       for (auto& t : g.types) apply(t.type);
                   },
                   [&](ClassLabel& g) {
                       if (!g.label.empty()) apply(g.label);
                   },
                   [](auto&) {},
               },
               out);
    return out;
}

}  // namespace nluforge
