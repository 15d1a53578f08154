#pragma once

#include <optional>
#include <string>

#include "nluforge/gold.hpp"
#include "nluforge/schema.hpp"
#include "nluforge/task.hpp"

namespace nluforge {

/// Where a rule-derived sample came from.
struct SampleOrigin {
    std::string rule_id;
    GoldLabel original_gold;
    bool operator==(const SampleOrigin&) const = default;
};

/// One labeled example, independent of how it will be rendered.
struct UnifiedSample {
    std::string id;
    TaskKind task = TaskKind::NER;
    std::string text;
    TaskSchema schema;
    GoldLabel gold;
    std::string source;
    std::string language = "en";
    std::optional<SampleOrigin> origin;

    bool operator==(const UnifiedSample&) const = default;
};

}  // namespace nluforge
