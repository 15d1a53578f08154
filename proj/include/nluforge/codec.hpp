#pragma once

#include <nlohmann/json.hpp>

#include "nluforge/gold.hpp"
#include "nluforge/sample.hpp"
#include "nluforge/schema.hpp"

namespace nluforge {

using ojson = nlohmann::ordered_json;

/// Compact, insertion-ordered, UTF-8 verbatim serialization used for every
/// byte-stable artifact.
std::string dump_compact(const ojson& value);

// Canonical corpus encoding. Decoders throw Error(MalformedRecord) on shape
// problems.
ojson encode_schema(const TaskSchema& schema);
TaskSchema decode_schema(const ojson& value);

ojson encode_gold(const GoldLabel& gold);
GoldLabel decode_gold(const ojson& value);

ojson encode_sample(const UnifiedSample& sample);
UnifiedSample decode_sample(const ojson& value);

}  // namespace nluforge
