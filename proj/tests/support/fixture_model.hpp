#pragma once

#include <string>

#include "nluforge/sample.hpp"

namespace nftest {

/// Degree-question input text and a model reply for it.
extern const std::string kDegreeText;
extern const std::string kDegreeResponse;

/// The degree sample: three degree mentions, id "fig3".
nluforge::UnifiedSample degree_sample();

/// Deterministic stand-in for the chat model used to record the committed
/// fixture cache. Rule prompts get a keep-the-first-item proposal (every
/// fifth one first omits New Label so the corrected retry is exercised);
/// description prompts get a templated sentence; the degree prompt gets the
/// degree reply.
std::string fixture_reply(const std::string& prompt);

}  // namespace nftest
