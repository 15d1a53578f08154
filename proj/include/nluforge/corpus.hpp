#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nluforge/error.hpp"
#include "nluforge/sample.hpp"

namespace nluforge {

/// A line that could not become a sample. Reading continues past it.
struct RecordError {
    std::size_t line_no = 0;  // 1-based
    ErrorCode code = ErrorCode::MalformedRecord;
    std::string id;           // set for SchemaMismatch
    std::string cause;
};

/// Streams a canonical corpus file in file order. Lines that carry the
/// provenance header key are skipped. Throws Error(Io) when the file cannot
/// be opened.
void read_corpus(const std::filesystem::path& path,
                 const std::function<void(UnifiedSample&&)>& on_sample,
                 const std::function<void(RecordError&&)>& on_error);

struct CorpusLoad {
    std::vector<UnifiedSample> samples;
    std::vector<RecordError> errors;
};

CorpusLoad load_corpus(const std::filesystem::path& path);

/// Writes one JSON object per line (LF). Returns the number of samples written.
std::size_t write_corpus(std::span<const UnifiedSample> samples, const std::filesystem::path& path);

/// The line written for a sample, without terminator.
std::string sample_line(const UnifiedSample& sample);

/// Key of the optional first-line provenance header on every CLI output.
inline constexpr const char* kProvenanceKey = "__provenance__";

}  // namespace nluforge
