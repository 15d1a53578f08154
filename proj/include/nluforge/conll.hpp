#pragma once

#include <istream>
#include <string>
#include <vector>

#include "nluforge/sample.hpp"

namespace nluforge {

struct ConllOptions {
    std::string source = "conll";
    std::string language = "en";
    /// Zero-based column holding the token; the tag is always the last column.
    std::size_t token_column = 0;
};

/// NER samples from a CoNLL-style column file: one token per line, blank
/// lines between sentences, "-DOCSTART-" lines ignored. Tags may be BIO,
/// IOB1 or BIOES. Every sample's schema lists all entity types of the file
/// in first-seen order. Ids are "<source>:<6-digit sentence number>".
/// Throws MalformedRecord with the line number.
std::vector<UnifiedSample> read_conll(std::istream& in, const ConllOptions& options);

}  // namespace nluforge
