#include "nluforge/corpus.hpp"

#include <fstream>

#include "nluforge/codec.hpp"
#include "nluforge/validate.hpp"

namespace nluforge {

namespace {

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

void read_corpus(const std::filesystem::path& path, const std::function<void(UnifiedSample&&)>& on_sample,
                 const std::function<void(RecordError&&)>& on_error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open corpus " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        ojson record;
        try {
            record = ojson::parse(line);
        } catch (const nlohmann::json::exception& e) {
            on_error({line_no, ErrorCode::MalformedRecord, "", e.what()});
            continue;
        }
        if (record.is_object() && record.contains(kProvenanceKey)) continue;
        UnifiedSample sample;
        try {
            sample = decode_sample(record);
        } catch (const Error& e) {
            on_error({line_no, e.code(), "", e.what()});
            continue;
        }
        bool mismatch = false;
        for (const auto& v : validate_gold(sample.gold, sample.task, sample.schema)) {
            if (v.kind == ViolationKind::SchemaMismatch) {
                on_error({line_no, ErrorCode::SchemaMismatch, sample.id, v.field + ": " + v.detail});
                mismatch = true;
                break;
            }
        }
        if (!mismatch) on_sample(std::move(sample));
    }
    if (in.bad()) throw Error(ErrorCode::Io, "read failure on " + path.string());
}

CorpusLoad load_corpus(const std::filesystem::path& path) {
    CorpusLoad load;
    read_corpus(
        path, [&](UnifiedSample&& s) { load.samples.push_back(std::move(s)); },
        [&](RecordError&& e) { load.errors.push_back(std::move(e)); });
    return load;
}

std::string sample_line(const UnifiedSample& sample) { return dump_compact(encode_sample(sample)); }

std::size_t write_corpus(std::span<const UnifiedSample> samples, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write corpus " + path.string());
    for (const auto& sample : samples) out << sample_line(sample) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failure on " + path.string());
    return samples.size();
}

}  // namespace nluforge
