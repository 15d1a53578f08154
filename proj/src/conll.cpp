#include "nluforge/conll.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "nluforge/error.hpp"

namespace nluforge {

namespace {

struct Token {
    std::string text;
    std::string tag;
    std::size_t line_no = 0;
};

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string field;
    while (in >> field) out.push_back(field);
    return out;
}

std::string make_id(const std::string& source, std::size_t n) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%06zu", n);
    return source + ":" + buf;
}

// Entities of one sentence; types appended to `types` in first-seen order.
std::vector<Entity> decode_tags(const std::vector<Token>& tokens, std::vector<std::string>& types) {
    std::vector<Entity> out;
    std::string label;
    std::string span;
    auto close = [&] {
        if (!label.empty()) out.push_back({label, span});
        label.clear();
        span.clear();
    };
    for (const auto& t : tokens) {
        if (t.tag == "O") {
            close();
            continue;
        }
        if (t.tag.size() < 3 || t.tag[1] != '-' || std::string("BIES").find(t.tag[0]) == std::string::npos)
            throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(t.line_no) + ": bad tag \"" + t.tag + "\"");
        const char prefix = t.tag[0];
        const std::string type = t.tag.substr(2);
        if (std::find(types.begin(), types.end(), type) == types.end()) types.push_back(type);
        // I- continues only a span of the same type (IOB1 starts spans with I-).
        const bool starts = prefix == 'B' || prefix == 'S' || label != type;
        if (starts) {
            close();
            label = type;
            span = t.text;
        } else {
            span += " " + t.text;
        }
        if (prefix == 'E' || prefix == 'S') close();
    }
    close();
    return out;
}

}  // namespace

std::vector<UnifiedSample> read_conll(std::istream& in, const ConllOptions& options) {
    std::vector<std::vector<Token>> sentences;
    std::vector<Token> current;
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&] {
        if (!current.empty()) sentences.push_back(std::move(current));
        current.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_ws(line);
        if (fields.empty()) {
            flush();
            continue;
        }
        if (fields.front() == "-DOCSTART-") {
            flush();
            continue;
        }
        if (fields.size() < 2 || options.token_column >= fields.size() - 1)
            throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": expected token and tag columns");
        current.push_back({fields[options.token_column], fields.back(), line_no});
    }
    flush();

    std::vector<std::string> types;
    std::vector<std::vector<Entity>> golds;
    for (const auto& s : sentences) golds.push_back(decode_tags(s, types));

    TaskSchema schema;
    for (const auto& t : types) {
        SchemaEntry e;
        e.name = t;
        e.kind = EntryKind::EntityType;
        schema.entries.push_back(std::move(e));
    }

    std::vector<UnifiedSample> out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        UnifiedSample s;
        s.id = make_id(options.source, i + 1);
        s.task = TaskKind::NER;
        for (const auto& t : sentences[i]) {
            if (!s.text.empty()) s.text += ' ';
            s.text += t.text;
        }
        s.schema = schema;
        s.gold = EntitySet{std::move(golds[i])};
        s.source = options.source;
        s.language = options.language;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nluforge
