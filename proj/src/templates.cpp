#include "nluforge/templates.hpp"

#include <fstream>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "nluforge/embedded.hpp"
#include "nluforge/error.hpp"
#include "nluforge/formats.hpp"

namespace nluforge {

namespace {

constexpr std::string_view kDirectiveSlot = "{directive}";

[[noreturn]] void bad_pack(const std::string& cause) {
    throw Error(ErrorCode::InvalidConfig, "template pack: " + cause);
}

}  // namespace

std::string InstructionTemplate::instruction(OutputFormat format) const {
    std::string directive;
    if (auto it = directives.find(format); it != directives.end()) {
        directive = it->second;
    } else {
        directive = format_directive(task, format, language);
    }
    std::string out = sentence;
    if (auto pos = out.find(kDirectiveSlot); pos != std::string::npos) {
        out.replace(pos, kDirectiveSlot.size(), directive);
    }
    return out;
}

const TemplatePack& TemplatePack::builtin() {
    static const TemplatePack pack = from_json(ojson::parse(embedded::templates()));
    return pack;
}

TemplatePack TemplatePack::from_json(const ojson& doc) {
    TemplatePack pack;
    if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array())
        bad_pack("expected {\"templates\": [...]}");
    std::set<std::tuple<TaskKind, std::size_t, std::string>> seen;
    for (const auto& item : doc["templates"]) {
        InstructionTemplate t;
        auto task = parse_task(item.value("task", ""));
        if (!task || *task == TaskKind::IG) bad_pack("bad task in " + item.dump());
        t.task = *task;
        t.index = item.value("index", std::size_t{0});
        t.language = item.value("language", "en");
        const auto layout = item.value("layout", "json");
        if (layout == "json") {
            t.layout = PromptLayout::Json;
        } else if (layout == "text") {
            t.layout = PromptLayout::Text;
        } else {
            bad_pack("unknown layout '" + layout + "'");
        }
        t.sentence = item.value("sentence", "");
        if (t.sentence.empty()) bad_pack("empty sentence");
        if (auto d = item.find("directives"); d != item.end()) {
            for (const auto& [name, text] : d->items()) {
                auto format = parse_format(name);
                if (!format) bad_pack("unknown format '" + name + "'");
                t.directives[*format] = text.get<std::string>();
            }
        }
        if (auto of = item.find("output_format"); of != item.end()) t.output_format = *of;
        if (auto s = item.find("examples_suffix"); s != item.end()) t.examples_suffix = s->get<std::string>();
        if (!seen.emplace(t.task, t.index, t.language).second) bad_pack("duplicate template " + item.dump());
        pack.templates_.push_back(std::move(t));
    }
    // Indices must be dense per (task, language) so that a drawn index is valid.
    for (const auto& t : pack.templates_) {
        for (std::size_t i = 0; i < t.index; ++i) {
            if (!seen.count({t.task, i, t.language})) bad_pack("index gap for " + std::string(to_string(t.task)));
        }
    }
    return pack;
}

TemplatePack TemplatePack::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    try {
        return from_json(ojson::parse(in));
    } catch (const nlohmann::json::exception& e) {
        bad_pack(e.what());
    }
}

std::string_view TemplatePack::resolve_language(TaskKind task, std::string_view language) const {
    for (const auto& t : templates_)
        if (t.task == task && t.language == language) return language;
    if (language != "en") {
        static std::mutex mu;
        static std::set<std::pair<TaskKind, std::string>> warned;
        std::lock_guard lock(mu);
        if (warned.emplace(task, std::string(language)).second) {
            spdlog::warn("no {} templates for language '{}', using en", to_string(task), language);
        }
    }
    return "en";
}

std::size_t TemplatePack::count(TaskKind task, std::string_view language) const {
    const auto lang = resolve_language(task, language);
    std::size_t n = 0;
    for (const auto& t : templates_)
        if (t.task == task && t.language == lang) ++n;
    return n;
}

const InstructionTemplate& TemplatePack::get(TemplateId id, std::string_view language) const {
    const auto lang = resolve_language(id.task, language);
    for (const auto& t : templates_)
        if (t.task == id.task && t.index == id.index && t.language == lang) return t;
    throw Error(ErrorCode::TemplateTaskMismatch,
                "no template " + std::to_string(id.index) + " for " + std::string(to_string(id.task)));
}

}  // namespace nluforge
