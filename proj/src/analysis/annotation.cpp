#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "electwit/actions.hpp"
#include "electwit/analysis.hpp"
#include "electwit/providers.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kCacheVersion = 1;

std::string cache_path(const AnnotationOptions& options, const Message& m) {
    return (fs::path(options.cache_dir) /
            fmt::format("{}-{}-{}.json", m.id.str(), text::hex64(text::fnv1a64(m.text)),
                        text::hex64(text::fnv1a64(options.annotator))))
        .string();
}

std::optional<std::vector<std::string>> read_cache(const std::string& path, const Message& m,
                                                   const ModelId& annotator) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    // Entries that do not match exactly are treated as misses and rewritten.
    if (j.is_discarded() || !j.is_object() || j.value("version", 0) != kCacheVersion ||
        j.value("message", "") != m.id.str() || j.value("annotator", "") != annotator ||
        j.value("text", "") != m.text || !j.contains("labels") || !j.at("labels").is_array()) {
        return std::nullopt;
    }
    std::vector<std::string> labels;
    for (const auto& l : j.at("labels")) {
        if (!l.is_string()) return std::nullopt;
        labels.push_back(l.get<std::string>());
    }
    return labels;
}

void write_cache(const std::string& path, const Message& m, const ModelId& annotator,
                 const std::vector<std::string>& labels) {
    json j{{"version", kCacheVersion},
           {"message", m.id.str()},
           {"annotator", annotator},
           {"text", m.text},
           {"labels", labels}};
    write_text_atomic(path, canonical_dump(j));
}

struct Outcome {
    std::optional<std::vector<std::string>> labels;
    std::vector<std::string> warnings;
    bool called = false;
};

}  // namespace

std::vector<Message> collect_messages(const RunLog& log) {
    std::vector<Message> out;
    for (const auto& r : log.records) {
        const auto* a = r.as<ActionRecord>();
        if (a == nullptr || !a->accepted || a->stage != ActionStage::Apply || !a->item) continue;
        if (a->action != ActionKind::Post && a->action != ActionKind::Reply) continue;
        out.push_back(Message{*a->item, a->agent, r.time, a->text.value_or("")});
    }
    return out;
}

CompletionRequest build_annotation_prompt(const TechniqueTaxonomy& taxonomy, const Message& message,
                                          const ModelId& annotator) {
    std::string sys =
        "You annotate social media messages from a simulated election for persuasion techniques. "
        "A message may use zero or more techniques. Use only the labels listed below, spelled exactly "
        "as written.\n\n## Techniques\n";
    for (std::size_t i = 0; i < taxonomy.labels.size(); ++i) {
        sys += fmt::format("- {}: {}\n", taxonomy.labels[i],
                           i < taxonomy.descriptions.size() ? taxonomy.descriptions[i] : "");
    }
    sys += "\n## Output\nRespond with a JSON array of label strings and nothing else, for example "
           "[\"Appeal to Logic\"]. Respond with [] when no technique applies.";

    std::string user = fmt::format("## Message [{}]\n{}\n", message.id.str(), text::escape_line(message.text));

    CompletionRequest req;
    req.model = annotator;
    req.system_prompt = std::move(sys);
    req.user_prompt = std::move(user);
    req.max_tokens = kShortMaxTokens;
    req.tag = RequestTag{message.author, message.time, CallPurpose::Annotate, message.id.str()};
    return req;
}

std::optional<std::vector<std::string>> parse_annotation_labels(std::string_view raw,
                                                                std::vector<std::string>& warnings) {
    const auto arr = find_first_json(raw, '[');
    if (!arr) return std::nullopt;
    const json j = json::parse(*arr);
    std::vector<std::string> labels;
    for (const auto& e : j) {
        if (e.is_string()) {
            labels.push_back(e.get<std::string>());
        } else {
            warnings.push_back(fmt::format("ignored non-string label {}", e.dump()));
        }
    }
    return labels;
}

AnnotationResult annotate_messages(const RunLog& log, const TechniqueTaxonomy& taxonomy, CompletionProvider& annotator,
                                   const AnnotationOptions& options) {
    taxonomy.validate();
    if (!is_valid_model_id(options.annotator)) {
        throw ProviderConfigError(fmt::format("annotator '{}' is not a vendor/model id", options.annotator));
    }
    for (const auto& p : log.population) {
        if (p.model == options.annotator) {
            throw ProviderConfigError(
                fmt::format("annotator '{}' is also assigned to agent {}; use an independent model", options.annotator,
                            p.id.str()));
        }
    }
    const bool caching = !options.cache_dir.empty();
    if (caching) {
        std::error_code ec;
        fs::create_directories(options.cache_dir, ec);
        if (ec) throw PersistenceError(fmt::format("cannot create cache dir '{}': {}", options.cache_dir, ec.message()));
    }

    const auto messages = collect_messages(log);
    AnnotationResult result;
    std::vector<Outcome> outcomes(messages.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (caching) {
            outcomes[i].labels = read_cache(cache_path(options, messages[i]), messages[i], options.annotator);
        }
        if (outcomes[i].labels) {
            ++result.cache_hits;
        } else {
            pending.push_back(i);
        }
    }

    auto annotate_one = [&](std::size_t i) {
        Outcome o;
        o.called = true;
        auto req = build_annotation_prompt(taxonomy, messages[i], options.annotator);
        req.temperature = options.temperature;
        try {
            const auto c = annotator.complete(req);
            o.labels = parse_annotation_labels(c.text, o.warnings);
            if (!o.labels) o.warnings.push_back("response contains no JSON array");
        } catch (const ProviderError& e) {
            o.warnings.push_back(fmt::format("provider failure: {}", e.what()));
        }
        return o;
    };

    const auto width = static_cast<std::size_t>(std::max(1, options.parallel));
    for (std::size_t start = 0; start < pending.size(); start += width) {
        const auto end = std::min(pending.size(), start + width);
        if (width == 1) {
            outcomes[pending[start]] = annotate_one(pending[start]);
        } else {
            std::vector<std::future<Outcome>> batch;
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(std::async(std::launch::async, annotate_one, pending[k]));
            }
            for (std::size_t k = start; k < end; ++k) outcomes[pending[k]] = batch[k - start].get();
        }
        // Cache writes stay on this thread.
        for (std::size_t k = start; k < end; ++k) {
            const auto i = pending[k];
            ++result.provider_calls;
            if (caching && outcomes[i].labels) {
                write_cache(cache_path(options, messages[i]), messages[i], options.annotator, *outcomes[i].labels);
            }
        }
    }

    std::set<PersuasionTag> tags;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& m = messages[i];
        for (const auto& w : outcomes[i].warnings) result.warnings.push_back(fmt::format("[{}] {}", m.id.str(), w));
        if (!outcomes[i].labels) {
            result.unannotated.push_back(m.id);
            continue;
        }
        for (const auto& label : *outcomes[i].labels) {
            if (!taxonomy.contains(label)) {
                result.warnings.push_back(fmt::format("[{}] dropped unknown label '{}'", m.id.str(), label));
                continue;
            }
            tags.insert(PersuasionTag{m.id, label, options.annotator});
        }
    }
    result.tags.assign(tags.begin(), tags.end());
    return result;
}

json to_json(const TagFile& f) {
    json tags = json::array();
    for (const auto& t : f.tags) tags.push_back({{"message", t.message.str()}, {"technique", t.technique}});
    json unannotated = json::array();
    for (const auto& id : f.unannotated) unannotated.push_back(id.str());
    return json{{"annotator", f.annotator}, {"labels", f.labels}, {"tags", tags}, {"unannotated", unannotated}};
}

TagFile tag_file_from_json(const json& j) {
    auto bad = [](const std::string& why) { return AnalysisError("malformed tag file: " + why); };
    if (!j.is_object()) throw bad("expected an object");
    TagFile f;
    try {
        f.annotator = j.at("annotator").get<std::string>();
        f.labels = j.at("labels").get<std::vector<std::string>>();
        for (const auto& t : j.at("tags")) {
            const auto id = ItemId::parse(t.at("message").get<std::string>());
            if (!id) throw bad(fmt::format("bad message id in {}", t.dump()));
            f.tags.push_back(PersuasionTag{*id, t.at("technique").get<std::string>(), f.annotator});
        }
        for (const auto& u : j.at("unannotated")) {
            const auto id = ItemId::parse(u.get<std::string>());
            if (!id) throw bad(fmt::format("bad unannotated id {}", u.dump()));
            f.unannotated.push_back(*id);
        }
    } catch (const json::exception& e) {
        throw bad(e.what());
    }
    return f;
}

void write_tag_file(const TagFile& f, const std::string& path) { write_text_atomic(path, canonical_dump(to_json(f))); }

TagFile load_tag_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AnalysisError(fmt::format("cannot open tag file '{}'", path));
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw AnalysisError(fmt::format("tag file '{}' is not valid JSON", path));
    return tag_file_from_json(j);
}

}  // namespace electwit
