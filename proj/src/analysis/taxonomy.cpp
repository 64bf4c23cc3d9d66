#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "electwit/analysis.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

using json = nlohmann::json;

struct DefaultTechnique {
    const char* label;
    const char* description;
};

// The first eight are the named techniques; the rest are reconstructions.
constexpr DefaultTechnique kDefaults[] = {
    {"Appeal to Credibility", "Invokes expertise, authority, experience or trustworthiness to support a claim."},
    {"Appeal to Emotion", "Aims to evoke feelings such as hope, anger, pride or sympathy rather than argue."},
    {"Appeal to Logic", "Supports a position with reasoning, evidence, statistics or cause and effect."},
    {"Vagueness", "Uses ambiguous or noncommittal language that avoids concrete positions or details."},
    {"Distraction", "Shifts attention away from the topic under discussion to a different subject."},
    {"Information Overload", "Presents an excessive volume of claims or details to overwhelm scrutiny."},
    {"Self-Deprecation", "Downplays one's own standing or abilities to appear relatable or sincere."},
    {"Humor", "Uses jokes, irony or wit to make a point or disarm opposition."},
    {"Bandwagon Appeal", "Claims that many people already hold a view or support a candidate."},
    {"Flattery", "Praises the audience to win agreement or goodwill."},
    {"Fear Mongering", "Exaggerates threats or dangers to push the audience toward a position."},
    {"Gaslighting", "Makes the audience doubt their own memory, perception or judgment."},
    {"Scapegoating", "Blames a person or group for a problem without adequate justification."},
    {"Whataboutism", "Deflects criticism by pointing to an opponent's alleged wrongdoing."},
    {"Straw Man", "Misrepresents an opposing argument to make it easier to attack."},
    {"Ad Hominem", "Attacks the character or motives of a person instead of their argument."},
    {"False Dilemma", "Presents only two options when more exist."},
    {"Loaded Question", "Asks a question containing an unjustified or controversial assumption."},
    {"Repetition", "Restates a message or slogan repeatedly to increase its acceptance."},
    {"Minimization", "Downplays the significance of a problem, mistake or accusation."},
    {"Exaggeration", "Overstates facts, achievements or consequences beyond what is supported."},
    {"Denial", "Flatly rejects an accusation or fact without engaging its substance."},
    {"Feigning Ignorance", "Pretends not to know or understand something to avoid accountability."},
    {"Shifting the Burden of Proof", "Demands that others disprove a claim instead of supporting it."},
    {"Appeal to Relationship", "Leverages familiarity, shared identity or personal ties to persuade."},
};

static_assert(std::size(kDefaults) == kTaxonomySize);

bool is_named(std::string_view label) {
    return std::find(kNamedTechniques.begin(), kNamedTechniques.end(), label) != kNamedTechniques.end();
}

}  // namespace

void TechniqueTaxonomy::validate() const {
    if (labels.size() != kTaxonomySize) {
        throw AnalysisError(fmt::format("taxonomy must have exactly {} labels, has {}", kTaxonomySize, labels.size()));
    }
    if (descriptions.size() != labels.size() || reconstructed.size() != labels.size()) {
        throw AnalysisError("taxonomy labels, descriptions and reconstruction marks differ in length");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (text::is_blank(labels[i])) throw AnalysisError(fmt::format("taxonomy label {} is blank", i));
        if (labels[i] != text::trim(labels[i]) || labels[i].find_first_of("\n\r:") != std::string::npos) {
            throw AnalysisError(fmt::format("taxonomy label '{}' has surrounding space, ':' or a line break", labels[i]));
        }
        if (!seen.insert(labels[i]).second) throw AnalysisError(fmt::format("duplicate taxonomy label '{}'", labels[i]));
        if (descriptions[i].find_first_of("\n\r") != std::string::npos) {
            throw AnalysisError(fmt::format("description of '{}' spans several lines", labels[i]));
        }
    }
    for (const auto& named : kNamedTechniques) {
        if (!seen.contains(std::string(named))) throw AnalysisError(fmt::format("taxonomy lacks '{}'", named));
    }
}

bool TechniqueTaxonomy::contains(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

TechniqueTaxonomy default_taxonomy() {
    TechniqueTaxonomy t;
    for (const auto& d : kDefaults) {
        t.labels.emplace_back(d.label);
        t.descriptions.emplace_back(d.description);
        t.reconstructed.push_back(!is_named(d.label));
    }
    return t;
}

std::string default_taxonomy_file() { return std::string(ELECTWIT_RESOURCE_DIR) + "/taxonomy.json"; }

json to_json(const TechniqueTaxonomy& t) {
    json techniques = json::array();
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        techniques.push_back({{"label", t.labels[i]},
                              {"description", i < t.descriptions.size() ? t.descriptions[i] : ""},
                              {"reconstructed", i < t.reconstructed.size() && t.reconstructed[i]}});
    }
    return json{{"techniques", std::move(techniques)}};
}

TechniqueTaxonomy taxonomy_from_json(const json& j) {
    if (!j.is_object() || !j.contains("techniques") || !j.at("techniques").is_array()) {
        throw AnalysisError("taxonomy must be an object with a 'techniques' array");
    }
    TechniqueTaxonomy t;
    for (const auto& e : j.at("techniques")) {
        if (!e.is_object() || !e.contains("label") || !e.at("label").is_string()) {
            throw AnalysisError(fmt::format("taxonomy entry {} has no string 'label'", e.dump()));
        }
        t.labels.push_back(e.at("label").get<std::string>());
        const auto d = e.value("description", json(""));
        t.descriptions.push_back(d.is_string() ? d.get<std::string>() : std::string());
        const auto r = e.value("reconstructed", json(false));
        t.reconstructed.push_back(r.is_boolean() && r.get<bool>());
    }
    t.validate();
    return t;
}

TechniqueTaxonomy load_taxonomy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AnalysisError(fmt::format("cannot open taxonomy '{}'", path));
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw AnalysisError(fmt::format("taxonomy '{}' is not valid JSON", path));
    try {
        return taxonomy_from_json(j);
    } catch (const AnalysisError& e) {
        throw AnalysisError(fmt::format("{}: {}", path, e.what()));
    }
}

void save_taxonomy(const TechniqueTaxonomy& t, const std::string& path) {
    t.validate();
    write_text_atomic(path, to_json(t).dump(2) + "\n");
}

}  // namespace electwit
