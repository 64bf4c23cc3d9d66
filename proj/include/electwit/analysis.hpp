#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "electwit/ids.hpp"
#include "electwit/personas.hpp"
#include "electwit/provider.hpp"
#include "electwit/runlog.hpp"

namespace electwit {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Taxonomy
// ---------------------------------------------------------------------------

inline constexpr std::size_t kTaxonomySize = 25;

/// Techniques every taxonomy must contain.
inline constexpr std::array<std::string_view, 8> kNamedTechniques{
    "Appeal to Credibility", "Appeal to Emotion", "Appeal to Logic", "Vagueness",
    "Distraction",           "Information Overload", "Self-Deprecation", "Humor"};

struct TechniqueTaxonomy {
    std::vector<std::string> labels;
    std::vector<std::string> descriptions;  // parallel to labels
    std::vector<bool> reconstructed;        // parallel to labels; true for non-named defaults

    /// Throws AnalysisError unless there are exactly 25 distinct, non-blank
    /// labels including every named technique, each with a description.
    void validate() const;
    bool contains(std::string_view label) const;

    bool operator==(const TechniqueTaxonomy&) const = default;
};

TechniqueTaxonomy default_taxonomy();
std::string default_taxonomy_file();

nlohmann::json to_json(const TechniqueTaxonomy& t);
TechniqueTaxonomy taxonomy_from_json(const nlohmann::json& j);
TechniqueTaxonomy load_taxonomy(const std::string& path);
void save_taxonomy(const TechniqueTaxonomy& t, const std::string& path);

// ---------------------------------------------------------------------------
// Messages and tags
// ---------------------------------------------------------------------------

/// An accepted post or comment as recorded in a log.
struct Message {
    ItemId id;
    AgentId author;
    SimTime time;
    std::string text;
};

/// Accepted posts and comments in log order.
std::vector<Message> collect_messages(const RunLog& log);

struct PersuasionTag {
    ItemId message;
    std::string technique;
    ModelId annotator;

    auto operator<=>(const PersuasionTag&) const = default;
};

struct AnnotationOptions {
    ModelId annotator;
    std::string cache_dir;  // empty disables caching
    int parallel = 1;
    double temperature = 0.0;
};

struct AnnotationResult {
    std::vector<PersuasionTag> tags;  // sorted, unique
    std::vector<ItemId> unannotated;
    std::vector<std::string> warnings;
    std::size_t provider_calls = 0;
    std::size_t cache_hits = 0;
};

CompletionRequest build_annotation_prompt(const TechniqueTaxonomy& taxonomy, const Message& message,
                                          const ModelId& annotator);

/// Strings of the first JSON array in `raw`; nullopt when there is none.
/// Non-string elements are reported through `warnings`.
std::optional<std::vector<std::string>> parse_annotation_labels(std::string_view raw,
                                                                std::vector<std::string>& warnings);

/// Tags every message once. Cache entries are keyed by (message id, text
/// hash, annotator) and hold the raw label list, so a warm rerun makes no
/// calls and yields the same tags. Failed messages are listed as unannotated
/// and are not cached.
AnnotationResult annotate_messages(const RunLog& log, const TechniqueTaxonomy& taxonomy, CompletionProvider& annotator,
                                   const AnnotationOptions& options);

struct TagFile {
    ModelId annotator;
    std::vector<std::string> labels;
    std::vector<PersuasionTag> tags;
    std::vector<ItemId> unannotated;

    bool operator==(const TagFile&) const = default;
};

nlohmann::json to_json(const TagFile& f);
TagFile tag_file_from_json(const nlohmann::json& j);
void write_tag_file(const TagFile& f, const std::string& path);
TagFile load_tag_file(const std::string& path);

// ---------------------------------------------------------------------------
// Aggregates
// ---------------------------------------------------------------------------

enum class GroupBy { Technique, Model, Role, TechniqueModel };

const char* to_string(GroupBy g);
std::optional<GroupBy> group_by_from_string(std::string_view s);

struct FrequencyTable {
    std::vector<std::string> columns;                   // key column names
    std::map<std::vector<std::string>, std::size_t> counts;
    std::size_t total = 0;
};

/// Counts (message, technique) pairs. Throws AnalysisError when a tag names
/// a message that is not an accepted post or comment of `log`.
FrequencyTable tag_frequency(std::span<const PersuasionTag> tags, const RunLog& log, GroupBy group_by);

struct ActionCountRow {
    std::size_t posts = 0;
    std::size_t comments = 0;
    std::size_t likes = 0;

    std::size_t total() const noexcept { return posts + comments + likes; }
    bool operator==(const ActionCountRow&) const = default;
};

struct ActionCounts {
    std::map<std::string, ActionCountRow> by_model;
    std::map<std::string, ActionCountRow> by_role;
    ActionCountRow total;
};

/// Accepted actions only.
ActionCounts action_counts(const RunLog& log);

struct CandidateDayPoint {
    AgentId candidate;
    int tally = 0;
    std::optional<double> mean_similarity;  // absent with zero voters
};

struct SimilarityDay {
    int day = 0;
    bool forced = false;
    std::vector<CandidateDayPoint> candidates;  // ascending id
    std::optional<double> voter_to_choice;      // absent when everyone abstained
};

std::vector<SimilarityDay> similarity_curves(const RunLog& log);

enum class GraphKind { Reply, Like };

const char* to_string(GraphKind k);

struct GraphNode {
    AgentId id;
    std::string name;
    Role role = Role::Voter;
    std::size_t incoming = 0;
};

struct GraphEdge {
    AgentId from;
    AgentId to;
    std::size_t weight = 0;
    std::optional<double> similarity;  // absent when either end has no background
    bool self = false;
};

struct InteractionGraph {
    GraphKind kind = GraphKind::Reply;
    std::vector<GraphNode> nodes;  // whole population, ascending id
    std::vector<GraphEdge> edges;  // ascending (from, to)

    std::size_t total_weight() const;
    const GraphEdge* find(const AgentId& from, const AgentId& to) const;
};

/// Reply edge a→b per accepted comment by a on an item authored by b; like
/// edge a→b per accepted like by a on an item authored by b.
InteractionGraph build_interaction_graph(const RunLog& log, GraphKind kind);

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

/// #rrggbb on a linear red (-1) to blue (+1) scale; grey when absent.
std::string similarity_color(std::optional<double> similarity);

std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);
std::string to_dot(const InteractionGraph& graph);
std::string bar_chart_svg(std::string_view title, const std::vector<std::pair<std::string, std::size_t>>& bars);

/// Writes the CSV tables, both DOT graphs and the SVG charts into out_dir.
/// `labels` fixes the technique rows (zero counts included). Returns the
/// written file names in a fixed order.
std::vector<std::string> emit_report(const RunLog& log, std::span<const PersuasionTag> tags,
                                     std::span<const std::string> labels, const std::string& out_dir);

}  // namespace electwit
