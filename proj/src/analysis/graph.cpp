#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "electwit/analysis.hpp"
#include "log_index.hpp"

namespace electwit {
namespace {

constexpr double kMaxPenWidth = 6.0;
constexpr double kMaxNodeWidth = 2.0;
constexpr double kMinNodeWidth = 0.2;

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n' || c == '\r') {
            out += ' ';
            continue;
        }
        out += c;
    }
    return out + "\"";
}

const char* role_fill(Role r) {
    switch (r) {
        case Role::Candidate: return "#f2c14e";
        case Role::Eventor: return "#ffffff";
        case Role::Voter: return "#d9d9d9";
    }
    return "#d9d9d9";
}

}  // namespace

const char* to_string(GraphKind k) { return k == GraphKind::Reply ? "reply" : "like"; }

std::size_t InteractionGraph::total_weight() const {
    std::size_t n = 0;
    for (const auto& e : edges) n += e.weight;
    return n;
}

const GraphEdge* InteractionGraph::find(const AgentId& from, const AgentId& to) const {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const GraphEdge& e) { return e.from == from && e.to == to; });
    return it == edges.end() ? nullptr : &*it;
}

InteractionGraph build_interaction_graph(const RunLog& log, GraphKind kind) {
    const detail::LogIndex idx(log);
    const auto wanted = kind == GraphKind::Reply ? ActionKind::Reply : ActionKind::Like;

    std::map<std::pair<AgentId, AgentId>, std::size_t> weights;
    for (const auto& r : log.records) {
        const auto* a = r.as<ActionRecord>();
        if (a == nullptr || !a->accepted || a->stage != ActionStage::Apply || a->action != wanted) continue;
        if (!a->target) throw AnalysisError(fmt::format("record {}: accepted {} without target", r.seq, to_string(a->action)));
        const auto* receiver = idx.author(*a->target);
        if (receiver == nullptr) {
            throw AnalysisError(fmt::format("record {}: target {} has no recorded author", r.seq, a->target->str()));
        }
        ++weights[{a->agent, *receiver}];
    }

    InteractionGraph g;
    g.kind = kind;
    std::map<AgentId, std::size_t> incoming;
    for (const auto& [pair, w] : weights) incoming[pair.second] += w;
    for (const auto& [id, p] : idx.agents) {
        auto it = incoming.find(id);
        g.nodes.push_back(GraphNode{id, p->display_name, p->role, it == incoming.end() ? 0 : it->second});
    }
    for (const auto& [pair, w] : weights) {
        GraphEdge e{pair.first, pair.second, w, std::nullopt, pair.first == pair.second};
        const auto* a = idx.agent(pair.first);
        const auto* b = idx.agent(pair.second);
        if (a && b && a->background && b->background && !a->background->is_zero() && !b->background->is_zero()) {
            e.similarity = cosine_similarity(*a->background, *b->background);
        }
        g.edges.push_back(std::move(e));
    }
    return g;
}

std::string similarity_color(std::optional<double> similarity) {
    if (!similarity) return "#808080";
    const double t = (std::clamp(*similarity, -1.0, 1.0) + 1.0) / 2.0;
    const auto red = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    const auto blue = static_cast<int>(std::lround(255.0 * t));
    return fmt::format("#{:02x}00{:02x}", red, blue);
}

std::string to_dot(const InteractionGraph& graph) {
    std::size_t max_in = 0;
    for (const auto& n : graph.nodes) max_in = std::max(max_in, n.incoming);
    std::size_t max_w = 0;
    for (const auto& e : graph.edges) max_w = std::max(max_w, e.weight);

    std::string out = fmt::format("digraph {} {{\n", to_string(graph.kind));
    out += fmt::format("  graph [label={}, overlap=false];\n",
                       dot_quote(fmt::format("{} interactions (edge color: background similarity, red -1 to blue +1)",
                                             to_string(graph.kind))));
    out += "  node [shape=circle, style=filled, fixedsize=true, fontsize=9];\n";
    for (const auto& n : graph.nodes) {
        const double w = max_in == 0 ? kMinNodeWidth
                                     : std::max(kMinNodeWidth, kMaxNodeWidth * static_cast<double>(n.incoming) /
                                                                   static_cast<double>(max_in));
        out += fmt::format("  {} [label={}, width={:.3f}, fillcolor=\"{}\", incoming={}];\n", dot_quote(n.id.str()),
                           dot_quote(n.name), w, role_fill(n.role), n.incoming);
    }
    for (const auto& e : graph.edges) {
        const double pen = kMaxPenWidth * static_cast<double>(e.weight) / static_cast<double>(max_w);
        out += fmt::format("  {} -> {} [penwidth={:.3f}, color=\"{}\", weight={}{}{}];\n", dot_quote(e.from.str()),
                           dot_quote(e.to.str()), pen, similarity_color(e.similarity), e.weight,
                           e.similarity ? fmt::format(", similarity={:.6f}", *e.similarity) : std::string(),
                           e.self ? ", self=true" : "");
    }
    out += "}\n";
    return out;
}

}  // namespace electwit
