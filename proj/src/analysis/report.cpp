#include <algorithm>
#include <filesystem>

#include <fmt/format.h>

#include "electwit/analysis.hpp"

namespace electwit {
namespace {

namespace fs = std::filesystem;

constexpr int kChartPlotHeight = 200;
constexpr int kChartBarWidth = 22;
constexpr int kChartBarGap = 8;
constexpr int kChartLeft = 50;
constexpr int kChartTop = 40;
constexpr int kChartLabelSpace = 170;

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(std::optional<double> v) { return v ? fmt::format("{:.6f}", *v) : std::string(); }

std::string counts_csv(const std::map<std::string, ActionCountRow>& rows, std::string_view key) {
    std::string out = csv_row({std::string(key), "posts", "comments", "likes", "total"});
    for (const auto& [k, r] : rows) {
        out += csv_row({k, std::to_string(r.posts), std::to_string(r.comments), std::to_string(r.likes),
                        std::to_string(r.total())});
    }
    return out;
}

std::string frequency_csv(const FrequencyTable& t) {
    auto header = t.columns;
    header.emplace_back("tags");
    std::string out = csv_row(header);
    for (const auto& [key, n] : t.counts) {
        auto row = key;
        row.push_back(std::to_string(n));
        out += csv_row(row);
    }
    return out;
}

std::string edges_csv(const InteractionGraph& g) {
    std::string out = csv_row({"from", "to", "weight", "similarity", "self"});
    for (const auto& e : g.edges) {
        out += csv_row({e.from.str(), e.to.str(), std::to_string(e.weight), fixed(e.similarity),
                        e.self ? "true" : "false"});
    }
    return out;
}

}  // namespace

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\r\n";
}

std::string bar_chart_svg(std::string_view title, const std::vector<std::pair<std::string, std::size_t>>& bars) {
    std::size_t max_v = 0;
    for (const auto& [_, v] : bars) max_v = std::max(max_v, v);
    const int n = static_cast<int>(bars.size());
    const int width = kChartLeft * 2 + std::max(1, n) * (kChartBarWidth + kChartBarGap);
    const int height = kChartTop + kChartPlotHeight + kChartLabelSpace;
    const int base = kChartTop + kChartPlotHeight;

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"10\">\n",
        width, height);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", width, height);
    out += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n", kChartLeft, xml_escape(title));
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>\n", kChartLeft, base,
                       width - kChartLeft);
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kChartLeft - 4, kChartTop + 4, max_v);
    for (int i = 0; i < n; ++i) {
        const auto& [label, v] = bars[static_cast<std::size_t>(i)];
        const int h = max_v == 0 ? 0 : static_cast<int>(kChartPlotHeight * v / max_v);
        const int x = kChartLeft + kChartBarGap / 2 + i * (kChartBarWidth + kChartBarGap);
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#4a78b5\"><title>{}: {}</title></rect>\n",
                           x, base - h, kChartBarWidth, h, xml_escape(label), v);
        const int cx = x + kChartBarWidth / 2;
        out += fmt::format("<text x=\"{0}\" y=\"{1}\" text-anchor=\"end\" transform=\"rotate(-60 {0} {1})\">{2}</text>\n",
                           cx, base + 12, xml_escape(label));
    }
    out += "</svg>\n";
    return out;
}

std::vector<std::string> emit_report(const RunLog& log, std::span<const PersuasionTag> tags,
                                     std::span<const std::string> labels, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw PersistenceError(fmt::format("cannot create report dir '{}': {}", out_dir, ec.message()));

    std::vector<std::pair<std::string, std::string>> files;

    const auto counts = action_counts(log);
    files.emplace_back("actions_by_model.csv", counts_csv(counts.by_model, "model"));
    files.emplace_back("actions_by_role.csv", counts_csv(counts.by_role, "role"));

    const auto by_technique = tag_frequency(tags, log, GroupBy::Technique);
    std::vector<std::pair<std::string, std::size_t>> technique_bars;
    for (const auto& l : labels) {
        auto it = by_technique.counts.find({l});
        technique_bars.emplace_back(l, it == by_technique.counts.end() ? 0 : it->second);
    }
    for (const auto& [key, n] : by_technique.counts) {
        if (std::find(labels.begin(), labels.end(), key.front()) == labels.end()) technique_bars.emplace_back(key.front(), n);
    }
    std::string technique_csv = csv_row({"technique", "tags"});
    for (const auto& [l, n] : technique_bars) technique_csv += csv_row({l, std::to_string(n)});
    files.emplace_back("tags_by_technique.csv", std::move(technique_csv));
    files.emplace_back("tags_by_model.csv", frequency_csv(tag_frequency(tags, log, GroupBy::Model)));
    files.emplace_back("tags_by_role.csv", frequency_csv(tag_frequency(tags, log, GroupBy::Role)));
    files.emplace_back("tags_by_technique_model.csv", frequency_csv(tag_frequency(tags, log, GroupBy::TechniqueModel)));

    const auto curves = similarity_curves(log);
    std::string cand_csv = csv_row({"day", "forced", "candidate", "tally", "mean_similarity"});
    std::string voter_csv = csv_row({"day", "forced", "mean_similarity_to_choice"});
    for (const auto& d : curves) {
        for (const auto& c : d.candidates) {
            cand_csv += csv_row({std::to_string(d.day), d.forced ? "true" : "false", c.candidate.str(),
                                 std::to_string(c.tally), fixed(c.mean_similarity)});
        }
        voter_csv += csv_row({std::to_string(d.day), d.forced ? "true" : "false", fixed(d.voter_to_choice)});
    }
    files.emplace_back("similarity_candidates.csv", std::move(cand_csv));
    files.emplace_back("similarity_voters.csv", std::move(voter_csv));

    const auto replies = build_interaction_graph(log, GraphKind::Reply);
    const auto likes = build_interaction_graph(log, GraphKind::Like);
    files.emplace_back("reply_edges.csv", edges_csv(replies));
    files.emplace_back("like_edges.csv", edges_csv(likes));
    files.emplace_back("reply_graph.dot", to_dot(replies));
    files.emplace_back("like_graph.dot", to_dot(likes));

    files.emplace_back("tags_by_technique.svg", bar_chart_svg("Persuasion tags by technique", technique_bars));
    std::vector<std::pair<std::string, std::size_t>> model_bars;
    for (const auto& [model, row] : counts.by_model) model_bars.emplace_back(model, row.total());
    files.emplace_back("actions_by_model.svg", bar_chart_svg("Accepted actions by model", model_bars));
    std::vector<std::pair<std::string, std::size_t>> type_bars{
        {"posts", counts.total.posts}, {"comments", counts.total.comments}, {"likes", counts.total.likes}};
    files.emplace_back("actions_by_type.svg", bar_chart_svg("Accepted actions by type", type_bars));

    std::string summary = csv_row({"metric", "value"});
    summary += csv_row({"posts", std::to_string(counts.total.posts)});
    summary += csv_row({"comments", std::to_string(counts.total.comments)});
    summary += csv_row({"likes", std::to_string(counts.total.likes)});
    summary += csv_row({"interactions", std::to_string(counts.total.total())});
    summary += csv_row({"tags", std::to_string(tags.size())});
    summary += csv_row({"polls", std::to_string(curves.size())});
    files.emplace_back("summary.csv", std::move(summary));

    std::vector<std::string> names;
    for (const auto& [name, contents] : files) {
        write_text_atomic((fs::path(out_dir) / name).string(), contents);
        names.push_back(name);
    }
    return names;
}

}  // namespace electwit
