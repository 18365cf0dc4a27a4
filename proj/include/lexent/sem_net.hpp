#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "lexent/corpus.hpp"
#include "lexent/csv.hpp"
#include "lexent/errors.hpp"
#include "lexent/rng.hpp"
#include "lexent/sem_info.hpp"

namespace lexent {

struct GraphNode {
    std::string word;
    double delta_i = 0.0;
    std::uint64_t n = 0;
};

struct GraphEdge {
    std::uint32_t a = 0, b = 0; // node indices, a < b
    double weight = 0.0;        // cosine of part-count vectors
    double zscore = 0.0;        // against the permutation null
};

struct NetworkParams {
    std::uint64_t s = 0;
    std::uint32_t top_m = 0;    // effective (possibly clamped)
    double z_threshold = 3.0;
    std::uint64_t reps = 200;
    std::uint64_t seed = kDefaultSeed;
};

struct SemanticGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    NetworkParams params;
    bool top_m_clamped = false;

    bool operator==(const SemanticGraph& o) const {
        if (nodes.size() != o.nodes.size() || edges.size() != o.edges.size()) return false;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].word != o.nodes[i].word || nodes[i].delta_i != o.nodes[i].delta_i ||
                nodes[i].n != o.nodes[i].n)
                return false;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].a != o.edges[i].a || edges[i].b != o.edges[i].b ||
                edges[i].weight != o.edges[i].weight || edges[i].zscore != o.edges[i].zscore)
                return false;
        return params.s == o.params.s && params.top_m == o.params.top_m &&
               params.z_threshold == o.params.z_threshold && params.reps == o.params.reps &&
               params.seed == o.params.seed;
    }
};

namespace detail {

// Draw n distinct positions in [0, n_used) and histogram them by part.
// Sampling positions without replacement is the same null as independently
// permuting the word's occurrence positions.
inline void sample_part_counts(std::uint64_t n, std::uint64_t n_used, std::uint64_t s,
                               Rng& rng, std::unordered_set<std::uint64_t>& scratch,
                               std::vector<float>& out_counts) {
    std::fill(out_counts.begin(), out_counts.end(), 0.0f);
    scratch.clear();
    if (n * 2 <= n_used) {
        while (scratch.size() < n) {
            const std::uint64_t p = rng.below(n_used);
            if (scratch.insert(p).second) out_counts[p / s] += 1.0f;
        }
    } else {
        // dense case: sample the complement
        while (scratch.size() < n_used - n) scratch.insert(rng.below(n_used));
        for (std::uint64_t p = 0; p < n_used; ++p)
            if (!scratch.count(p)) out_counts[p / s] += 1.0f;
    }
}

inline void normalize(std::vector<float>& v) {
    double ss = 0;
    for (const float x : v) ss += double(x) * double(x);
    if (ss <= 0) return;
    const auto inv = static_cast<float>(1.0 / std::sqrt(ss));
    for (float& x : v) x *= inv;
}

inline double dot(const float* a, const float* b, std::size_t n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += double(a[i]) * double(b[i]);
    return acc;
}

} // namespace detail

// Nodes: the top_m words by delta_i at scale s. Edge weight: cosine of the
// two part-count vectors. Edge kept when its z-score against the
// independent-permutation null (Monte Carlo, reps realisations) reaches
// z_threshold.
inline SemanticGraph build_network(const TokenizedText& text, std::uint64_t s,
                                   std::uint32_t top_m, double z_threshold = 3.0,
                                   std::uint64_t reps = 200,
                                   std::uint64_t seed = kDefaultSeed) {
    if (top_m < 2) throw compute_error("build_network: top_m must be >= 2");
    if (reps < 2) throw compute_error("build_network: need reps >= 2 for a variance");
    const PartitionProfile pr = partition(text, s);
    auto ranked = rank_keywords(text, s);

    SemanticGraph g;
    g.top_m_clamped = top_m > ranked.size();
    const auto m = static_cast<std::uint32_t>(std::min<std::size_t>(top_m, ranked.size()));
    g.params = {s, m, z_threshold, reps, seed};

    const auto parts = static_cast<std::size_t>(pr.parts);
    std::vector<std::vector<float>> obs(m, std::vector<float>(parts, 0.0f));
    for (std::uint32_t i = 0; i < m; ++i) {
        const std::uint32_t w = ranked[i].word;
        g.nodes.push_back({text.word(w), ranked[i].delta_i, ranked[i].n});
        for (std::uint64_t c = pr.row_begin[w]; c < pr.row_begin[w + 1]; ++c)
            obs[i][pr.part[c]] = static_cast<float>(pr.count[c]);
        detail::normalize(obs[i]);
    }

    const std::size_t n_pairs = std::size_t(m) * (m - 1) / 2;
    std::vector<double> sum(n_pairs, 0.0), sum2(n_pairs, 0.0);
    Rng rng(seed);
    std::unordered_set<std::uint64_t> scratch;
    std::vector<std::vector<float>> null_vec(m, std::vector<float>(parts, 0.0f));
    for (std::uint64_t r = 0; r < reps; ++r) {
        for (std::uint32_t i = 0; i < m; ++i) {
            detail::sample_part_counts(ranked[i].n, pr.n_used, pr.s, rng, scratch, null_vec[i]);
            detail::normalize(null_vec[i]);
        }
        std::size_t p = 0;
        for (std::uint32_t i = 0; i < m; ++i)
            for (std::uint32_t j = i + 1; j < m; ++j, ++p) {
                const double c = detail::dot(null_vec[i].data(), null_vec[j].data(), parts);
                sum[p] += c;
                sum2[p] += c * c;
            }
    }

    std::size_t p = 0;
    const double nrep = static_cast<double>(reps);
    for (std::uint32_t i = 0; i < m; ++i)
        for (std::uint32_t j = i + 1; j < m; ++j, ++p) {
            const double w = detail::dot(obs[i].data(), obs[j].data(), parts);
            const double mean = sum[p] / nrep;
            const double var = std::max(0.0, (sum2[p] - sum[p] * sum[p] / nrep) / (nrep - 1.0));
            const double sd = std::max(std::sqrt(var), 1e-12);
            const double z = (w - mean) / sd;
            if (z >= z_threshold) g.edges.push_back({i, j, w, z});
        }
    return g;
}

enum class GraphFormat { dot, graphml, json };

inline constexpr double kDotPenwidthScale = 6.0;

inline std::string to_dot(const SemanticGraph& g) {
    std::string out = "graph semantic_network {\n";
    out += "  // s=" + fmt_u64(g.params.s) + " top_m=" + fmt_u64(g.params.top_m) +
           " z_threshold=" + fmt_double(g.params.z_threshold) + "\n";
    for (const auto& n : g.nodes)
        out += "  \"" + n.word + "\" [delta_i=" + fmt_double(n.delta_i) + "];\n";
    for (const auto& e : g.edges)
        out += "  \"" + g.nodes[e.a].word + "\" -- \"" + g.nodes[e.b].word + "\" [weight=" +
               fmt_double(e.weight) + ", zscore=" + fmt_double(e.zscore) +
               ", penwidth=" + fmt_double(kDotPenwidthScale * e.weight) + "];\n";
    out += "}\n";
    return out;
}

inline std::string to_graphml(const SemanticGraph& g) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        "  <key id=\"d0\" for=\"node\" attr.name=\"delta_i\" attr.type=\"double\"/>\n"
        "  <key id=\"d1\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        "  <key id=\"d2\" for=\"edge\" attr.name=\"zscore\" attr.type=\"double\"/>\n"
        "  <graph id=\"semantic_network\" edgedefault=\"undirected\">\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out += "    <node id=\"n" + fmt_u64(i) + "\"><data key=\"d0\">" +
               fmt_double(g.nodes[i].delta_i) + "</data></node>\n";
    for (const auto& e : g.edges)
        out += "    <edge source=\"n" + fmt_u64(e.a) + "\" target=\"n" + fmt_u64(e.b) +
               "\"><data key=\"d1\">" + fmt_double(e.weight) + "</data><data key=\"d2\">" +
               fmt_double(e.zscore) + "</data></edge>\n";
    out += "  </graph>\n</graphml>\n";
    return out;
}

inline nlohmann::json graph_to_json(const SemanticGraph& g) {
    nlohmann::json j;
    j["params"] = {{"s", g.params.s},
                   {"top_m", g.params.top_m},
                   {"z_threshold", g.params.z_threshold},
                   {"reps", g.params.reps},
                   {"seed", g.params.seed}};
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : g.nodes)
        j["nodes"].push_back({{"word", n.word}, {"delta_i", n.delta_i}, {"n", n.n}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"source", g.nodes[e.a].word},
                              {"target", g.nodes[e.b].word},
                              {"weight", e.weight},
                              {"zscore", e.zscore}});
    return j;
}

inline SemanticGraph parse_graph_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SemanticGraph g;
    g.params.s = j.at("params").at("s").get<std::uint64_t>();
    g.params.top_m = j.at("params").at("top_m").get<std::uint32_t>();
    g.params.z_threshold = j.at("params").at("z_threshold").get<double>();
    g.params.reps = j.at("params").at("reps").get<std::uint64_t>();
    g.params.seed = j.at("params").at("seed").get<std::uint64_t>();
    std::unordered_map<std::string, std::uint32_t> index;
    for (const auto& n : j.at("nodes")) {
        GraphNode node{n.at("word").get<std::string>(), n.at("delta_i").get<double>(),
                       n.at("n").get<std::uint64_t>()};
        index[node.word] = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges")) {
        GraphEdge edge;
        edge.a = index.at(e.at("source").get<std::string>());
        edge.b = index.at(e.at("target").get<std::string>());
        edge.weight = e.at("weight").get<double>();
        edge.zscore = e.at("zscore").get<double>();
        g.edges.push_back(edge);
    }
    return g;
}

inline std::string export_graph(const SemanticGraph& g, GraphFormat fmt) {
    switch (fmt) {
        case GraphFormat::dot: return to_dot(g);
        case GraphFormat::graphml: return to_graphml(g);
        case GraphFormat::json: return graph_to_json(g).dump(2) + "\n";
    }
    throw input_error("export_graph: unsupported format");
}

inline GraphFormat parse_graph_format(const std::string& name) {
    if (name == "dot") return GraphFormat::dot;
    if (name == "graphml") return GraphFormat::graphml;
    if (name == "json") return GraphFormat::json;
    throw input_error("unsupported graph format '" + name + "' (want dot, graphml or json)");
}

} // namespace lexent
