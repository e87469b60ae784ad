#pragma once

// Finite-n realisations of the weighted configuration model.
//
// Each vertex draws a degree D_i ~ p, each of its D_i stubs draws a weight from q(.|D_i),
// and within each weight class the stubs are paired uniformly at random. An odd class
// discards one stub. Self-loops and multi-edges are kept unless simplify() erases them.

#include "wcm/model_spec.hpp"
#include "wcm/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace wcm {

using Vertex = std::uint32_t;

struct Edge {
    Vertex u = 0;
    Vertex v = 0;
    int w = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Stub {
    Vertex vertex = 0;
    int w = 0;
    friend bool operator==(const Stub&, const Stub&) = default;
};

struct WeightedGraph {
    std::size_t n = 0;
    std::vector<int> degrees;        ///< assigned degree D_i
    std::vector<Edge> edges;
    std::vector<Stub> dropped_stubs; ///< at most one per weight class

    /// Degree in the edge list; self-loops count twice.
    std::vector<int> realized_degrees() const {
        std::vector<int> deg(n, 0);
        for (const auto& e : edges) {
            ++deg[e.u];
            ++deg[e.v];
        }
        return deg;
    }

    std::map<int, std::size_t> dropped_by_weight() const {
        std::map<int, std::size_t> out;
        for (const auto& s : dropped_stubs)
            ++out[s.w];
        return out;
    }

    friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;
};

struct GenerationReport {
    std::size_t self_loop_count = 0;
    /// Edges beyond the first between the same unordered pair of distinct vertices.
    std::size_t multi_edge_count = 0;
    std::map<int, std::size_t> stub_totals; ///< stubs drawn per weight, before discarding
    std::uint64_t seed = 0;
};

struct GeneratedGraph {
    WeightedGraph graph;
    GenerationReport report;
};

/// Stream ids for derive_seed; each part of the construction draws from its own stream.
namespace stream {
inline constexpr std::uint64_t degrees = 0x64656772ULL;   // "degr"
inline constexpr std::uint64_t weights = 0x77676874ULL;   // "wght"
inline constexpr std::uint64_t matching = 0x6d617463ULL;  // "matc"; combined with the weight
inline constexpr std::uint64_t simplify = 0x73696d70ULL;  // "simp"
} // namespace stream

namespace detail {

/// Inverse-CDF sampler over a finite support.
class DiscreteSampler {
public:
    DiscreteSampler(std::span<const int> values, std::span<const double> probs)
        : values_(values.begin(), values.end()) {
        double acc = 0.0;
        for (double p : probs)
            cdf_.push_back(acc += p);
        cdf_.back() = INFINITY; // absorb rounding in the tail
    }
    int operator()(Rng& rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return values_[static_cast<std::size_t>(it - cdf_.begin())];
    }

private:
    std::vector<int> values_;
    std::vector<double> cdf_;
};

inline std::uint64_t pair_key(Vertex a, Vertex b) {
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace detail

inline GenerationReport make_report(const WeightedGraph& g, std::uint64_t seed,
                                    std::map<int, std::size_t> stub_totals) {
    GenerationReport r;
    r.seed = seed;
    r.stub_totals = std::move(stub_totals);
    std::vector<std::uint64_t> keys;
    keys.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        if (e.u == e.v)
            ++r.self_loop_count;
        else
            keys.push_back(detail::pair_key(e.u, e.v));
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 1; i < keys.size(); ++i)
        if (keys[i] == keys[i - 1])
            ++r.multi_edge_count;
    return r;
}

/// Draws a graph on n vertices. Identical (spec, n, seed) give a bit-identical edge list.
/// Edges are listed by increasing weight, in matching order within a weight class.
inline GeneratedGraph generate(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0)
        throw domain_error("generate: n must be positive");
    if (n > std::numeric_limits<Vertex>::max())
        throw domain_error("generate: n exceeds the vertex id range");

    const auto& deg = spec.degree();
    const auto& kernel = spec.weights();
    const auto ws = kernel.weights();

    WeightedGraph g;
    g.n = n;
    g.degrees.resize(n);
    {
        Rng rng(derive_seed(seed, stream::degrees));
        const detail::DiscreteSampler sampler(deg.support(), deg.probabilities());
        for (auto& d : g.degrees)
            d = sampler(rng);
    }

    std::vector<std::vector<Vertex>> classes(ws.size());
    {
        std::vector<detail::DiscreteSampler> rows;
        for (std::size_t i = 0; i < deg.size(); ++i)
            rows.emplace_back(ws, kernel.row(*kernel.degree_index(deg.support()[i])));
        Rng rng(derive_seed(seed, stream::weights));
        for (Vertex v = 0; v < n; ++v) {
            const auto& row = rows[*deg.index_of(g.degrees[v])];
            for (int j = 0; j < g.degrees[v]; ++j)
                classes[*kernel.weight_index(row(rng))].push_back(v);
        }
    }

    std::map<int, std::size_t> totals;
    for (std::size_t wi = 0; wi < ws.size(); ++wi) {
        auto& stubs = classes[wi];
        if (stubs.empty())
            continue;
        const int w = ws[wi];
        totals[w] = stubs.size();
        Rng rng(derive_seed(derive_seed(seed, stream::matching), static_cast<std::uint64_t>(w)));
        shuffle(std::span<Vertex>(stubs), rng);
        if (stubs.size() % 2 == 1) {
            g.dropped_stubs.push_back({stubs.back(), w});
            stubs.pop_back();
        }
        for (std::size_t i = 0; i < stubs.size(); i += 2)
            g.edges.push_back({stubs[i], stubs[i + 1], w});
    }

    auto report = make_report(g, seed, std::move(totals));
    return {std::move(g), std::move(report)};
}

enum class SimplifyPolicy { keep, erase };

/// keep: returns the graph unchanged.
/// erase: drops self-loops and keeps one uniformly chosen edge (with its weight) of every
/// parallel bundle. The result's degrees are its realized degrees and it has no dropped stubs.
inline WeightedGraph simplify(const WeightedGraph& g, SimplifyPolicy policy, std::uint64_t seed = 0) {
    if (policy == SimplifyPolicy::keep)
        return g;

    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (g.edges[i].u != g.edges[i].v)
            keyed.emplace_back(detail::pair_key(g.edges[i].u, g.edges[i].v), i);
    std::sort(keyed.begin(), keyed.end());

    Rng rng(derive_seed(seed, stream::simplify));
    WeightedGraph out;
    out.n = g.n;
    for (std::size_t i = 0; i < keyed.size();) {
        std::size_t j = i;
        while (j < keyed.size() && keyed[j].first == keyed[i].first)
            ++j;
        const auto pick = j - i == 1 ? i : i + static_cast<std::size_t>(rng.below(j - i));
        out.edges.push_back(g.edges[keyed[pick].second]);
        i = j;
    }
    // canonical order: by weight, then endpoints
    std::sort(out.edges.begin(), out.edges.end(), [&](const Edge& a, const Edge& b) {
        return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
    });
    out.degrees = out.realized_degrees();
    return out;
}

/// Writes "# n=<n> seed=<seed>" followed by one "u v w" line per edge.
inline void write_edge_list(std::ostream& os, const WeightedGraph& g, std::uint64_t seed) {
    os << "# n=" << g.n << " seed=" << seed << '\n';
    for (const auto& e : g.edges)
        os << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

struct EdgeList {
    WeightedGraph graph; ///< degrees are the realized degrees; dropped stubs are not recorded
    std::uint64_t seed = 0;
};

/// Inverse of write_edge_list. Without a header, n is one more than the largest vertex id.
inline EdgeList read_edge_list(std::istream& is) {
    EdgeList out;
    std::optional<std::size_t> header_n;
    std::string line;
    std::size_t lineno = 0;
    Vertex max_vertex = 0;
    bool any = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                if (tok.rfind("n=", 0) == 0)
                    header_n = std::stoull(tok.substr(2));
                else if (tok.rfind("seed=", 0) == 0)
                    out.seed = std::stoull(tok.substr(5));
            }
            continue;
        }
        std::istringstream ls(line);
        long long u, v, w;
        std::string extra;
        if (!(ls >> u >> v >> w) || (ls >> extra))
            throw ingest_error(ingest_error::kind::malformed_row, lineno, "expected 'u v w', got '" + line + "'");
        if (u < 0 || v < 0 || u > std::numeric_limits<Vertex>::max() || v > std::numeric_limits<Vertex>::max())
            throw ingest_error(ingest_error::kind::malformed_row, lineno, "vertex id out of range");
        if (w < 0 || w > std::numeric_limits<int>::max())
            throw ingest_error(ingest_error::kind::negative_count, lineno, "weight must be a non-negative integer");
        out.graph.edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), static_cast<int>(w)});
        max_vertex = std::max({max_vertex, static_cast<Vertex>(u), static_cast<Vertex>(v)});
        any = true;
    }
    out.graph.n = header_n.value_or(any ? static_cast<std::size_t>(max_vertex) + 1 : 0);
    if (any && max_vertex >= out.graph.n)
        throw ingest_error(ingest_error::kind::malformed_row, 0, "vertex id exceeds header n");
    out.graph.degrees = out.graph.realized_degrees();
    return out;
}

} // namespace wcm
