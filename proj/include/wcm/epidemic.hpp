#pragma once

// Reed-Frost epidemics on realized graphs.
//
// Generation t infectives each try once to infect every susceptible neighbour, along every
// connecting edge, with probability pi(w); then they are removed. Whether edge e transmits is
// decided by a counter-based uniform u_e = U(seed, e) < pi(w_e), drawn when the edge is first
// examined. An edge is examined at most once (its infective end is removed afterwards), so this
// is the Reed-Frost process, and runs sharing a seed are coupled edge by edge.

#include "wcm/graph.hpp"
#include "wcm/model_spec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace wcm {

struct EpidemicOutcome {
    std::size_t final_size = 0; ///< ever-infected vertices, index case included
    std::size_t generations = 0;
    Vertex index_vertex = 0;
    std::uint64_t seed = 0;
};

/// Adjacency view of a graph; self-loops are left out since a vertex cannot infect itself.
class ContactNetwork {
public:
    explicit ContactNetwork(const WeightedGraph& g) : n_(g.n), offset_(g.n + 1, 0), weights_(g.edges.size()) {
        for (const auto& e : g.edges)
            if (e.u != e.v) {
                ++offset_[e.u + 1];
                ++offset_[e.v + 1];
            }
        for (std::size_t i = 0; i < n_; ++i)
            offset_[i + 1] += offset_[i];
        adj_.resize(offset_[n_]);
        std::vector<std::size_t> fill(offset_.begin(), offset_.end() - 1);
        for (std::size_t id = 0; id < g.edges.size(); ++id) {
            const auto& e = g.edges[id];
            weights_[id] = e.w;
            if (e.u == e.v)
                continue;
            adj_[fill[e.u]++] = {e.v, static_cast<std::uint32_t>(id)};
            adj_[fill[e.v]++] = {e.u, static_cast<std::uint32_t>(id)};
        }
    }

    struct Incidence {
        Vertex neighbor;
        std::uint32_t edge;
    };

    std::size_t size() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return weights_.size(); }
    int weight(std::size_t edge) const { return weights_[edge]; }
    std::span<const Incidence> incident(Vertex v) const {
        return {adj_.data() + offset_[v], offset_[v + 1] - offset_[v]};
    }

private:
    std::size_t n_;
    std::vector<std::size_t> offset_;
    std::vector<Incidence> adj_;
    std::vector<int> weights_;
};

namespace stream {
inline constexpr std::uint64_t index_case = 0x696e6478ULL;    // "indx"
inline constexpr std::uint64_t transmission = 0x74726e73ULL;  // "trns"
inline constexpr std::uint64_t replicate = 0x7265706cULL;     // "repl"
} // namespace stream

struct EpidemicTrace {
    EpidemicOutcome outcome;
    std::vector<Vertex> infected; ///< in order of infection
};

/// Runs one epidemic. `index` defaults to a uniformly chosen vertex.
inline EpidemicTrace trace_epidemic(const ContactNetwork& net, const TransmissionFunction& transmission,
                                    std::uint64_t seed, std::optional<Vertex> index = std::nullopt) {
    const auto n = net.size();
    if (n == 0)
        throw domain_error("run_epidemic: empty graph");
    if (index && *index >= n)
        throw domain_error("run_epidemic: index vertex " + std::to_string(*index) + " out of range");

    std::vector<double> pi(net.edge_count());
    {
        std::map<int, double> cache;
        for (std::size_t e = 0; e < pi.size(); ++e) {
            const int w = net.weight(e);
            auto it = cache.find(w);
            if (it == cache.end())
                it = cache.emplace(w, transmission(w)).first;
            pi[e] = it->second;
        }
    }

    EpidemicTrace trace;
    auto& out = trace.outcome;
    out.seed = seed;
    out.index_vertex = index ? *index : static_cast<Vertex>(Rng(derive_seed(seed, stream::index_case)).below(n));
    const auto edge_seed = derive_seed(seed, stream::transmission);

    std::vector<char> infected(n, 0);
    std::vector<Vertex> current{out.index_vertex}, next;
    infected[out.index_vertex] = 1;
    trace.infected.push_back(out.index_vertex);
    out.generations = 1;
    while (true) {
        next.clear();
        for (Vertex u : current)
            for (const auto& [v, e] : net.incident(u)) {
                if (infected[v])
                    continue;
                const double p = pi[e];
                if (p >= 1.0 || (p > 0.0 && to_unit(derive_seed(edge_seed, e)) < p)) {
                    infected[v] = 1;
                    next.push_back(v);
                    trace.infected.push_back(v);
                }
            }
        if (next.empty())
            break;
        ++out.generations;
        current.swap(next);
    }
    out.final_size = trace.infected.size();
    return trace;
}

inline EpidemicOutcome run_epidemic(const ContactNetwork& net, const TransmissionFunction& transmission,
                                    std::uint64_t seed, std::optional<Vertex> index = std::nullopt) {
    return trace_epidemic(net, transmission, seed, index).outcome;
}

inline EpidemicOutcome run_epidemic(const WeightedGraph& g, const TransmissionFunction& transmission,
                                    std::uint64_t seed, std::optional<Vertex> index = std::nullopt) {
    return run_epidemic(ContactNetwork(g), transmission, seed, index);
}

/// Default major-outbreak cutoff as a fraction of n: 0.05 for n >= 10^4, else max(0.1 n, 10 ln n) / n.
inline double auto_major_cutoff(std::size_t n) {
    if (n >= 10'000)
        return 0.05;
    const double nn = static_cast<double>(n);
    return std::min(1.0, std::max(0.1 * nn, 10.0 * std::log(nn)) / nn);
}

struct EnsembleOptions {
    std::size_t n = 10'000;
    std::size_t replicates = 100;
    std::uint64_t seed = 1;
    std::optional<double> major_cutoff; ///< fraction of n; auto_major_cutoff(n) when empty
    SimplifyPolicy policy = SimplifyPolicy::keep;
    unsigned threads = 0; ///< 0: hardware concurrency
    std::size_t histogram_bins = 100;
};

struct EnsembleSummary {
    std::size_t replicates = 0;
    std::size_t major_count = 0;
    double major_fraction = 0.0;
    /// Mean of final_size / n over major replicates (0 when there are none).
    double mean_major_size_fraction = 0.0;
    /// Standard error of that mean.
    double major_size_stderr = 0.0;
    double cutoff = 0.0;
    std::vector<std::size_t> histogram; ///< counts of final_size / n over equal bins of [0,1]
    std::vector<EpidemicOutcome> outcomes; ///< by replicate id
};

/// Replicate r uses seed derive_seed(seed, r) for its graph, index case and transmissions,
/// so the summary does not depend on the thread count.
inline EnsembleSummary run_ensemble(const ModelSpec& spec, const EnsembleOptions& opt) {
    if (opt.replicates == 0)
        throw domain_error("run_ensemble: replicates must be >= 1");
    if (opt.n == 0)
        throw domain_error("run_ensemble: n must be >= 1");
    if (opt.histogram_bins == 0)
        throw domain_error("run_ensemble: histogram needs at least one bin");
    const double cutoff = opt.major_cutoff.value_or(auto_major_cutoff(opt.n));
    if (!(cutoff > 0.0 && cutoff <= 1.0))
        throw domain_error("run_ensemble: major cutoff must lie in (0,1]");

    EnsembleSummary s;
    s.replicates = opt.replicates;
    s.cutoff = cutoff;
    s.outcomes.resize(opt.replicates);

    auto one = [&](std::size_t r) {
        const auto rs = derive_seed(derive_seed(opt.seed, stream::replicate), r);
        auto g = generate(spec, opt.n, rs).graph;
        if (opt.policy == SimplifyPolicy::erase)
            g = simplify(g, SimplifyPolicy::erase, rs);
        s.outcomes[r] = run_epidemic(ContactNetwork(g), spec.transmission(), rs);
    };

    const unsigned threads =
        std::max(1u, std::min<unsigned>(opt.threads ? opt.threads : std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(opt.replicates)));
    if (threads == 1) {
        for (std::size_t r = 0; r < opt.replicates; ++r)
            one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t r; (r = next.fetch_add(1)) < opt.replicates;)
                    one(r);
            });
    }

    s.histogram.assign(opt.histogram_bins, 0);
    const double nn = static_cast<double>(opt.n);
    double sum = 0.0, sumsq = 0.0;
    for (const auto& o : s.outcomes) {
        const double f = static_cast<double>(o.final_size) / nn;
        const auto bin = std::min(opt.histogram_bins - 1, static_cast<std::size_t>(f * opt.histogram_bins));
        ++s.histogram[bin];
        if (f >= cutoff) {
            ++s.major_count;
            sum += f;
            sumsq += f * f;
        }
    }
    s.major_fraction = static_cast<double>(s.major_count) / static_cast<double>(s.replicates);
    if (s.major_count > 0) {
        const double m = static_cast<double>(s.major_count);
        s.mean_major_size_fraction = sum / m;
        if (s.major_count > 1) {
            const double var = std::max(0.0, (sumsq - m * s.mean_major_size_fraction * s.mean_major_size_fraction) / (m - 1));
            s.major_size_stderr = std::sqrt(var / m);
        }
    }
    return s;
}

} // namespace wcm
