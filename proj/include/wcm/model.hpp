#pragma once

// Closed-form neighbourhood probabilities of the weighted configuration model.
//
//   size-biased degree        p~(k)   = k p(k) / mu_D
//   w-stub owner degree       p~_w(k) = q(w|k) k p(k) / sum_j q(w|j) j p(j)
//   neighbour degree          p_d(k)  = sum_w q(w|d) p~_w(k)
//   infected neighbour degree p^x_d(k)= sum_w pi(w) q(w|d) p~_w(k)
//   infection pressure        t(d)    = (d-1) sum_w q(w|d) pi(w)

#include "wcm/matrix.hpp"
#include "wcm/model_spec.hpp"

namespace wcm {

/// p~(k) = k p(k) / mu_D over the degree support.
inline DegreeMap size_biased(const DegreeDistribution& degree) {
    DegreeMap out{{degree.support().begin(), degree.support().end()}, {}};
    const double mu = degree.mean();
    for (std::size_t i = 0; i < degree.size(); ++i)
        out.values.push_back(degree.support()[i] * degree.probabilities()[i] / mu);
    return out;
}

namespace detail {

/// Stub mass sum_j q(w|j) j p(j) of the weight at kernel index wi.
inline double stub_mass(const ModelSpec& spec, std::size_t wi) {
    const auto& deg = spec.degree();
    double mass = 0.0;
    for (std::size_t i = 0; i < deg.size(); ++i)
        mass += spec.weights().row(i)[wi] * deg.support()[i] * deg.probabilities()[i];
    return mass;
}

/// B = (p~_w(k)): rows are kernel weights, columns the degree support.
inline Matrix stub_bias_matrix(const ModelSpec& spec) {
    const auto& deg = spec.degree();
    const auto nw = spec.weights().weights().size();
    Matrix b(nw, deg.size());
    for (std::size_t wi = 0; wi < nw; ++wi) {
        const double mass = stub_mass(spec, wi);
        for (std::size_t k = 0; k < deg.size(); ++k)
            b(wi, k) = spec.weights().row(k)[wi] * deg.support()[k] * deg.probabilities()[k] / mass;
    }
    return b;
}

/// Row `di` of sum_w c(w) q(w|d) p~_w(k) for a per-weight coefficient c.
inline std::vector<double> mix_rows(const ModelSpec& spec, const Matrix& bias, std::size_t di,
                                    std::span<const double> coefficient) {
    std::vector<double> out(spec.degree().size(), 0.0);
    const auto q = spec.weights().row(di);
    for (std::size_t wi = 0; wi < q.size(); ++wi) {
        const double c = q[wi] * coefficient[wi];
        if (c == 0.0)
            continue;
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] += c * bias(wi, k);
    }
    return out;
}

/// P^x = (p^x_d(k)) over the full degree support, both axes.
inline Matrix infection_probabilities(const ModelSpec& spec) {
    const auto bias = stub_bias_matrix(spec);
    const auto n = spec.degree().size();
    Matrix px(n, n);
    for (std::size_t d = 0; d < n; ++d) {
        const auto r = mix_rows(spec, bias, d, spec.transmission_values());
        std::copy(r.begin(), r.end(), px.row(d).begin());
    }
    return px;
}

} // namespace detail

/// p~_w(k): degree of the vertex owning a uniformly chosen w-stub.
/// Throws no_stubs_error when no degree carries weight w.
inline DegreeMap stub_weight_bias(const ModelSpec& spec, int w) {
    const auto wi = spec.weights().weight_index(w);
    if (!wi || detail::stub_mass(spec, *wi) <= 0.0)
        throw no_stubs_error(w);
    const auto& deg = spec.degree();
    const double mass = detail::stub_mass(spec, *wi);
    DegreeMap out{{deg.support().begin(), deg.support().end()}, {}};
    for (std::size_t k = 0; k < deg.size(); ++k)
        out.values.push_back(spec.weights().row(k)[*wi] * deg.support()[k] * deg.probabilities()[k] / mass);
    return out;
}

/// p_d(k): degree of a uniformly chosen neighbour of a d-vertex.
inline DegreeMap neighbor_degree(const ModelSpec& spec, int d) {
    const auto di = spec.require_degree(d);
    const std::vector<double> ones(spec.weights().weights().size(), 1.0);
    return {{spec.degree().support().begin(), spec.degree().support().end()},
            detail::mix_rows(spec, detail::stub_bias_matrix(spec), di, ones)};
}

/// p^x_d(k) together with the failure mass p-bar = 1 - sum_k p^x_d(k).
struct InfectionSplit {
    DegreeMap infected;
    double failure = 0.0;
};

/// Probability that a given susceptible neighbour of an infective d-vertex has degree k and is infected.
inline InfectionSplit infect_neighbor_degree(const ModelSpec& spec, int d) {
    const auto di = spec.require_degree(d);
    InfectionSplit out{{{spec.degree().support().begin(), spec.degree().support().end()},
                        detail::mix_rows(spec, detail::stub_bias_matrix(spec), di, spec.transmission_values())},
                       0.0};
    out.failure = std::max(0.0, 1.0 - out.infected.sum());
    return out;
}

/// t(d) = (d-1) E[pi(W) | D = d], the expected number of onward infections from a d-vertex.
inline double infection_pressure(const ModelSpec& spec, int d) {
    const auto di = spec.require_degree(d);
    const auto q = spec.weights().row(di);
    const auto pi = spec.transmission_values();
    double e = 0.0;
    for (std::size_t wi = 0; wi < q.size(); ++wi)
        e += q[wi] * pi[wi];
    return (d - 1) * e;
}

} // namespace wcm
