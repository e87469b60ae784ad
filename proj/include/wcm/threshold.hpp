#pragma once

// Mean offspring matrix of the degree-typed branching process and the epidemic threshold.
//
// m_dk = (d-1) sum_w pi(w) q(w|d) p~_w(k) = (A B)_dk with
//   a_dw = (d-1) pi(w) q(w|d)    expected transmitting w-edges of an infected d-vertex
//   b_wk = p~_w(k)               degree at the far end of a w-edge
//
// Degree-1 vertices never pass the infection on, so R0 is the spectral radius of M2,
// the restriction of M to degrees >= 2.

#include "wcm/model.hpp"
#include "wcm/spectral.hpp"

#include <vector>

namespace wcm {

struct OffspringMatrix {
    std::vector<int> degrees; ///< full degree support
    std::vector<int> weights; ///< kernel weight support
    Matrix full;              ///< m_dk over degrees x degrees
    Matrix a;                 ///< degrees x weights
    Matrix b;                 ///< weights x degrees
    std::vector<int> fertile_degrees; ///< support restricted to d >= 2
    Matrix m2;                        ///< m_dk over fertile_degrees
};

inline OffspringMatrix offspring_matrix(const ModelSpec& spec) {
    OffspringMatrix om;
    const auto& deg = spec.degree();
    om.degrees.assign(deg.support().begin(), deg.support().end());
    om.weights.assign(spec.weights().weights().begin(), spec.weights().weights().end());
    const auto pi = spec.transmission_values();

    om.a = Matrix(om.degrees.size(), om.weights.size());
    for (std::size_t i = 0; i < om.degrees.size(); ++i) {
        const auto q = spec.weights().row(i);
        for (std::size_t w = 0; w < om.weights.size(); ++w)
            om.a(i, w) = (om.degrees[i] - 1) * pi[w] * q[w];
    }
    om.b = detail::stub_bias_matrix(spec);
    om.full = om.a * om.b;

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < om.degrees.size(); ++i)
        if (om.degrees[i] >= 2) {
            keep.push_back(i);
            om.fertile_degrees.push_back(om.degrees[i]);
        }
    om.m2 = Matrix(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j)
            om.m2(i, j) = om.full(keep[i], keep[j]);
    return om;
}

struct R0Estimate {
    double value = 0.0;
    /// M2 is reducible: some degree classes cannot reach each other, so a single threshold
    /// may not describe every component.
    bool reducible = false;
    std::size_t iterations = 0;
};

/// R0 with diagnostics. The Perron bounds min-row-sum <= R0 <= max-row-sum are checked on
/// every solve; a violation is reported as numerical_failure.
inline R0Estimate r0_estimate(const ModelSpec& spec, const PowerIterationOptions& opt = {}) {
    const auto om = offspring_matrix(spec);
    if (om.m2.empty())
        return {};
    const auto sr = spectral_radius(om.m2, opt);

    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < om.m2.rows(); ++i) {
        double s = 0.0;
        for (double v : om.m2.row(i))
            s += v;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double slack = 1e-9 * std::max(1.0, hi);
    if (sr.value < lo - slack || sr.value > hi + slack)
        throw numerical_failure("R0 estimate violates the row-sum bounds", {lo, hi}, {sr.value});

    return {sr.value, !is_irreducible(om.m2), sr.iterations};
}

/// Basic reproduction number: spectral radius of M2; 0 when no degree >= 2 is supported.
inline double r0(const ModelSpec& spec) { return r0_estimate(spec).value; }

/// R0 with pi == 1, the threshold for a giant component in the unthinned graph.
inline double giant_component_threshold(const DegreeDistribution& degree, const WeightKernel& weights) {
    return r0(ModelSpec(degree, weights, TransmissionFunction::constant(1.0)));
}

/// Same model with weights assigned independently of degree:
/// q(w) = sum_k p~(k) q(w|k), the marginal weight distribution of a uniformly random stub.
inline ModelSpec reshuffled_spec(const ModelSpec& spec) {
    if (spec.weights().is_degree_independent())
        return spec;
    const auto pt = size_biased(spec.degree());
    const auto ws = spec.weights().weights();
    WeightKernel::Row marginal;
    for (std::size_t wi = 0; wi < ws.size(); ++wi) {
        double q = 0.0;
        for (std::size_t k = 0; k < pt.size(); ++k)
            q += pt.values[k] * spec.weights().row(k)[wi];
        marginal.emplace_back(ws[wi], q);
    }
    return spec.with_weights(WeightKernel::independent(marginal, spec.degree().support()));
}

} // namespace wcm
