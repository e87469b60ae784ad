#pragma once

// Major-outbreak probability from the multi-type branching process.
//
// An infective d-vertex (not the index case) has d-1 susceptible neighbours; the numbers it
// infects of each degree, plus the failures, are Multinomial(d-1; p^x_d(1..K), p-bar).
// With the generating function
//
//   f_d(s) = (p^x_d(1) + sum_{k>=2} s_k p^x_d(k) + p-bar_d)^(d-1),
//
// the extinction probabilities q = (q_d)_{d>=2} are the smallest solution of q = f(q), and
//
//   1 - rho = sum_d p(d) (p^x_d(1) + sum_{k>=2} q_k p^x_d(k) + p-bar_d)^d
//
// where the index case uses exponent d because all its neighbours are susceptible.
// In the large-population limit rho also equals the final-size fraction tau of a major outbreak.

#include "wcm/threshold.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace wcm {

struct OutbreakOptions {
    double tolerance = 1e-12;
    std::size_t max_iterations = 1'000'000;
};

/// R0 at or below 1 + this band is treated as critical or subcritical (q == 1).
inline constexpr double kCriticalBand = 1e-9;

struct ExtinctionSolution {
    DegreeMap q; ///< over degrees >= 2 in the support
    double r0 = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0; ///< |q - f(q)|_inf at termination
};

struct OutbreakSolution {
    DegreeMap q;
    double rho = 0.0;
    double r0 = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;
    double tau() const noexcept { return rho; }
};

namespace detail {

/// Infection split per degree, stored for repeated generating-function evaluations.
struct OffspringLaw {
    std::vector<int> degrees;
    std::vector<std::size_t> fertile; ///< indices into degrees with d >= 2
    Matrix px;                        ///< p^x_d(k)
    std::vector<double> base;         ///< p^x_d(1) + p-bar_d, the mass that never spreads further

    explicit OffspringLaw(const ModelSpec& spec)
        : degrees(spec.degree().support().begin(), spec.degree().support().end()),
          px(infection_probabilities(spec)) {
        for (std::size_t i = 0; i < degrees.size(); ++i)
            if (degrees[i] >= 2)
                fertile.push_back(i);
        for (std::size_t d = 0; d < degrees.size(); ++d) {
            double infected = 0.0;
            for (double v : px.row(d))
                infected += v;
            const double failure = std::max(0.0, 1.0 - infected);
            base.push_back(failure + (degrees[0] == 1 ? px(d, 0) : 0.0));
        }
    }

    /// p^x_d(1) + sum_{k>=2} s_k p^x_d(k) + p-bar_d for the degree at index d; s over `fertile`.
    double inner(std::size_t d, std::span<const double> s) const {
        double v = base[d];
        for (std::size_t j = 0; j < fertile.size(); ++j)
            v += s[j] * px(d, fertile[j]);
        return std::min(v, 1.0);
    }
};

inline void check_unit_vector(std::span<const double> s, std::size_t expected, const char* what) {
    if (s.size() != expected)
        throw domain_error(std::string(what) + ": expected " + std::to_string(expected) + " entries, got " +
                           std::to_string(s.size()));
    for (double v : s)
        if (!(v >= 0.0 && v <= 1.0))
            throw domain_error(std::string(what) + ": entries must lie in [0,1]");
}

} // namespace detail

/// f_d(s) for d >= 2; s is indexed by the support degrees >= 2 in increasing order.
inline double pgf(const ModelSpec& spec, int d, std::span<const double> s) {
    if (d < 2)
        throw domain_error("pgf is defined for degrees >= 2");
    const auto di = spec.require_degree(d);
    const detail::OffspringLaw law(spec);
    detail::check_unit_vector(s, law.fertile.size(), "pgf");
    return std::pow(law.inner(di, s), d - 1);
}

/// Smallest fixed point of q = f(q), by iteration from q = 0.
/// Returns q == 1 directly when R0 <= 1.
inline ExtinctionSolution solve_extinction(const ModelSpec& spec, const OutbreakOptions& opt = {}) {
    const detail::OffspringLaw law(spec);
    ExtinctionSolution sol;
    sol.r0 = r0(spec);
    for (auto i : law.fertile)
        sol.q.degrees.push_back(law.degrees[i]);
    const auto n = law.fertile.size();

    if (sol.r0 <= 1.0 + kCriticalBand) {
        sol.q.values.assign(n, 1.0);
        return sol;
    }

    std::vector<double> q(n, 0.0), next(n);
    auto apply = [&](std::span<const double> from, std::span<double> to) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto d = law.fertile[j];
            to[j] = std::pow(law.inner(d, from), law.degrees[d] - 1);
        }
    };
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        apply(q, next);
        double step = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            assert(next[j] >= q[j] - 1e-14 && next[j] <= 1.0);
            step = std::max(step, std::abs(next[j] - q[j]));
        }
        q.swap(next);
        if (step < opt.tolerance) {
            apply(q, next);
            for (std::size_t j = 0; j < n; ++j)
                sol.residual = std::max(sol.residual, std::abs(next[j] - q[j]));
            sol.q.values = q;
            sol.iterations = it;
            return sol;
        }
    }
    apply(q, next);
    throw numerical_failure("extinction iteration did not converge within " + std::to_string(opt.max_iterations) +
                                " steps (R0 = " + std::to_string(sol.r0) +
                                "); convergence is slow near R0 = 1, try a wider tolerance",
                            q, {next.begin(), next.end()});
}

/// rho = 1 - sum_d p(d) (p^x_d(1) + sum_{k>=2} q_k p^x_d(k) + p-bar_d)^d.
inline double outbreak_probability(const ModelSpec& spec, const DegreeMap& q) {
    const detail::OffspringLaw law(spec);
    if (q.size() != law.fertile.size())
        throw domain_error("outbreak_probability: extinction vector does not match the model");
    for (std::size_t j = 0; j < law.fertile.size(); ++j)
        if (q.degrees[j] != law.degrees[law.fertile[j]])
            throw domain_error("outbreak_probability: extinction vector degrees do not match the model");
    detail::check_unit_vector(q.values, law.fertile.size(), "outbreak_probability");
    if (std::all_of(q.values.begin(), q.values.end(), [](double v) { return v == 1.0; }))
        return 0.0;

    const auto p = spec.degree().probabilities();
    double no_outbreak = 0.0;
    for (std::size_t d = 0; d < law.degrees.size(); ++d)
        no_outbreak += p[d] * std::pow(law.inner(d, q.values), law.degrees[d]);
    return std::clamp(1.0 - no_outbreak, 0.0, 1.0);
}

inline OutbreakSolution analyze_outbreak(const ModelSpec& spec, const OutbreakOptions& opt = {}) {
    auto ext = solve_extinction(spec, opt);
    OutbreakSolution out;
    out.rho = outbreak_probability(spec, ext.q);
    out.q = std::move(ext.q);
    out.r0 = ext.r0;
    out.iterations = ext.iterations;
    out.residual = ext.residual;
    return out;
}

/// Limiting fraction infected in a major outbreak; equal to the outbreak probability.
inline double final_size_fraction(const ModelSpec& spec, const OutbreakOptions& opt = {}) {
    return analyze_outbreak(spec, opt).rho;
}

} // namespace wcm
