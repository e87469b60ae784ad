#pragma once

// Fitting the model to an empirical count table:
//   p^(d)   = n(d) / n
//   q^(w|d) = n(w,d) / sum_v n(v,d)
// plus summary statistics and R0-versus-s curves against the degree-independent baseline.

#include "wcm/edge_table.hpp"
#include "wcm/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace wcm {

struct FittedModel {
    DegreeDistribution degree;
    WeightKernel weights;

    ModelSpec with(TransmissionFunction t) const { return {degree, weights, std::move(t)}; }
};

inline FittedModel estimate(const EdgeWeightTable& table) {
    table.validate();
    const auto nd = table.vertices_by_degree();
    const auto stubs = table.stubs_by_degree();
    const double n = static_cast<double>(table.vertex_count());

    std::vector<std::pair<int, double>> p;
    for (const auto& [d, c] : nd)
        p.emplace_back(d, static_cast<double>(c) / n);

    std::map<int, WeightKernel::Row> rows;
    for (const auto& [key, c] : table.counts()) {
        const auto [w, d] = key;
        rows[d].emplace_back(w, static_cast<double>(c) / static_cast<double>(stubs.at(d)));
    }
    return {DegreeDistribution(std::move(p)), WeightKernel(rows)};
}

/// Coarsens weights: every w present in `bins` is replaced by bins.at(w); others are kept.
inline EdgeWeightTable rebin(const EdgeWeightTable& table, const std::map<int, int>& bins) {
    EdgeWeightTable out;
    for (const auto& [key, c] : table.counts()) {
        const auto it = bins.find(key.first);
        out.add(it == bins.end() ? key.first : it->second, key.second, c);
    }
    return out;
}

struct NetworkSummary {
    long long n = 0;
    double links = 0.0;
    double mean_degree = 0.0;
    double stdev_degree = 0.0;
    /// Pearson correlation of endpoint degrees over edges; needs the edge list.
    std::optional<double> assortativity;
    double mean_weight = 0.0;
    double stdev_weight = 0.0;
    /// Pearson correlation of (degree, weight) over stub records.
    double degree_weight_correlation = 0.0;
    int degree_weight_sign = 0;
};

namespace detail {

struct Moments {
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    void add(double x, double y, double weight = 1.0) {
        n += weight;
        sx += weight * x;
        sy += weight * y;
        sxx += weight * x * x;
        syy += weight * y * y;
        sxy += weight * x * y;
    }
    double mean_x() const { return sx / n; }
    double mean_y() const { return sy / n; }
    double var_x() const { return std::max(0.0, sxx / n - mean_x() * mean_x()); }
    double var_y() const { return std::max(0.0, syy / n - mean_y() * mean_y()); }
    std::optional<double> correlation() const {
        const double denom = std::sqrt(var_x() * var_y());
        if (!(denom > 0.0))
            return std::nullopt;
        return std::clamp((sxy / n - mean_x() * mean_y()) / denom, -1.0, 1.0);
    }
};

} // namespace detail

/// Table-level statistics; standard deviations are population (divide by N) values.
inline NetworkSummary summarize(const EdgeWeightTable& table, const WeightedGraph* graph = nullptr) {
    table.validate();
    NetworkSummary s;
    s.n = table.vertex_count();
    s.links = static_cast<double>(table.stub_count()) / 2.0;

    detail::Moments deg;
    for (const auto& [d, c] : table.vertices_by_degree())
        deg.add(d, 0.0, static_cast<double>(c));
    s.mean_degree = deg.mean_x();
    s.stdev_degree = std::sqrt(deg.var_x());

    detail::Moments dw; // x = degree, y = weight, one record per stub
    for (const auto& [key, c] : table.counts())
        dw.add(key.second, key.first, static_cast<double>(c));
    s.mean_weight = dw.mean_y();
    s.stdev_weight = std::sqrt(dw.var_y());
    s.degree_weight_correlation = dw.correlation().value_or(0.0);
    s.degree_weight_sign = (s.degree_weight_correlation > 0) - (s.degree_weight_correlation < 0);

    if (graph) {
        const auto rd = graph->realized_degrees();
        detail::Moments ends;
        for (const auto& e : graph->edges) {
            ends.add(rd[e.u], rd[e.v]);
            ends.add(rd[e.v], rd[e.u]);
        }
        if (ends.n > 0)
            s.assortativity = ends.correlation();
    }
    return s;
}

/// pi for a one-parameter family at s.
inline TransmissionFunction transmission_family(TransmissionFunction::Family family, double s) {
    switch (family) {
    case TransmissionFunction::Family::constant:
        return TransmissionFunction::constant(s);
    case TransmissionFunction::Family::per_contact:
        return TransmissionFunction::per_contact(s);
    case TransmissionFunction::Family::shifted_per_contact:
        return TransmissionFunction::shifted_per_contact(s);
    case TransmissionFunction::Family::table:
        break;
    }
    throw domain_error("a tabulated transmission function has no parameter to sweep");
}

struct CurveRow {
    double s = 0.0;
    double r0 = 0.0;
    double r0_reshuffled = 0.0;
};

/// R0 of the fitted model and of its reshuffled counterpart at each s in `grid`.
inline std::vector<CurveRow> r0_curve(const EdgeWeightTable& table, TransmissionFunction::Family family,
                                      std::span<const double> grid) {
    for (double s : grid)
        if (!(s >= 0.0 && s <= 1.0))
            throw domain_error("r0_curve: grid values must lie in [0,1]");
    const auto fit = estimate(table);
    const auto base = fit.with(transmission_family(family, 0.0));
    const auto shuffled = reshuffled_spec(base);
    std::vector<CurveRow> rows;
    for (double s : grid) {
        const auto t = transmission_family(family, s);
        rows.push_back({s, r0(base.with_transmission(t)), r0(shuffled.with_transmission(t))});
    }
    return rows;
}

} // namespace wcm
