#pragma once

// Parameterization of the weighted configuration model: degree distribution p(d),
// degree-conditional stub weight kernel q(w|d) and weight-dependent transmission pi(w).
// All types validate on construction and are immutable afterwards.

#include "wcm/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wcm {

/// Rows whose total deviates from 1 by at most this much are accepted unchanged.
inline constexpr double kSumTolerance = 1e-12;
/// Rows deviating by more than kSumTolerance but at most this much are renormalized; worse rows are rejected.
inline constexpr double kRenormalizeTolerance = 1e-9;

namespace detail {

inline void check_probability(double p, const std::string& what) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kRenormalizeTolerance)
        throw spec_error(what + ": probability " + std::to_string(p) + " outside [0,1]");
}

/// Sorts by key, rejects duplicates, drops zero entries and enforces the sum-to-one policy.
inline std::vector<std::pair<int, double>> normalize_pmf(std::vector<std::pair<int, double>> entries,
                                                         const std::string& what) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].first == entries[i - 1].first)
            throw spec_error(what + ": duplicate entry " + std::to_string(entries[i].first));
    for (const auto& [key, p] : entries)
        check_probability(p, what + " entry " + std::to_string(key));
    std::erase_if(entries, [](const auto& e) { return e.second == 0.0; });
    if (entries.empty())
        throw spec_error(what + ": no positive probabilities");

    double total = 0.0;
    for (const auto& e : entries)
        total += e.second;
    const double deviation = std::abs(total - 1.0);
    if (deviation > kRenormalizeTolerance)
        throw spec_error(what + ": probabilities sum to " + std::to_string(total));
    if (deviation > kSumTolerance)
        for (auto& e : entries)
            e.second /= total;
    return entries;
}

inline double poisson_log_pmf(int k, double mean) {
    if (mean == 0.0)
        return k == 0 ? 0.0 : -INFINITY;
    return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

/// Poisson(mean) restricted to [lo, hi] and renormalized.
inline std::vector<std::pair<int, double>> truncated_poisson(double mean, int lo, int hi) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw spec_error("poisson mean must be finite and non-negative");
    if (lo > hi)
        throw spec_error("poisson truncation bounds are empty");
    std::vector<std::pair<int, double>> out;
    double peak = -INFINITY;
    for (int k = lo; k <= hi; ++k)
        peak = std::max(peak, poisson_log_pmf(k, mean));
    if (!std::isfinite(peak))
        throw spec_error("poisson truncation window carries no mass");
    double total = 0.0;
    for (int k = lo; k <= hi; ++k) {
        const double v = std::exp(poisson_log_pmf(k, mean) - peak);
        out.emplace_back(k, v);
        total += v;
    }
    for (auto& e : out)
        e.second /= total;
    return out;
}

} // namespace detail

/// Values indexed by an explicit sorted degree support.
struct DegreeMap {
    std::vector<int> degrees;
    std::vector<double> values;

    /// Value at degree d; 0 when d is not in the support.
    double operator()(int d) const {
        const auto it = std::lower_bound(degrees.begin(), degrees.end(), d);
        return (it != degrees.end() && *it == d) ? values[static_cast<std::size_t>(it - degrees.begin())] : 0.0;
    }
    double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
    std::size_t size() const noexcept { return degrees.size(); }
};

/// Degree distribution p(d) with finite support on d >= 1.
class DegreeDistribution {
public:
    explicit DegreeDistribution(std::vector<std::pair<int, double>> pmf) {
        for (const auto& [d, p] : pmf)
            if (d < 1)
                throw spec_error("degree distribution: degree " + std::to_string(d) + " is not positive");
        for (const auto& [d, p] : detail::normalize_pmf(std::move(pmf), "degree distribution")) {
            support_.push_back(d);
            prob_.push_back(p);
        }
    }

    static DegreeDistribution constant(int d) { return DegreeDistribution({{d, 1.0}}); }

    /// Poisson(mean) conditioned on [min_degree, max_degree].
    static DegreeDistribution poisson(double mean, int min_degree, int max_degree) {
        if (min_degree < 1)
            throw spec_error("poisson degree distribution: lower bound must be >= 1");
        return DegreeDistribution(detail::truncated_poisson(mean, min_degree, max_degree));
    }

    std::span<const int> support() const noexcept { return support_; }
    std::span<const double> probabilities() const noexcept { return prob_; }
    std::size_t size() const noexcept { return support_.size(); }
    int max_degree() const noexcept { return support_.back(); }

    std::optional<std::size_t> index_of(int d) const {
        const auto it = std::lower_bound(support_.begin(), support_.end(), d);
        if (it == support_.end() || *it != d)
            return std::nullopt;
        return static_cast<std::size_t>(it - support_.begin());
    }
    double probability(int d) const {
        const auto i = index_of(d);
        return i ? prob_[*i] : 0.0;
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            m += support_[i] * prob_[i];
        return m;
    }
    double variance() const {
        const double mu = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            v += (support_[i] - mu) * (support_[i] - mu) * prob_[i];
        return v;
    }

    friend bool operator==(const DegreeDistribution&, const DegreeDistribution&) = default;

private:
    std::vector<int> support_;
    std::vector<double> prob_;
};

/// Stub weight kernel q(w|d): one weight distribution per degree, stored densely over the
/// union of all weights that carry positive probability in some row.
class WeightKernel {
public:
    using Row = std::vector<std::pair<int, double>>;

    explicit WeightKernel(const std::map<int, Row>& rows) {
        if (rows.empty())
            throw spec_error("weight kernel has no rows");
        std::vector<Row> normalized;
        for (const auto& [d, row] : rows) {
            for (const auto& [w, q] : row)
                if (w < 0)
                    throw spec_error("weight kernel: negative weight " + std::to_string(w));
            degrees_.push_back(d);
            normalized.push_back(detail::normalize_pmf(row, "weight kernel row d=" + std::to_string(d)));
            for (const auto& [w, q] : normalized.back())
                weights_.push_back(w);
        }
        std::sort(weights_.begin(), weights_.end());
        weights_.erase(std::unique(weights_.begin(), weights_.end()), weights_.end());
        dense_.assign(degrees_.size() * weights_.size(), 0.0);
        for (std::size_t i = 0; i < normalized.size(); ++i)
            for (const auto& [w, q] : normalized[i])
                dense_[i * weights_.size() + *weight_index(w)] = q;
    }

    /// The same row q(w) for every degree in `degrees`.
    static WeightKernel independent(const Row& row, std::span<const int> degrees) {
        std::map<int, Row> rows;
        for (int d : degrees)
            rows[d] = row;
        return WeightKernel(rows);
    }

    /// Every stub gets weight w.
    static WeightKernel constant(int w, std::span<const int> degrees) { return independent({{w, 1.0}}, degrees); }

    /// Row d is Poisson(mean_of(d)) truncated to [0, max_weight] and renormalized.
    static WeightKernel poisson(std::span<const int> degrees, const std::function<double(int)>& mean_of,
                                int max_weight) {
        std::map<int, Row> rows;
        for (int d : degrees)
            rows[d] = detail::truncated_poisson(mean_of(d), 0, max_weight);
        return WeightKernel(rows);
    }

    /// Two weights low < high with q(high|d) = high_probability(d).
    static WeightKernel two_point(std::span<const int> degrees, int low, int high,
                                  const std::function<double(int)>& high_probability) {
        std::map<int, Row> rows;
        for (int d : degrees) {
            const double ph = high_probability(d);
            rows[d] = {{low, 1.0 - ph}, {high, ph}};
        }
        return WeightKernel(rows);
    }

    std::span<const int> degrees() const noexcept { return degrees_; }
    std::span<const int> weights() const noexcept { return weights_; }
    int max_weight() const noexcept { return weights_.back(); }

    std::optional<std::size_t> weight_index(int w) const {
        const auto it = std::lower_bound(weights_.begin(), weights_.end(), w);
        if (it == weights_.end() || *it != w)
            return std::nullopt;
        return static_cast<std::size_t>(it - weights_.begin());
    }
    std::optional<std::size_t> degree_index(int d) const {
        const auto it = std::lower_bound(degrees_.begin(), degrees_.end(), d);
        if (it == degrees_.end() || *it != d)
            return std::nullopt;
        return static_cast<std::size_t>(it - degrees_.begin());
    }

    /// Row for the degree at `degree_index`, dense over weights().
    std::span<const double> row(std::size_t degree_index) const {
        return {dense_.data() + degree_index * weights_.size(), weights_.size()};
    }

    double probability(int w, int d) const {
        const auto di = degree_index(d);
        const auto wi = weight_index(w);
        return (di && wi) ? row(*di)[*wi] : 0.0;
    }

    /// True when all rows are the same distribution.
    bool is_degree_independent() const {
        for (std::size_t i = 1; i < degrees_.size(); ++i)
            if (!std::equal(row(i).begin(), row(i).end(), row(0).begin()))
                return false;
        return true;
    }

    friend bool operator==(const WeightKernel&, const WeightKernel&) = default;

private:
    std::vector<int> degrees_;
    std::vector<int> weights_;
    std::vector<double> dense_;
};

/// Transmission probability pi(w) of an edge with weight w.
class TransmissionFunction {
public:
    enum class Family { constant, per_contact, shifted_per_contact, table };

    /// pi(w) = p
    static TransmissionFunction constant(double p) { return TransmissionFunction(Family::constant, p); }
    /// pi(w) = 1 - (1-s)^w
    static TransmissionFunction per_contact(double s) { return TransmissionFunction(Family::per_contact, s); }
    /// pi(w) = 1 - (1-s)^(w+1)
    static TransmissionFunction shifted_per_contact(double s) {
        return TransmissionFunction(Family::shifted_per_contact, s);
    }
    static TransmissionFunction table(std::map<int, double> values) {
        for (const auto& [w, p] : values) {
            if (w < 0)
                throw spec_error("transmission table: negative weight " + std::to_string(w));
            if (!(p >= 0.0 && p <= 1.0))
                throw spec_error("transmission table: pi(" + std::to_string(w) + ") outside [0,1]");
        }
        TransmissionFunction t(Family::table, 0.0);
        t.table_ = std::move(values);
        return t;
    }

    Family family() const noexcept { return family_; }
    double parameter() const noexcept { return parameter_; }
    const std::map<int, double>& table_values() const noexcept { return table_; }

    bool covers(int w) const { return w >= 0 && (family_ != Family::table || table_.contains(w)); }

    double operator()(int w) const {
        if (w < 0)
            throw domain_error("transmission: negative weight");
        switch (family_) {
        case Family::constant:
            return parameter_;
        case Family::per_contact:
            return 1.0 - std::pow(1.0 - parameter_, w);
        case Family::shifted_per_contact:
            return 1.0 - std::pow(1.0 - parameter_, w + 1);
        case Family::table:
            break;
        }
        const auto it = table_.find(w);
        if (it == table_.end())
            throw domain_error("transmission table has no value for weight " + std::to_string(w));
        return it->second;
    }

    friend bool operator==(const TransmissionFunction&, const TransmissionFunction&) = default;

private:
    TransmissionFunction(Family f, double parameter) : family_(f), parameter_(parameter) {
        if (f != Family::table && !(parameter >= 0.0 && parameter <= 1.0))
            throw spec_error("transmission parameter " + std::to_string(parameter) + " outside [0,1]");
    }

    Family family_;
    double parameter_;
    std::map<int, double> table_;
};

/// Full model: degree distribution, weight kernel with one row per supported degree, and a
/// transmission function defined on every weight in the kernel support.
class ModelSpec {
public:
    ModelSpec(DegreeDistribution degree, WeightKernel weights, TransmissionFunction transmission)
        : degree_(std::move(degree)), weights_(std::move(weights)), transmission_(std::move(transmission)) {
        const auto ds = degree_.support();
        const auto ks = weights_.degrees();
        for (int d : ds)
            if (!weights_.degree_index(d))
                throw spec_error("weight kernel has no row for degree " + std::to_string(d));
        for (int d : ks)
            if (!degree_.index_of(d))
                throw spec_error("weight kernel row for degree " + std::to_string(d) +
                                 " which is not in the degree support");
        for (int w : weights_.weights()) {
            if (!transmission_.covers(w))
                throw spec_error("transmission function does not cover weight " + std::to_string(w));
            pi_.push_back(transmission_(w));
        }
    }

    const DegreeDistribution& degree() const noexcept { return degree_; }
    const WeightKernel& weights() const noexcept { return weights_; }
    const TransmissionFunction& transmission() const noexcept { return transmission_; }

    /// pi(w) for each weight in weights().weights(), same order.
    std::span<const double> transmission_values() const noexcept { return pi_; }

    ModelSpec with_transmission(TransmissionFunction t) const { return {degree_, weights_, std::move(t)}; }
    ModelSpec with_weights(WeightKernel k) const { return {degree_, std::move(k), transmission_}; }

    /// Index of degree d in the support, or domain_error.
    std::size_t require_degree(int d) const {
        const auto i = degree_.index_of(d);
        if (!i)
            throw domain_error("degree " + std::to_string(d) + " is not in the degree support");
        return *i;
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

private:
    DegreeDistribution degree_;
    WeightKernel weights_;
    TransmissionFunction transmission_;
    std::vector<double> pi_;
};

} // namespace wcm
