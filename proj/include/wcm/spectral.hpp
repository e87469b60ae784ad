#pragma once

#include "wcm/error.hpp"
#include "wcm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace wcm {

struct PowerIterationOptions {
    double relative_tolerance = 1e-12;
    std::size_t max_iterations = 100'000;
    /// Repeated squarings tried when plain iteration does not settle.
    std::size_t max_squarings = 40;
};

struct SpectralRadius {
    double value = 0.0;
    std::size_t iterations = 0;
    std::size_t squarings = 0;
};

namespace detail {

struct PowerRun {
    bool converged = false;
    double estimate = 0.0;
    double previous = 0.0;
    std::size_t iterations = 0;
    std::vector<double> vector;
};

// Rayleigh-quotient power iteration from the all-ones vector.
inline PowerRun power_run(const Matrix& a, const PowerIterationOptions& opt) {
    const auto n = a.rows();
    PowerRun run;
    run.vector.assign(n, 1.0);
    std::vector<double> y(n);
    double prev = NAN;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        a.multiply(run.vector, y);
        double xy = 0.0, xx = 0.0, ymax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xy += run.vector[i] * y[i];
            xx += run.vector[i] * run.vector[i];
            ymax = std::max(ymax, y[i]);
        }
        run.iterations = it;
        if (ymax == 0.0) { // nilpotent: A^k x = 0
            run.converged = true;
            run.previous = run.estimate;
            run.estimate = 0.0;
            return run;
        }
        const double lambda = xy / xx;
        for (std::size_t i = 0; i < n; ++i)
            run.vector[i] = y[i] / ymax;
        run.previous = std::isnan(prev) ? lambda : prev;
        run.estimate = lambda;
        if (!std::isnan(prev) && std::abs(lambda - prev) <= opt.relative_tolerance * std::abs(lambda)) {
            run.converged = true;
            return run;
        }
        prev = lambda;
    }
    return run;
}

} // namespace detail

/// Spectral radius of a non-negative square matrix.
///
/// Power iteration from a strictly positive start vector converges to the Perron root;
/// for reducible matrices it picks up the dominant block. If the estimate has not settled
/// within max_iterations the matrix is squared (rescaled each time) and iteration restarts,
/// which separates eigenvalues of equal modulus. Throws numerical_failure when that also fails.
inline SpectralRadius spectral_radius(const Matrix& a, const PowerIterationOptions& opt = {}) {
    if (a.rows() != a.cols())
        throw domain_error("spectral_radius: matrix is not square");
    if (a.empty())
        return {};
    for (double v : a.values())
        if (v < 0.0 || !std::isfinite(v))
            throw domain_error("spectral_radius: matrix must be finite and non-negative");

    auto run = detail::power_run(a, opt);
    std::size_t total = run.iterations;
    if (run.converged)
        return {run.estimate, total, 0};

    // B holds A^(2^k) rescaled to unit max entry; the scales accumulate in log_scale
    Matrix b = a;
    double log_scale = 0.0; // log rho(A) = log_scale + log rho(B) / 2^k
    double exponent = 1.0;
    for (std::size_t k = 1; k <= opt.max_squarings; ++k) {
        b = b * b;
        exponent *= 2.0;
        const double m = *std::max_element(b.values().begin(), b.values().end());
        if (m == 0.0)
            return {0.0, total, k};
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (double& v : b.row(r))
                v /= m;
        log_scale += std::log(m) / exponent;
        auto sq = detail::power_run(b, opt);
        total += sq.iterations;
        if (sq.converged) {
            const double value = sq.estimate > 0.0 ? std::exp(log_scale + std::log(sq.estimate) / exponent) : 0.0;
            return {value, total, k};
        }
        run = std::move(sq);
    }
    throw numerical_failure("spectral radius did not converge", {run.previous}, {run.estimate});
}

/// True when the directed graph of non-zero entries is strongly connected.
inline bool is_irreducible(const Matrix& a) {
    const auto n = a.rows();
    if (n <= 1)
        return true;
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                const double v = transpose ? a(j, i) : a(i, j);
                if (v > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

} // namespace wcm
