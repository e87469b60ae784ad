#include "oracles.hpp"
#include "wcm/outbreak.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace wcm;
using Catch::Approx;

namespace {

ModelSpec regular(int d, double p) {
    auto deg = DegreeDistribution::constant(d);
    return {deg, WeightKernel::constant(1, deg.support()), TransmissionFunction::constant(p)};
}

ModelSpec asymmetric() {
    DegreeDistribution deg({{1, 0.3}, {2, 0.2}, {5, 0.5}});
    WeightKernel k({{1, {{1, 1.0}}}, {2, {{1, 0.6}, {2, 0.4}}}, {5, {{1, 0.2}, {2, 0.8}}}});
    return {deg, k, TransmissionFunction::table({{1, 0.3}, {2, 0.9}})};
}

struct BruteForce {
    std::map<int, double> q;
    double rho;
};

/// Fixed-point iteration and index-case mixture written out from the oracle sums.
BruteForce brute_force(const ModelSpec& spec, int index_exponent_offset = 0) {
    const auto m = oracle::from_spec(spec);
    auto inner = [&](int d, const std::map<int, double>& q) {
        double v = 1.0;
        for (const auto& [k, pk] : m.p) {
            const double px = oracle::p_infected(m, d, k);
            v -= px;
            v += px * (k >= 2 ? q.at(k) : 1.0);
        }
        return v;
    };
    std::map<int, double> q;
    for (const auto& [d, pd] : m.p)
        if (d >= 2)
            q[d] = 0.0;
    for (int it = 0; it < 200000; ++it) {
        std::map<int, double> next;
        double step = 0;
        for (const auto& [d, v] : q) {
            next[d] = std::pow(inner(d, q), d - 1);
            step = std::max(step, std::abs(next[d] - v));
        }
        q.swap(next);
        if (step < 1e-14)
            break;
    }
    if (oracle::r0(m) <= 1.0)
        for (auto& [d, v] : q)
            v = 1.0;
    double none = 0;
    for (const auto& [d, pd] : m.p)
        none += pd * std::pow(inner(d, q), d - index_exponent_offset);
    return {q, 1.0 - none};
}

} // namespace

TEST_CASE("generating function", "[outbreak]") {
    const auto spec = asymmetric();
    const std::vector<double> ones{1.0, 1.0}, zeros{0.0, 0.0};
    CHECK(pgf(spec, 2, ones) == Approx(1.0).margin(1e-14));
    CHECK(pgf(spec, 5, ones) == Approx(1.0).margin(1e-14));

    SECTION("only degree-one infections stop the chain") {
        const auto unthinned = ModelSpec(spec.degree(), WeightKernel::constant(1, spec.degree().support()),
                                         TransmissionFunction::constant(1));
        const auto pt = size_biased(spec.degree());
        CHECK(pgf(unthinned, 2, zeros) == Approx(pt(1)).margin(1e-15));
        CHECK(pgf(unthinned, 5, zeros) == Approx(std::pow(pt(1), 4)).margin(1e-15));
    }
    SECTION("no transmission") {
        const auto none = spec.with_transmission(TransmissionFunction::constant(0));
        CHECK(pgf(none, 5, zeros) == 1.0);
    }
    SECTION("monotone in each coordinate") {
        double last = -1;
        for (double x = 0; x <= 1.0; x += 0.1) {
            const std::vector<double> s{x, 0.3};
            const double v = pgf(spec, 5, s);
            CHECK(v >= last);
            CHECK(v <= 1.0);
            last = v;
        }
    }
    SECTION("domain errors") {
        const std::vector<double> bad{1.2, 0.0}, short_s{0.5};
        CHECK_THROWS_AS(pgf(spec, 5, bad), domain_error);
        CHECK_THROWS_AS(pgf(spec, 5, short_s), domain_error);
        CHECK_THROWS_AS(pgf(spec, 1, zeros), domain_error);
        CHECK_THROWS_AS(pgf(spec, 3, zeros), domain_error);
    }
}

TEST_CASE("extinction on regular graphs", "[outbreak]") {
    SECTION("pi == 1 never dies out") {
        const auto s = solve_extinction(regular(3, 1.0));
        CHECK(s.q(3) == 0.0);
        const auto o = analyze_outbreak(regular(3, 1.0));
        CHECK(o.rho == 1.0);
        CHECK(final_size_fraction(regular(3, 1.0)) == 1.0);
    }
    SECTION("Bernoulli thinning matches the quadratic root") {
        for (double p : {0.55, 0.6, 0.75, 0.8, 0.95}) {
            CAPTURE(p);
            const auto s = solve_extinction(regular(3, p));
            const double q = oracle::degree3_extinction(p);
            CHECK(s.q(3) == Approx(q).margin(1e-10));
            CHECK(s.residual < 1e-12);
            // index case has three neighbours instead of two
            CHECK(analyze_outbreak(regular(3, p)).rho == Approx(1 - std::pow(1 - p + p * q, 3)).margin(1e-10));
        }
    }
    SECTION("subcritical and critical return certain extinction") {
        for (double p : {0.2, 0.5}) {
            const auto o = analyze_outbreak(regular(3, p));
            CHECK(o.q(3) == 1.0);
            CHECK(o.rho == 0.0);
            CHECK(o.tau() == 0.0);
        }
    }
}

TEST_CASE("index case uses exponent d", "[outbreak]") {
    const auto spec = asymmetric();
    const auto o = analyze_outbreak(spec);
    REQUIRE(o.r0 > 1.0);
    const auto with_d = brute_force(spec, 0);
    const auto with_d_minus_1 = brute_force(spec, 1);
    CHECK(o.q(2) == Approx(with_d.q.at(2)).margin(1e-10));
    CHECK(o.q(5) == Approx(with_d.q.at(5)).margin(1e-10));
    CHECK(o.rho == Approx(with_d.rho).margin(1e-10));
    CHECK(std::abs(o.rho - with_d_minus_1.rho) > 1e-3);
}

TEST_CASE("degree-one index cases can still start an outbreak", "[outbreak]") {
    DegreeDistribution deg({{1, 0.5}, {4, 0.5}});
    ModelSpec spec(deg, WeightKernel::constant(1, deg.support()), TransmissionFunction::constant(0.8));
    const auto o = analyze_outbreak(spec);
    const auto px = infect_neighbor_degree(spec, 1);
    const double inner1 = px.failure + px.infected(1) + px.infected(4) * o.q(4);
    const auto px4 = infect_neighbor_degree(spec, 4);
    const double inner4 = px4.failure + px4.infected(1) + px4.infected(4) * o.q(4);
    CHECK(o.rho == Approx(1 - 0.5 * inner1 - 0.5 * std::pow(inner4, 4)).margin(1e-12));
    CHECK(inner1 < 1.0);
}

TEST_CASE("outbreak probability input checks", "[outbreak]") {
    const auto spec = asymmetric();
    DegreeMap wrong{{2, 3}, {0.5, 0.5}};
    CHECK_THROWS_AS(outbreak_probability(spec, wrong), domain_error);
    DegreeMap short_q{{2}, {0.5}};
    CHECK_THROWS_AS(outbreak_probability(spec, short_q), domain_error);
    DegreeMap ones{{2, 5}, {1.0, 1.0}};
    CHECK(outbreak_probability(spec, ones) == 0.0);
}

TEST_CASE("threshold and extinction agree on random specs", "[outbreak]") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    int checked = 0;
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<std::pair<int, double>> p;
        double t = 0;
        for (int d = 1; d <= 6; ++d)
            if (u(gen) > 0.4)
                t += p.emplace_back(d, u(gen)).second;
        if (p.empty())
            continue;
        for (auto& e : p)
            e.second /= t;
        DegreeDistribution deg(p);
        std::map<int, WeightKernel::Row> rows;
        for (int d : deg.support()) {
            const double a = u(gen);
            rows[d] = {{1, a}, {2, 1 - a}};
        }
        ModelSpec spec(deg, WeightKernel(rows), TransmissionFunction::table({{1, u(gen)}, {2, u(gen)}}));
        const auto o = analyze_outbreak(spec);
        if (std::abs(o.r0 - 1.0) < 0.02)
            continue;
        ++checked;
        bool below = false;
        for (double v : o.q.values)
            below = below || v < 1 - 10 * 1e-12;
        CAPTURE(rep, o.r0);
        CHECK((o.r0 > 1.0) == below);
        CHECK(o.residual < 1e-12);
        CHECK((o.rho == 0.0) == !below);
        const auto bf = brute_force(spec);
        CHECK(o.rho == Approx(bf.rho).margin(1e-9));
    }
    CHECK(checked > 100);
}
