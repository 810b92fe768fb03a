#include "doctest.h"
#include "support.hpp"

#include <random>

using namespace mixlab;
using namespace mixlab::test;

TEST_CASE("hoelder seminorm") {
    auto g = unit_grid(1024);
    CHECK(holder_seminorm(sample(g, [](double) { return 3.0; }), 0.5) == 0.0);
    CHECK(holder_seminorm(sample(g, [](double x) { return x; }), 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(holder_seminorm(sample(g, [](double x) { return x; }), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("seminorm is monotone under refinement") {
    auto f = [](double x) { return std::sin(7 * x) + std::sqrt(std::abs(x - 0.3)); };
    double prev = 0.0;
    for (int n = 64; n <= 8192; n *= 2) {
        double s = holder_seminorm(sample(unit_grid(n), f), 0.5);
        CHECK(s >= prev - 1e-12);
        prev = s;
    }
}

TEST_CASE("theta-b norm") {
    auto g = unit_grid(4096);
    auto one = sample(g, [](double) { return 1.0; });
    auto r = norm_theta_b(one, 0.5, 100.0);
    CHECK(r.c0 == 1.0);
    CHECK(r.seminorm == 0.0);
    CHECK(r.norm == 1.0);
    auto s = sample(g, [](double x) { return std::sin(2 * kPi * x); });
    CHECK(norm_theta_b(s, 1.0, 100.0).norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm_theta_b(s, 1.0, 1.0).norm == doctest::Approx(2 * kPi).epsilon(1e-5));
    CHECK(norm_theta_b(s, 1.0).norm == doctest::Approx(1 + 2 * kPi).epsilon(1e-5));
}

TEST_CASE("theta-b norm is subadditive") {
    auto g = unit_grid(512);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        double a1 = U(rng), a2 = U(rng), k1 = 1 + 9 * std::abs(U(rng)), k2 = 1 + 9 * std::abs(U(rng));
        auto u = sample(g, [&](double x) { return a1 * std::sin(k1 * x); });
        auto v = sample(g, [&](double x) { return a2 * std::cos(k2 * x * x); });
        RealFunction w(g);
        for (std::size_t i = 0; i < g->size(); ++i) w.values()[i] = u.values()[i] + v.values()[i];
        double b = 1 + 50 * std::abs(U(rng));
        CHECK(norm_theta_b(w, 0.5, b).norm <= norm_theta_b(u, 0.5, b).norm + norm_theta_b(v, 0.5, b).norm + 1e-12);
    }
}

TEST_CASE("oscillation") {
    auto g = unit_grid(4096);
    CHECK(oscillation(sample(g, [](double) { return 2.0; }), {0, 0.0, 1.0}) == 0.0);
    auto s = sample(g, [](double x) { return std::sin(2 * kPi * x); });
    CHECK(oscillation(s, {0, 0.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(oscillation(sample(g, [](double x) { return x; }), {0, 0.25, 0.75}) == doctest::Approx(0.5));
    CHECK(oscillation(s, {0, 0.1, 0.4}) <= 2.0 * c0_norm(s));
    CHECK_THROWS_AS(oscillation(s, {0, 0.50001, 0.50002}), DomainError);
}

TEST_CASE("minimax approximation") {
    std::vector<double> xs, sq, ab;
    for (int i = 0; i <= 2000; ++i) {
        double s = -1.0 + i / 1000.0;
        xs.push_back(s);
        sq.push_back(s * s);
        ab.push_back(std::abs(s));
    }
    auto p = minimax(xs, sq, 1);
    CHECK(p.error == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.equioscillation.size() >= 3);
    for (std::size_t i = 1; i < p.signed_errors.size(); ++i)
        CHECK(p.signed_errors[i] * p.signed_errors[i - 1] < 0.0);
    auto c = minimax(xs, ab, 0);
    CHECK(c.error == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c(0.3) == doctest::Approx(0.5).epsilon(1e-12));
    auto cubic = minimax(xs, [&] {
        std::vector<double> y;
        for (double s : xs) y.push_back(1 - 2 * s + 0.5 * s * s * s);
        return y;
    }(), 3);
    CHECK(cubic.error < 1e-12);
}

TEST_CASE("poly distance on grid functions beats random competitors") {
    auto g = unit_grid(2048);
    auto u = sample(g, [](double x) { return std::exp(std::sin(3 * x)); });
    SubInterval J{0, 0.2, 0.9};
    auto p = poly_distance(u, 2, J);
    CHECK(p.equioscillation.size() >= 4);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 0.01);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> c = p.coefficients;
        for (double& v : c) v += N(rng);
        double err = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) {
            double x = g->node(i).x;
            if (x < J.lo || x > J.hi) continue;
            double q = 0.0;
            for (std::size_t k = c.size(); k-- > 0;) q = q * x + c[k];
            err = std::max(err, std::abs(u.values()[i] - q));
        }
        CHECK(p.error <= err + 1e-12);
    }
    // the quadratic (2x-1)^2 on [0,1] is s^2 on [-1,1]
    auto s2 = sample(g, [](double x) { return (2 * x - 1) * (2 * x - 1); });
    CHECK(poly_distance(s2, 1, {0, 0.0, 1.0}).error == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(poly_distance(s2, 2, {0, 0.0, 1.0}).error < 1e-12);
}

TEST_CASE("integration") {
    auto g = unit_grid(4096);
    auto leb = Measure::lebesgue(g);
    CHECK(leb.total() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate(sample(g, [](double) { return 1.0; }), leb) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate(sample(g, [](double x) { return x; }), leb) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(l2_norm(sample(g, [](double) { return -3.0; }), leb) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(leb.mass(0, 0.25, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    std::vector<double> bad(g->size(), 1.0);
    CHECK_THROWS(Measure(g, bad));
}
