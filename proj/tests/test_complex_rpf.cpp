#include "doctest.h"
#include "support.hpp"

#include <random>

using namespace mixlab;
using namespace mixlab::test;

namespace {

ComplexFunction random_function(const GridPtr& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    double c[6];
    for (double& v : c) v = N(rng);
    return ComplexFunction::sample(g, [&](const PointRef& p) {
        double x = p.x;
        return Complex(c[0] + c[1] * std::sin(2 * kPi * x) + c[2] * std::cos(6 * kPi * x),
                       c[3] * x + c[4] * std::sin(10 * x) + c[5]);
    });
}

} // namespace

TEST_CASE("mollifier") {
    auto g = unit_grid(4096);
    auto c = sample(g, [](double) { return 2.5; });
    for (double v : values_of(mollify(c, 0.05))) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
    auto lin = sample(g, [](double x) { return 3 * x - 1; });
    auto ml = mollify(lin, 0.05);
    for (std::size_t i = 0; i < g->size(); ++i) {
        double x = g->node(i).x;
        if (x > 0.06 && x < 0.94) CHECK(ml.values()[i] == doctest::Approx(lin.values()[i]).epsilon(1e-12));
    }
    bool clamped = false;
    mollify(lin, 1e-6, &clamped);
    CHECK(clamped);
}

TEST_CASE("smoothed coefficients") {
    auto gm = gibbs_measure(sin_roof());
    for (double b : {64.0, 256.0, 1024.0}) {
        auto sp = smooth_coefficients(gm, b, 0.1);
        CHECK(sp.width == doctest::Approx(std::pow(b, -0.05)).epsilon(1e-12));
        const double lip = 0.5 * 2 * kPi;
        double dev = 0.0;
        for (std::size_t i = 0; i < sp.tau.values().size(); ++i)
            dev = std::max(dev, std::abs(sp.tau.values()[i] - gm.model->tau(gm.model->grid().node(i))));
        CHECK(dev <= lip * sp.width);
        CHECK(sp.c1_tau <= 10.0 * std::pow(b, 0.1));
    }
    auto gc = gibbs_measure(doubling());
    auto sc = smooth_coefficients(gc, 256.0, 0.1);
    for (double v : sc.tau.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("complex transfer operator") {
    auto gd = gibbs_measure(doubling(1024));
    auto g = gd.model->grid_ptr();
    ComplexFunction one(g, Complex(1.0, 0.0));
    for (auto v : values_of(complex_rpf_apply(gd, 0.0, 0.0, one))) CHECK(std::abs(v - 1.0) < 1e-14);
    for (double b : {1.0, 64.0, 2 * kPi})
        for (auto v : values_of(complex_rpf_apply(gd, 0.0, b, one))) CHECK(std::abs(v - std::polar(1.0, b)) < 1e-13);

    auto gs = gibbs_measure(sin_roof(1024));
    for (double a : {-0.05, 0.0, 0.05}) {
        auto u = random_function(g, 3);
        auto lu = complex_rpf_apply(gs, a, 100.0, u);
        auto l0 = complex_rpf_apply(gs, a, 0.0, to_complex(abs(u)));
        for (std::size_t i = 0; i < lu.values().size(); ++i)
            CHECK(std::abs(lu.values()[i]) <= l0.values()[i].real() * (1 + 1e-12) + 1e-14);
        for (auto v : values_of(complex_rpf_apply(gs, a, 0.0, one))) CHECK(std::abs(v - 1.0) < 1e-8);
    }
}

TEST_CASE("smoothed operators") {
    auto gs = gibbs_measure(sin_roof(1024));
    auto g = gs.model->grid_ptr();
    for (double b : {64.0, 512.0}) {
        auto r = make_complex_rpf(gs, 0.05, b);
        for (double v : r.eig.rho.values()) CHECK(v > 1.0 / 3.0);
        RealFunction one(g, 1.0);
        for (double v : values_of(m_apply(r, one))) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
        auto u = random_function(g, 9);
        auto au = abs(u);
        auto mu = m_apply(r, au);
        auto lu = tilde_rpf_apply(r, u);
        for (std::size_t i = 0; i < mu.values().size(); ++i) {
            CHECK(mu.values()[i] >= 0.0);
            CHECK(std::abs(lu.values()[i]) <= mu.values()[i] * (1 + 1e-12));
        }
    }
    double prev = 1e300;
    auto e0 = leading_eigendata(gs, 0.05).eigenvalue;
    for (double b : {64.0, 1024.0, 16384.0}) {
        double d = std::abs(make_complex_rpf(gs, 0.05, b).eig.eigenvalue - e0);
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("sup norm contraction and Lasota-Yorke") {
    auto gs = gibbs_measure(sin_roof(1024));
    auto g = gs.model->grid_ptr();
    auto u = random_function(g, 21);
    double c0 = c0_norm(u);
    auto v = u;
    for (int n = 1; n <= 10; ++n) {
        v = complex_rpf_apply(gs, 0.0, 128.0, v);
        CHECK(c0_norm(v) <= c0 * (1 + 1e-10));
    }
    auto ly = lasota_yorke_fit(make_complex_rpf(gs, 0.0, 128.0), u, 8);
    CHECK(ly.seminorms.size() == 9);
    CHECK(ly.A > 0.0);
    CHECK(ly.B >= 0.0);
    const double rate = std::exp(-gs.model->theta * gs.model->chi0);
    for (std::size_t n = 0; n < ly.seminorms.size(); ++n)
        CHECK(ly.seminorms[n] <= (ly.A * std::pow(rate, n) * ly.seminorms[0] + ly.B * c0) * (1 + 1e-9));
}

TEST_CASE("decay profile") {
    CHECK(decay_steps(256.0, 4.0) == 23);
    CHECK(decay_steps(64.0, 0.0) == 0);

    auto gd = gibbs_measure(doubling(1024));
    ComplexFunction one(gd.model->grid_ptr(), Complex(1.0, 0.0));
    auto flat = decay_profile(gd, 0.0, {2 * kPi, 4 * kPi, 8 * kPi, 16 * kPi}, 4.0, one);
    for (const auto& r : flat.rows) CHECK(r.c0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(flat.kappa) < 1e-10);

    auto gs = gibbs_measure(sin_roof(1024));
    auto u = random_function(gs.model->grid_ptr(), 2);
    auto zero = decay_profile(gs, 0.0, {64.0, 128.0}, 0.0, u);
    for (const auto& r : zero.rows) {
        CHECK(r.n == 0);
        CHECK(r.c0 == doctest::Approx(c0_norm(u)).epsilon(1e-15));
        CHECK(r.l2 == doctest::Approx(l2_norm(u, gs.nu)).epsilon(1e-15));
    }
    CHECK(!zero.fitted);
    auto csv = flat.to_csv();
    CHECK(csv.rfind("b,n,c0,l2,seminorm,theta,model_hash,flag\n", 0) == 0);
}
