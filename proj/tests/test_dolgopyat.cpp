#include "doctest.h"
#include "support.hpp"

#include <random>

using namespace mixlab;
using namespace mixlab::test;

namespace {

const GibbsMeasure& sin_gibbs() {
    static const GibbsMeasure g = gibbs_measure(sin_roof());
    return g;
}

const Engine& sin_engine() {
    static const Engine e = make_engine(sin_gibbs(), 0.0, 256.0);
    return e;
}

ModelPtr third() { return model({{"mu_const", "0.3333333333333333"}}, 1024); }

} // namespace

TEST_CASE("cylinder partitions") {
    auto m = third();
    auto p = build_partition(*m, matching_scale(*m, 0.01), 1.0);
    REQUIRE(p.atoms.size() == 32);
    for (const auto& a : p.atoms) {
        CHECK(a.length() == doctest::Approx(1.0 / 32).epsilon(1e-14));
        CHECK(a.depth == 5);
    }
    CHECK(p.contained);
    CHECK(p.half_neighbourhood);
    for (int id : p.atom_of) CHECK(id >= 0);

    auto coarse = build_partition(*m, matching_scale(*m, 0.5), 1.0);
    CHECK(coarse.atoms.size() == 2);
    auto fine = build_partition(*m, matching_scale(*m, 0.005), 1.0);
    CHECK(refines(fine, p));
    CHECK(refines(p, coarse));
    CHECK(!refines(coarse, p));
    CHECK(refining_depth(*m, p, matching_scale(*m, 0.01)) >= 1);
    CHECK(p.find(*m, {0, 0.5}) == p.atom_of[m->grid().size() / 2]);
}

TEST_CASE("cone membership") {
    auto m = third();
    auto s = matching_scale(*m, 0.01);
    auto g = m->grid_ptr();
    auto c = cone_membership(sample(g, [](double) { return 4.0; }), s);
    CHECK(c.member);
    CHECK(c.margin == doctest::Approx(1.0));
    auto edge = cone_membership(sample(g, [&](double x) { return std::exp(x * s.min); }), s);
    CHECK(edge.member);
    CHECK(std::abs(edge.margin) < 1e-9);
    auto out = cone_membership(sample(g, [&](double x) { return std::exp(10 * x * s.min); }), s);
    CHECK(!out.member);
    CHECK(out.margin == doctest::Approx(-9.0).epsilon(1e-9));
    CHECK_THROWS_AS(cone_membership(sample(g, [](double x) { return x - 0.5; }), s), DomainError);
}

TEST_CASE("bump profile") {
    const double k5 = 0.05;
    CHECK(zeta(0.0, k5) == 1.0);
    CHECK(zeta(0.1, k5) == 1.0);
    CHECK(zeta(0.9, k5) == 1.0);
    CHECK(zeta(0.3, k5) == 1.0 - k5);
    CHECK(zeta(0.5, k5) == 1.0 - k5);
    CHECK(zeta(0.7, k5) == 1.0 - k5);
    double slope = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double s = i / 10000.0, h = 1e-6;
        slope = std::max(slope, std::abs(zeta(s + h, k5) - zeta(s, k5)) / h);
        CHECK(zeta(s, k5) >= 1.0 - k5);
        CHECK(zeta(s, k5) <= 1.0);
    }
    CHECK(slope <= kZetaSlope * k5 * (1 + 1e-4));
    CHECK(slope <= 10 * k5);
}

TEST_CASE("two-branch averages") {
    auto m = doubling(1024);
    auto t = build_word_table(*m, 1, [](const PointRef&) { return -kLog2; });
    std::vector<double> w(t.entries());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(t.log_weight[k]);
    auto g = m->grid_ptr();
    const double c = 3.0, k5 = 0.1;
    auto H = sample(g, [&](double) { return c; });
    auto P = sample(g, [&](double x) { return x >= 0.3 && x <= 0.4 ? 1.0 - k5 : 1.0; });
    RealFunction PH(g);
    for (std::size_t i = 0; i < PH.size(); ++i) PH[i] = P[i] * H[i];
    auto next = word_apply(*m, t, w, PH);
    for (std::size_t i = 0; i < g->size(); ++i) {
        double x = g->node(i).x;
        if (x > 0.61 && x < 0.79) CHECK(next[i] == doctest::Approx(c * (1 - k5 / 2)).epsilon(1e-14));
        if (x < 0.59 || x > 0.81) CHECK(next[i] == doctest::Approx(c).epsilon(1e-14));
    }
    std::vector<std::uint8_t> om(g->size(), 0);
    for (std::size_t i = 0; i < g->size(); ++i) {
        double x = g->node(i).x;
        om[i] = x > 0.61 && x < 0.79;
    }
    auto cs = cauchy_schwarz_check(*m, t, w, P, H, om);
    CHECK(cs.pass);
    CHECK(cs.kappa4 == doctest::Approx(1.0 - ((1 - k5) * (1 - k5) + 1) / 2).epsilon(1e-12));
    RealFunction one(g, 1.0);
    auto eq = cauchy_schwarz_check(*m, t, w, one, H, std::vector<std::uint8_t>(g->size(), 0));
    CHECK(eq.max_violation <= 1e-12);
    CHECK(eq.kappa4 == 0.0);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.9, 1.0), V(0.1, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        RealFunction Pr(g), Hr(g);
        for (std::size_t i = 0; i < g->size(); ++i) {
            Pr[i] = U(rng);
            Hr[i] = V(rng);
        }
        CHECK(cauchy_schwarz_check(*m, t, w, Pr, Hr, std::vector<std::uint8_t>(g->size(), 0)).pass);
    }
}

TEST_CASE("engine setup") {
    const Engine& e = sin_engine();
    CHECK(!e.refused);
    CHECK(e.kappa6 > 0.0);
    CHECK(e.n1 >= 1);
    CHECK(e.partition.contained);
    CHECK(e.partition.half_neighbourhood);
    CHECK(refining_depth(*e.model, e.partition, e.scale) <= e.n1);
    RealFunction one(e.model->grid_ptr(), 1.0);
    for (double v : values_of(word_apply(*e.model, e.table, e.m_weights, one)))
        CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

    auto gc = gibbs_measure(doubling());
    auto ec = make_engine(gc, 0.0, 2 * kPi);
    CHECK(ec.refused);
    CHECK(ec.kappa6 == 0.0);
}

TEST_CASE("dichotomy") {
    const Engine& e = sin_engine();
    auto grid = e.model->grid_ptr();
    auto zero = initial_state(e, ComplexFunction(grid, Complex(0.0, 0.0)), 1.0);
    auto half = initial_state(e, ComplexFunction::sample(grid, [](const PointRef& p) {
                                  return std::polar(0.5, 40.0 * p.x);
                              }), 1.0);
    int atoms = 0;
    for (std::size_t i = 0; i < e.partition.atoms.size(); i += 7) {
        const Atom& a = e.partition.atoms[i];
        for (int w = 0; w < static_cast<int>(e.table.words.size()); ++w) {
            if (!e.model->admissible(e.table.words[w], a.interval)) continue;
            CHECK(dichotomy_test(e, zero, a, w).kind == BranchKind::Small);
            auto r = dichotomy_test(e, half, a, w);
            CHECK(r.kind == BranchKind::Small);
            CHECK(r.max_ratio <= 0.5 + 1e-12);
        }
        ++atoms;
    }
    CHECK(atoms > 0);
}

TEST_CASE("cancellation and majorant step") {
    const Engine& e = sin_engine();
    auto grid = e.model->grid_ptr();
    ComplexFunction one(grid, Complex(1.0, 0.0));
    auto s = initial_state(e, one, 1.0);
    for (int i = 0; i < 22; ++i) s.u = word_apply(*e.model, e.table, e.l_weights, s.u);
    auto bumps = build_cancellation(e, s);
    CHECK(!bumps.empty());
    const double k5 = e.params.kappa5;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        CHECK(s.P[i] >= 1.0 - k5 - 1e-15);
        CHECK(s.P[i] <= 1.0);
        if (!e.atom_in_omega[e.partition.atom_of[i]]) CHECK(s.P[i] == 1.0);
    }
    CHECK(cone_membership(s.P, e.scale).member);
    auto next = majorant_step(e, s);
    CHECK(next.n == 1);
    for (std::size_t i = 0; i < grid->size(); ++i) CHECK(std::abs(next.u[i]) <= next.H[i] * (1 + 1e-12));
    CHECK(cone_membership(next.H, e.scale).member);

    auto flat = initial_state(e, ComplexFunction(grid, Complex(0.0, 0.0)), 2.0);
    auto fn = majorant_step(e, flat);
    for (double v : fn.H.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-10));

    auto bad = initial_state(e, ComplexFunction(grid, Complex(3.0, 0.0)), 1.0);
    CHECK_THROWS_AS(majorant_step(e, bad), InvariantViolation);
}

TEST_CASE("L2 iteration") {
    const Engine& e = sin_engine();
    ComplexFunction one(e.model->grid_ptr(), Complex(1.0, 0.0));
    auto c = run_l2_iteration(e, sin_gibbs(), one);
    CHECK(c.pass);
    CHECK(c.violations == 0);
    CHECK(c.max_cs_violation <= 1e-12);
    CHECK(!c.refused);
    CHECK(c.kappa > 0.0);
    REQUIRE(c.rows.size() >= 2);
    for (std::size_t i = 1; i < c.rows.size(); ++i) {
        CHECK(c.rows[i].H_l2 < c.rows[i - 1].H_l2);
        CHECK(c.rows[i].cone_margin > 0.0);
    }
    CHECK(c.rows.back().u_l2 < c.rows.back().H_l2);
    CHECK(c.rows.back().H_l2 < 1.0);
    CHECK(c.bound == doctest::Approx(2 * c.drift * c.drift + 2 * c.rows.back().H_l2 * c.rows.back().H_l2));

    auto z = run_l2_iteration(e, sin_gibbs(), ComplexFunction(e.model->grid_ptr(), Complex(0.0, 0.0)));
    for (const auto& r : z.rows) {
        CHECK(r.u_c0 == 0.0);
        CHECK(r.u_l2 == 0.0);
        CHECK(r.H_l2 == 0.0);
    }

    auto gc = gibbs_measure(doubling());
    auto flat = run_l2_iteration(gc, 0.0, 2 * kPi, ComplexFunction(gc.model->grid_ptr(), Complex(1.0, 0.0)));
    CHECK(flat.refused);
    CHECK(flat.kappa == 0.0);
    for (const auto& r : flat.rows) CHECK(r.u_c0 == doctest::Approx(1.0).epsilon(1e-10));
}
