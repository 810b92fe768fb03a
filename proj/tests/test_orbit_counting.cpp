#include "doctest.h"
#include "support.hpp"

#include <map>
#include <set>

using namespace mixlab;
using namespace mixlab::test;

namespace {

// primitive necklaces over {0,1}: brute force over all words and their rotations
std::vector<std::uint64_t> brute_necklaces(int n_max) {
    std::vector<std::uint64_t> out(n_max + 1, 0);
    for (int n = 1; n <= n_max; ++n) {
        std::set<std::uint32_t> seen;
        for (std::uint32_t w = 0; w < (1u << n); ++w) {
            std::uint32_t best = w, r = w;
            bool primitive = true;
            for (int k = 1; k < n; ++k) {
                r = ((r << 1) | (r >> (n - 1))) & ((1u << n) - 1);
                if (r == w) primitive = false;
                best = std::min(best, r);
            }
            if (primitive) seen.insert(best);
        }
        out[n] = seen.size();
    }
    return out;
}

} // namespace

TEST_CASE("periodic orbits of the doubling map") {
    auto m = doubling(1024);
    const int n_max = 14;
    auto orbits = enumerate_periodic_orbits(*m, n_max);
    auto want = brute_necklaces(n_max);
    std::vector<std::uint64_t> L(n_max + 1, 0);
    for (const auto& o : orbits) {
        ++L[o.n];
        CHECK(o.residual < 1e-12);
        CHECK(o.period == doctest::Approx(o.n).epsilon(1e-14));
    }
    for (int n = 1; n <= n_max; ++n) {
        CHECK(L[n] == want[n]);
        CHECK(necklace_count(*m, n) == want[n]);
        std::uint64_t fix = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) fix += d * L[d];
        CHECK(fix == fixed_point_count(*m, n));
        CHECK(fixed_point_count(*m, n) == (std::uint64_t(1) << n));
    }
    CHECK(L[4] == 3);
    auto one = enumerate_periodic_orbits(*m, 1);
    REQUIRE(one.size() == 2);
    CHECK(word_string(one[0].word) == "0");
    CHECK(word_string(one[1].word) == "1");
    CHECK_THROWS_AS(enumerate_periodic_orbits(*m, 30), SizeError);
}

TEST_CASE("periodic orbits with a roof and a Markov coding") {
    auto s = sin_roof(1024);
    for (const auto& o : enumerate_periodic_orbits(*s, 8)) {
        CHECK(o.period >= o.n * s->tau0 - 1e-12);
        CHECK(o.period <= o.n * s->tau_star + 1e-12);
        // rotations of a primitive word are distinct
        std::set<Word> rot;
        Word w = o.word;
        for (int k = 0; k < o.n; ++k) {
            rot.insert(w);
            std::rotate(w.begin(), w.begin() + 1, w.end());
        }
        CHECK(static_cast<int>(rot.size()) == o.n);
        CHECK(*rot.begin() == o.word);
    }
    auto k = model({{"family", "markov3"}}, 1024);
    auto ok = enumerate_periodic_orbits(*k, 10);
    std::vector<std::uint64_t> L(11, 0);
    for (const auto& o : ok) {
        ++L[o.n];
        CHECK(o.residual < 1e-12);
    }
    for (int n = 1; n <= 10; ++n) {
        std::uint64_t fix = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) fix += d * L[d];
        CHECK(fix == fixed_point_count(*k, n));
        CHECK(L[n] == necklace_count(*k, n));
    }
}

TEST_CASE("entropy") {
    CHECK(entropy(*doubling(1024)) == doctest::Approx(kLog2).epsilon(1e-12));
    CHECK(entropy(*model({{"roof_const", "2.5"}}, 1024)) == doctest::Approx(kLog2 / 2.5).epsilon(1e-12));
    CHECK(entropy(*model({{"family", "fullshift"}, {"branches", "3"}}, 1024)) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // tau = 1: entropy is the growth rate of tr(A^n)
    auto k = model({{"family", "markov3"}}, 1024);
    double growth = std::log(double(fixed_point_count(*k, 40))) / 40;
    CHECK(entropy(*k) == doctest::Approx(growth).epsilon(1e-6));
}

TEST_CASE("logarithmic integral") {
    CHECK(li(2.0) == 0.0);
    CHECK(li(1.0) == 0.0);
    const double li2 = std::expint(std::log(2.0));
    for (double y : {3.0, 10.0, 1e3, 1e6, std::exp(18 * kLog2)})
        CHECK(li(y) == doctest::Approx(std::expint(std::log(y)) - li2).epsilon(1e-10));
}

TEST_CASE("prime orbit counting") {
    auto m = doubling(1024);
    auto rep = prime_orbit_report(*m, 12, {0.0, 4.5, 8.0, 12.0, 13.0});
    REQUIRE(rep.rows.size() == 5);
    CHECK(rep.h == doctest::Approx(kLog2).epsilon(1e-12));
    CHECK(rep.rows[0].pi == 0);
    CHECK(rep.rows[0].li == 0.0);
    CHECK(rep.rows[1].pi == 8);
    CHECK(rep.rows[3].complete);
    CHECK(!rep.rows[4].complete);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].pi >= rep.rows[i - 1].pi);
    auto orbits = enumerate_periodic_orbits(*m, 12);
    std::uint64_t count = 0;
    for (const auto& o : orbits) count += o.period <= 8.0;
    CHECK(rep.rows[2].pi == count);
    CHECK(rep.rows[2].li == doctest::Approx(li(std::exp(kLog2 * 8.0))).epsilon(1e-14));
    CHECK(rep.to_csv().rfind("T,pi,li,diff,rel,complete\n", 0) == 0);
}

TEST_CASE("observables") {
    auto m = doubling(1024);
    auto A = named_observable("sin-cos");
    CHECK(A(*m, {0, 0.25}, 0.0) == doctest::Approx(1.0));
    CHECK(A(*m, {0, 0.25}, 0.5) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(named_observable("tan-one"), ConfigError);
    CHECK_THROWS_AS(named_observable("sin"), ConfigError);
}

TEST_CASE("correlation decay") {
    auto gd = gibbs_measure(doubling(1024));
    std::vector<double> t{0.0, 0.5, 1.0, 1.5, 2.0};
    auto flat = correlation_decay(gd, named_observable("one-one"), named_observable("sin-one"), t, 100000, 3);
    CHECK(flat.degenerate);
    for (const auto& r : flat.rows) CHECK(std::abs(r.corr) < 1e-12);

    auto gs = gibbs_measure(sin_roof(1024));
    auto S = named_observable("sin-one");
    auto r = correlation_decay(gs, S, S, {0.0, 0.25}, 200000, 7);
    // t = 0 against direct quadrature of the roof-weighted section measure
    auto tau = RealFunction::sample(gs.model->grid_ptr(), [&](const PointRef& p) { return gs.model->tau(p); });
    auto st = RealFunction::sample(gs.model->grid_ptr(),
                                   [&](const PointRef& p) { return std::sin(2 * kPi * p.x) * gs.model->tau(p); });
    auto s2t = RealFunction::sample(gs.model->grid_ptr(), [&](const PointRef& p) {
        return std::pow(std::sin(2 * kPi * p.x), 2) * gs.model->tau(p);
    });
    double Z = integrate(tau, gs.nu);
    double mean = integrate(st, gs.nu) / Z;
    double var = integrate(s2t, gs.nu) / Z - mean * mean;
    CHECK(std::abs(r.rows[0].corr - var) <= 3 * r.rows[0].stderr_);
    CHECK(std::abs(r.mean_a - mean) <= 0.01);

    auto again = correlation_decay(gs, S, S, {0.0, 0.25}, 200000, 7);
    CHECK(again.to_csv() == r.to_csv());
    set_thread_cap(1);
    auto serial = correlation_decay(gs, S, S, {0.0, 0.25}, 200000, 7);
    set_thread_cap(0);
    CHECK(serial.to_csv() == r.to_csv());
    auto other = correlation_decay(gs, S, S, {0.0, 0.25}, 200000, 8);
    CHECK(other.to_csv() != r.to_csv());
}

TEST_CASE("correlation fit window") {
    CorrelationReport r;
    for (int i = 0; i < 8; ++i) {
        double t = 0.25 * i;
        r.rows.push_back({t, 0.4 * std::exp(-1.5 * t), 1e-4, false});
    }
    r.rows.push_back({2.0, -0.3, 1e-4, false});
    fit_correlation_rate(r);
    CHECK(r.fitted);
    CHECK(r.rate == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!r.rows.back().fitted);
    int used = 0;
    for (const auto& row : r.rows) used += row.fitted;
    CHECK(used == 8);

    CorrelationReport short_run;
    for (int i = 0; i < 3; ++i) short_run.rows.push_back({double(i), std::exp(-double(i)), 1e-4, false});
    fit_correlation_rate(short_run);
    CHECK(!short_run.fitted);
}
