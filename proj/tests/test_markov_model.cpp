#include "doctest.h"
#include "support.hpp"

using namespace mixlab;
using namespace mixlab::test;

TEST_CASE("model constants") {
    auto m = doubling();
    CHECK(m->chi0 == doctest::Approx(kLog2).epsilon(1e-15));
    CHECK(m->chi_star == doctest::Approx(kLog2).epsilon(1e-15));
    CHECK(m->tau0 == 1.0);
    CHECK(m->tau_star == 1.0);

    auto s = sin_roof();
    CHECK(s->tau0 == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s->tau_star == doctest::Approx(2.5).epsilon(1e-12));

    auto f = model({{"family", "fullshift"}, {"branches", "3"}});
    CHECK(f->chi0 == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(f->alphabet() == 3);
}

TEST_CASE("model config rejects bad input") {
    CHECK_THROWS_AS(model({{"nope", "1"}}), ConfigError);
    CHECK_THROWS_AS(model({{"roof_const", "0.2"}, {"roof_sin", "0.5"}}), ConfigError);
    CHECK_THROWS_AS(model({{"family", "markov3"}, {"transitions", "101,111,111"}}), ConfigError);
    CHECK_THROWS_AS(model({{"family", "markov3"}, {"transitions", "000,111,111"}}), ConfigError);
    CHECK_THROWS_AS(model({{"family", "mobius"}}), ConfigError);
    CHECK_THROWS_AS(model({}, 1000), ConfigError);
    CHECK_THROWS_AS(ModelConfig::parse("roof_const 2\n"), ConfigError);
}

TEST_CASE("model config round trip and hash") {
    ModelConfig c;
    c.set("family", "markov3");
    c.set("roof_const", "2.25");
    c.set("roof_cos", "-0.125");
    c.set("roof_step", "0.1,0.2,0.3");
    c.set("pot_fiber", "0.3");
    ModelConfig d = ModelConfig::parse(c.serialize());
    CHECK(d.serialize() == c.serialize());
    CHECK(d.hash() == c.hash());
    ModelConfig e = c;
    e.set("roof_const", "2.5");
    CHECK(e.hash() != c.hash());
    auto text = std::string("# comment\nroof_const = 2\n\nroof_sin=0.5\n");
    CHECK(ModelConfig::parse(text).hash() == sin_roof()->hash);
}

TEST_CASE("inverse branches") {
    auto m = doubling();
    CHECK(apply_branch(*m, parse_word("0"), {0, 0.5}).x == 0.25);
    CHECK(apply_branch(*m, parse_word("1"), {0, 0.0}).x == 0.5);
    CHECK(apply_branch(*m, Word{}, {0, 0.3}).x == 0.3);
    // the last symbol acts first
    CHECK(apply_branch(*m, parse_word("01"), {0, 0.0}).x == 0.25);
    CHECK_THROWS_AS(apply_branch(*m, parse_word("2"), {0, 0.5}), DomainError);

    auto k = model({{"family", "markov3"}});
    CHECK_THROWS_AS(apply_branch(*k, parse_word("22"), {2, 0.8}), DomainError);
}

TEST_CASE("branches invert the forward map") {
    for (auto m : {sin_roof(), model({{"family", "markov3"}})}) {
        const Grid& gr = m->grid();
        for (int n = 1; n <= 6; ++n)
            for (const Word& w : enumerate_branches(*m, n))
                for (std::size_t g = 1; g + 1 < gr.size(); g += 97) {
                    PointRef x = gr.node(g);
                    if (!m->admissible(w, x.interval)) continue;
                    PointRef y = apply_branch(*m, w, x);
                    for (int i = 0; i < n; ++i) y = m->forward(y);
                    CHECK(y.interval == x.interval);
                    CHECK(std::abs(y.x - x.x) <= 10 * gr.intervals()[x.interval].spacing());
                }
    }
}

TEST_CASE("expansion cocycle") {
    auto m = doubling();
    CHECK(expansion_cocycle(*m, {0, 0.3}, 5).value == 32.0);
    CHECK(expansion_cocycle(*m, {0, 0.3}, 0).value == 1.0);
    auto f = model({{"family", "fullshift"}, {"branches", "3"}});
    CHECK(expansion_cocycle(*f, {0, 0.1}, 4).value == doctest::Approx(81.0).epsilon(1e-14));

    auto k = model({{"family", "markov3"}});
    const Grid& gr = k->grid();
    for (std::size_t g = 0; g < gr.size(); g += 131)
        for (int a = 0; a <= 5; ++a)
            for (int b = 0; b <= 5; ++b) {
                PointRef x = gr.node(g), y = x;
                for (int i = 0; i < a; ++i) y = k->forward(y);
                double lhs = expansion_cocycle(*k, x, a + b).value;
                double rhs = expansion_cocycle(*k, x, a).value * expansion_cocycle(*k, y, b).value;
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
            }
}

TEST_CASE("birkhoff sums") {
    auto m = doubling();
    PointFn tau = [&m](const PointRef& p) { return m->tau(p); };
    CHECK(birkhoff_sum(*m, tau, {0, 0.37}, 7).value == doctest::Approx(7.0));
    CHECK(birkhoff_sum(*m, tau, {0, 0.37}, 0).value == 0.0);
    auto a = model({{"roof_const", "2"}, {"roof_linear", "1"}});
    PointFn ta = [&a](const PointRef& p) { return a->tau(p); };
    CHECK(birkhoff_sum(*a, ta, {0, 0.0}, 2).value == doctest::Approx(4.0));
    // orbit 0.3 -> 0.6 -> 0.2
    CHECK(birkhoff_sum(*a, ta, {0, 0.3}, 3).value == doctest::Approx(6 + 0.3 + 0.6 + 0.2).epsilon(1e-14));
}

TEST_CASE("branch enumeration") {
    auto m = doubling();
    auto w3 = enumerate_branches(*m, 3);
    REQUIRE(w3.size() == 8);
    for (std::size_t i = 1; i < w3.size(); ++i) CHECK(w3[i - 1] < w3[i]);
    CHECK(enumerate_branches(*m, 1).size() == 2);
    auto k = model({{"family", "markov3"}});
    CHECK(enumerate_branches(*k, 2).size() == 8);
    CHECK_THROWS_AS(enumerate_branches(*m, 30, 1024), SizeError);
}

TEST_CASE("tau along a word matches direct evaluation") {
    auto m = sin_roof();
    Word w = parse_word("0110");
    double x = 0.5;
    for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) x = (x + w[i]) / 2.0;
    double want = 0.0, y = x;
    for (int i = 0; i < 4; ++i) {
        want += 2.0 + 0.5 * std::sin(2 * kPi * y);
        y = std::fmod(2.0 * y, 1.0);
    }
    CHECK(tau_along(*m, w, {0, 0.5}) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("contraction sandwich and word Hoelder bound") {
    auto m = sin_roof(1024);
    auto c = contraction_sandwich(*m, 12);
    CHECK(c.C >= 1.0);
    CHECK(c.C < 1.0 + 1e-9);
    double h6 = tau_word_holder(*m, 6, m->theta);
    double h10 = tau_word_holder(*m, 10, m->theta);
    CHECK(h6 > 0.0);
    CHECK(h10 <= 1.05 * h6);
}
