#pragma once

#include "mixlab/markov_model.hpp"
#include "mixlab/thermo.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

struct PeriodicOrbit {
    Word word; // least rotation, primitive
    int n = 0;
    double period = 0.0;
    PointRef point; // fixed point of v_word
    double residual = 0.0; // |v_word(x*) - x*|
};

// Primitive closed orbits of word length <= n_max, ordered by length then word.
std::vector<PeriodicOrbit> enumerate_periodic_orbits(const MarkovModel& m, int n_max,
                                                     std::size_t cap = std::size_t(1) << 21);

// tr(A^n) for the symbol transition matrix, i.e. #Fix(sigma^n) of the coding.
std::uint64_t fixed_point_count(const MarkovModel& m, int n);
// (1/n) sum_{d | n} mobius(d) tr(A^{n/d}).
std::uint64_t necklace_count(const MarkovModel& m, int n);

double entropy(const MarkovModel& m, double tol = 1e-12);
// li(y) = int_2^y du / log u, 0 for y <= 2.
double li(double y);

struct CountingRow {
    double T = 0.0;
    std::uint64_t pi = 0;
    double li = 0.0;
    double diff = 0.0;
    double rel = 0.0;
    bool complete = true;
};

struct CountingReport {
    double h = 0.0;
    int n_max = 0;
    std::vector<CountingRow> rows;
    double c_hat = 0.0; // OLS slope of log|pi - li| on rows with |pi - li| >= 1
    bool fitted = false;
    std::string to_csv() const;
};

CountingReport prime_orbit_report(const MarkovModel& m, const std::vector<PeriodicOrbit>& orbits, int n_max,
                                  const std::vector<double>& T_grid);
CountingReport prime_orbit_report(const MarkovModel& m, int n_max, const std::vector<double>& T_grid);

std::string orbits_csv(const std::vector<PeriodicOrbit>& orbits);

// Suspension observable A(x, s) = section(x) * fiber(s / tau(x)).
struct Observable {
    std::function<double(const PointRef&)> section;
    std::function<double(double)> fiber;
    std::string name;
    double operator()(const MarkovModel& m, const PointRef& x, double s) const;
};

// Named observables: {one, sin, cos}-{one, sin, cos} for section-fiber, e.g. "sin-one".
Observable named_observable(const std::string& name);

struct CorrelationRow {
    double t = 0.0;
    double corr = 0.0;
    double stderr_ = 0.0;
    bool fitted = false;
};

struct CorrelationReport {
    std::vector<CorrelationRow> rows;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double mean_a = 0.0, mean_b = 0.0, var_a = 0.0, var_b = 0.0;
    bool degenerate = false; // constant observable: rate undefined
    bool fitted = false;
    double rate = 0.0, rate_stderr = 0.0, r2 = 0.0;
    std::string to_csv() const;
};

// Monte Carlo over nu_U x (Lebesgue on the fiber) normalized by the roof.
CorrelationReport correlation_decay(const GibbsMeasure& g, const Observable& A, const Observable& B,
                                    const std::vector<double>& t_grid, std::size_t samples, std::uint64_t seed);

// Window: from the first t while the sign of C is kept and |C| >= max(3 stderr, 0.05 |C(t_0)|).
void fit_correlation_rate(CorrelationReport& r);

} // namespace mixlab
