#pragma once

#include "mixlab/function_space.hpp"
#include "mixlab/markov_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mixlab {

struct StabilityReport {
    bool pass = false;
    int n = 0;               // branch stability holds for all m in [n, max_m]
    double kappa = 0.0;      // branch-stability exponent
    double kappa_floor = 0.0; // min log Lambda / log(1/eps)
    double margin = 0.0;     // min(kappa, kappa_floor)
    int slow_growth = 0;     // max over words v of length k of depth(v x) - depth(x) - k
    PointRef witness;
    double certified() const { return std::min(kappa, kappa_floor); }
};

// Lambda^eps(x) = Lambda_{depth(x)}(x), depth(x) = inf{k >= 1 : prod_{j<k} mu(sigma^j x) < eps}.
struct ScaleFunction {
    double eps = 0.0;
    RealFunction values;
    std::vector<int> depth;
    StabilityReport certificate;
    double min = 0.0, max = 0.0;

    static int depth_at(const MarkovModel& m, double eps, const PointRef& p);
    static double value_at(const MarkovModel& m, double eps, const PointRef& p);
    double at(const MarkovModel& m, const PointRef& p) const { return value_at(m, eps, p); }
};

ScaleFunction matching_scale(const MarkovModel& m, double eps, bool certify = true);

StabilityReport check_stable(const MarkovModel& m, const ScaleFunction& s, int max_m = 12);

struct UniformSet {
    int n = 0;
    double kappa = 0.0;
    int horizon = 0;
    std::vector<std::uint8_t> mask;
    double fraction() const;
    bool contains(const Grid& gr, const PointRef& p) const;
    std::string to_csv(const Grid& gr) const;
};

UniformSet uniform_set(const MarkovModel& m, int n, double kappa, int horizon, int cap = 4096);

struct AdaptedReport {
    bool pass = false;
    double C = 1.0;
    PointRef witness;
};
AdaptedReport check_adapted(const MarkovModel& m, const ScaleFunction& s, const UniformSet& omega, int n1,
                            double C_bound = 16.0, int stride = 16);

struct TameReport {
    bool pass = false;
    double C = 0.0;
    double kappa = 0.5;
    double defect = 0.0;
    PointRef witness;
};
TameReport check_tame(const MarkovModel& m, const ScaleFunction& s, int samples = 16, double kappa = 0.5);

// [tau_k o w1(z) - tau_k o w1(x)] - [tau_k o w2(z) - tau_k o w2(x)]
double temporal_distance(const MarkovModel& m, const PointRef& x, const Word& w1, const Word& w2, const PointRef& z);

struct UniOptions {
    int samples_per_interval = 16;
    int omega_grid = 64;
    int window_sizes = 32;
    int s_samples = 256;
    int max_depth = 2;   // stable offset depth
    int prefix = 2;      // length of the contrasting prefixes
    int full_scan = 8;   // candidates per x scanned in full
};

struct UniCertificate {
    double eps = 0.0;
    double kappa = 0.0;
    double C1 = 1.0;
    Word w1, w2;          // witness contrast (stable offset)
    double y_bar = 0.0;   // |y| realized by the contrast depth
    PointRef x;           // worst base point
    double j1_lo = 0.0, j1_hi = 0.0; // witness J1 in rescaled coordinate
    int omega_grid = 64, window_sizes = 32, s_samples = 256;
    int points = 0;       // base points scanned
    std::string to_csv() const;
};

UniCertificate uni_scan(const MarkovModel& m, const ScaleFunction& s, const UniformSet& omega, double C1,
                        const UniOptions& opt = {});

struct RecurrenceRow {
    double kappa = 0.0;
    double bad_mass = 0.0;
    double bound = 0.0; // e^{-m kappa}
};
struct RecurrenceReport {
    int n1 = 0, m = 0, trials = 0;
    double mean_visits = 0.0;
    std::vector<RecurrenceRow> rows;
    std::string to_csv() const;
};

RecurrenceReport recurrence_rate(const MarkovModel& m, const Measure& nu, const UniformSet& omega, int n1, int steps,
                                 int trials, std::uint64_t seed);

} // namespace mixlab
