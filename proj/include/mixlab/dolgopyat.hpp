#pragma once

#include "mixlab/complex_rpf.hpp"
#include "mixlab/scales_uni.hpp"
#include "mixlab/transfer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mixlab {

// Cylinder v_word(U) inside one interval; nodes first..last belong to it.
struct Atom {
    Word word;
    int interval = 0;
    double lo = 0.0, hi = 0.0;
    std::size_t first = 0, last = 0;
    PointRef z;        // node maximizing Lambda^{-1}
    double inv_scale = 0.0; // Lambda(z)^{-1}
    int depth = 0;
    double length() const { return hi - lo; }
};

struct CylinderPartition {
    std::vector<Atom> atoms;
    std::vector<int> atom_of; // node -> atom
    double C1 = 1.0;
    double eps = 0.0;
    bool contained = false;  // U_i inside W^u(z, C1 Lambda(z)^{-1})
    bool half_neighbourhood = false;
    int find(const MarkovModel& m, const PointRef& p) const;
};

CylinderPartition build_partition(const MarkovModel& m, const ScaleFunction& s, double C1);
// True when every atom of `fine` lies inside one atom of `coarse`.
bool refines(const CylinderPartition& fine, const CylinderPartition& coarse);
// Smallest n such that every v_w(A), |w| = n, lies in one atom and has length <= Lambda(v_w z)^{-1}.
int refining_depth(const MarkovModel& m, const CylinderPartition& p, const ScaleFunction& s, int max_n = 12);

struct ConeReport {
    bool member = false;
    double margin = 0.0; // 1 - max rescaled log-derivative
    PointRef witness;
};
ConeReport cone_membership(const RealFunction& h, const ScaleFunction& s, double tol = 1e-9);

// Bump profile: 1 on [0,1/8] and [7/8,1], 1-kappa5 on [1/4,3/4], C^1 ramps.
double zeta(double s, double kappa5);
constexpr double kZetaSlope = 8.0 / 0.9; // max |zeta'| / kappa5

struct EngineParams {
    double delta1 = 0.1;
    double C1 = 8.0;
    double kappa5 = 0.05;
    double C8 = 4.0;
    double C9 = 8.0;
    double eta1 = 1.0;
    double eps = 0.0; // 0 selects 1/|b|
    int steps = 0;    // 0 selects floor(ln |b|)
    int omega_n = 4;
    double omega_kappa = 0.1;
    int omega_horizon = 64;
    UniOptions uni;
};

struct Engine {
    ModelPtr model;
    double a = 0.0, b = 0.0;
    EngineParams params;
    ComplexRPF rpf;
    ScaleFunction scale;
    CylinderPartition partition;
    int n1 = 1;
    WordTable table;
    std::vector<double> m_weights;  // M^{n1}, renormalized so that M^{n1} 1 = 1
    std::vector<Complex> l_weights; // tilde L^{n1}
    double word_eigenvalue = 1.0;
    UniformSet omega;
    UniCertificate uni;
    double kappa6 = 0.0;
    bool refused = false; // no UNI, no cancellation
    std::vector<std::uint8_t> atom_in_omega;
};

Engine make_engine(const GibbsMeasure& g, double a, double b, const EngineParams& params = {});

struct MajorantState {
    int n = 0;
    ComplexFunction u;
    RealFunction H;
    RealFunction P;
    std::vector<std::uint8_t> omega_next; // nodes x with some v_w(x) in a bump core
    int bumps = 0;
    int small_bumps = 0, pair_bumps = 0, dropped = 0;
};

MajorantState initial_state(const Engine& e, const ComplexFunction& u0, double H0);

enum class BranchKind { Small, Aligned, Indeterminate };

struct DichotomyResult {
    BranchKind kind = BranchKind::Indeterminate;
    double omega = 0.0;     // circular mean of the argument
    double max_ratio = 0.0; // sup |u|/H at v_w(y)
    double min_ratio = 0.0;
    double spread = 0.0;    // max angular distance to omega
};

DichotomyResult dichotomy_test(const Engine& e, const MajorantState& s, const Atom& atom, int word);

struct Bump {
    std::size_t atom = 0;
    int word = 0;
    int interval = 0;
    double lo = 0.0, hi = 0.0; // window in the image interval
    double depth = 0.0;        // effective kappa5
    int kind = 1;              // 1: small branch, 2: separated pair
};

// Fills s.P and s.omega_next; returns the bumps that survived verification.
std::vector<Bump> build_cancellation(const Engine& e, MajorantState& s);

MajorantState majorant_step(const Engine& e, const MajorantState& s);

struct CauchySchwarzReport {
    double max_violation = 0.0; // max of (M(PH))^2 - MP^2 MH^2, relative
    double kappa4 = 0.0;        // min over omega_next of 1 - M P^2
    bool pass = false;
};
CauchySchwarzReport cauchy_schwarz_check(const MarkovModel& m, const WordTable& t, const std::vector<double>& w,
                                         const RealFunction& P, const RealFunction& H,
                                         const std::vector<std::uint8_t>& omega, double tol = 1e-12);

struct IterationRow {
    int n = 0;
    double u_c0 = 0.0, u_l2 = 0.0, H_l2 = 0.0, H_min = 0.0, u_seminorm = 0.0;
    double omega_fraction = 0.0;
    int bumps = 0;
    double kappa4 = 0.0, cs_violation = 0.0, cone_margin = 0.0;
};

struct L2Certificate {
    std::string model_hash;
    double a = 0.0, b = 0.0;
    double u_norm = 0.0; // ||u||_{theta,b}
    int burn_in = 0, n1 = 1, steps = 0;
    bool truncated = false;
    int truncated_at = -1;
    bool refused = false;
    double kappa = 0.0; // -ln(||H_L|| / ||u||) / ln b
    double kappa4 = 0.0, kappa5 = 0.0, kappa6 = 0.0, C8 = 0.0;
    double drift = 0.0;       // ||u_true - u_engine||_C0
    double bound = 0.0;       // 2 drift^2 + 2 ||H_L||^2
    double true_l2 = 0.0;     // ||tilde L^{burn + L n1} u||_L2
    std::size_t violations = 0;
    double max_cs_violation = 0.0;
    RecurrenceReport recurrence;
    std::vector<IterationRow> rows;
    bool pass = false;
    std::string to_csv() const;
    std::string summary_csv() const;
};

L2Certificate run_l2_iteration(const GibbsMeasure& g, double a, double b, const ComplexFunction& u,
                               const EngineParams& params = {});
L2Certificate run_l2_iteration(const Engine& e, const GibbsMeasure& g, const ComplexFunction& u);

} // namespace mixlab
