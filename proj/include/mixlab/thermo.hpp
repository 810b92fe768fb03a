#pragma once

#include "mixlab/function_space.hpp"
#include "mixlab/markov_model.hpp"
#include "mixlab/transfer.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mixlab {

struct EigenData {
    double a = 0.0;
    double eigenvalue = 1.0;
    RealFunction rho;               // normalized so that its Gibbs integral is 1
    std::vector<double> left;       // conformal node weights, total mass 1
    int iterations = 0;
    double ratio_lo = 0.0, ratio_hi = 0.0;
};

// f(y) = base(y) + sum_i log rho_i(y) - sum_i log rho_i(sigma y) - log_E.
// Edge values use the exact node value at sigma y, so fiber sums of e^f equal
// the eigen ratio of the underlying operator.
class NormalizedPotential {
public:
    NormalizedPotential() = default;
    NormalizedPotential(ModelPtr model, PointFn base);

    const MarkovModel& model() const { return *model_; }
    const ModelPtr& model_ptr() const { return model_; }
    double log_eigenvalue() const { return log_e_; }
    const std::vector<double>& edge_log() const { return edge_log_; }
    std::vector<double> edge_weights() const;

    double value(const PointRef& y) const;
    RealFunction nodes() const;

    // Multiply the base by exp(extra) and conjugate by the eigenpair of the result.
    NormalizedPotential twisted(const PointFn& extra, const RealFunction& rho, double eigenvalue) const;
    // Same conjugation without an extra term.
    NormalizedPotential conjugated(const RealFunction& rho, double eigenvalue) const;

    double max_fiber_defect() const; // max_g |sum_e e^{f(y_e)} - 1|

private:
    ModelPtr model_;
    PointFn base_;
    std::vector<RealFunction> rhos_;
    double log_e_ = 0.0;
    std::vector<double> edge_log_;
    void rebuild_edges();
};

struct GibbsMeasure {
    ModelPtr model;
    double flow_pressure = 0.0; // root of Pr(F_U - s tau) = 0
    NormalizedPotential fhat;
    Measure nu;
    double fiber_defect = 0.0;
    double invariance_defect = 0.0; // on u = sin(2 pi x)
};

double section_potential_at(const MarkovModel& m, const PointRef& p);

RealFunction ruelle_apply(const MarkovModel& m, const RealFunction& weight, const RealFunction& u);
ComplexFunction ruelle_apply(const MarkovModel& m, const RealFunction& weight, const ComplexFunction& u);
RealFunction ruelle_apply(const MarkovModel& m, const PointFn& weight, const RealFunction& u);

// Leading eigendata of the operator with weights exp(potential) at the preimages.
EigenData leading_eigendata(const MarkovModel& m, const PointFn& potential);
// Leading eigendata of the operator with potential fhat + a tau.
EigenData leading_eigendata(const GibbsMeasure& g, double a);
NormalizedPotential normalize_potential(const GibbsMeasure& g, double a);
NormalizedPotential normalize_potential(const GibbsMeasure& g, double a, const EigenData& eig);

GibbsMeasure gibbs_measure(ModelPtr m);

double pressure(const MarkovModel& m, const PointFn& F);
double pressure(const MarkovModel& m, const RealFunction& F);
// Root s of Pr(F - s tau) = 0 by bisection.
double pressure_root(const MarkovModel& m, const PointFn& F, double tol = 1e-12);

// min over sampled (x, rho) of nu(B(x, rho/2)) / nu(B(x, rho)), balls cut to the interval.
double doubling_constant(const Measure& nu, const std::vector<double>& scales, int stride = 1);

// Integral of prod_{i<n} det(sigma^i x)^gamma0 against nu.
double fractional_moment(const MarkovModel& m, const Measure& nu, double gamma0, int n);
bool is_non_expanding(const MarkovModel& m, const Measure& nu, double tol = 1e-12);

struct MomentReport {
    double gamma0 = 0.0;
    int n = 0;
    std::vector<int> k;
    std::vector<double> moment;   // fractional_moment at k*n
    std::vector<double> cylinder; // M_{k n}
    double C = 1.0;               // distortion constant of the submultiplicativity argument
    double C_min = 1.0;           // smallest C that makes M_{kn} <= (C M_n)^k
    bool submultiplicative = false;
};

// M_n = sup_alpha nu(U_alpha)^{-1} int_{U_alpha} S_n, S_n the sup of det_n^gamma0 over n-cylinders.
double cylinder_moment(const GibbsMeasure& g, double gamma0, int n);
MomentReport moment_report(const GibbsMeasure& g, double gamma0, int n, const std::vector<int>& ks = {2, 3});

} // namespace mixlab
