#pragma once

#include "mixlab/function_space.hpp"
#include "mixlab/thermo.hpp"

#include <complex>
#include <string>
#include <vector>

namespace mixlab {

using Complex = std::complex<double>;

struct SmoothedPair {
    RealFunction f;   // f_(b)
    RealFunction tau; // tau_(b)
    double width = 0.0; // kernel half-width actually used
    bool clamped = false;
    double c1_f = 0.0, c1_tau = 0.0; // measured C^1 norms
};

// Triangular-kernel convolution per interval with even reflection at the ends.
RealFunction mollify(const RealFunction& u, double half_width, bool* clamped = nullptr);
SmoothedPair smooth_coefficients(const GibbsMeasure& g, double b, double delta1);

// Edge weights of L_{a,b}: e^{f^(a)(y) + i b tau(y)}.
std::vector<Complex> complex_rpf_weights(const NormalizedPotential& fa, double b);
ComplexFunction complex_rpf_apply(const GibbsMeasure& g, double a, double b, const ComplexFunction& u);

struct ComplexRPF {
    ModelPtr model;
    double a = 0.0, b = 0.0, delta1 = 0.1;
    SmoothedPair smooth;
    EigenData eig;           // (E_{a,b}, rho_{a,b})
    NormalizedPotential fab; // f^(a,b)
    std::vector<double> m_weights;  // M_{a,b}
    std::vector<Complex> l_weights; // tilde L_{a,b}
};

ComplexRPF make_complex_rpf(const GibbsMeasure& g, double a, double b, double delta1 = 0.1);
ComplexFunction tilde_rpf_apply(const ComplexRPF& r, const ComplexFunction& u);
RealFunction m_apply(const ComplexRPF& r, const RealFunction& u);

struct DecayRow {
    double b = 0.0;
    int n = 0;
    double c0 = 0.0, l2 = 0.0, seminorm = 0.0;
    bool flagged = false;
};

struct DecayProfile {
    std::vector<DecayRow> rows;
    double kappa = 0.0; // OLS slope of -log l2 against log b
    bool fitted = false;
    double theta = 0.5;
    std::string model_hash;
    std::string to_csv() const;
};

int decay_steps(double b, double c);
DecayProfile decay_profile(const GibbsMeasure& g, double a, const std::vector<double>& bs, double c,
                           const ComplexFunction& u);

struct LasotaYorke {
    double A = 0.0, B = 0.0;
    std::vector<double> seminorms;
};
LasotaYorke lasota_yorke_fit(const ComplexRPF& r, const ComplexFunction& u, int steps);

} // namespace mixlab
