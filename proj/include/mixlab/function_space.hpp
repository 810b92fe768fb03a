#pragma once

#include "mixlab/errors.hpp"
#include "mixlab/grid.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

// Probability measure on U given by node weights; cells see a uniform density.
class Measure {
public:
    Measure() = default;
    Measure(GridPtr grid, std::vector<double> node_weights);
    static Measure lebesgue(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::vector<double>& weights() const { return w_; }
    std::vector<double> cell_masses() const; // N per interval, in interval order
    double total() const;
    // nu([lo, hi] inside one interval)
    double mass(int interval, double lo, double hi) const;
    std::string to_csv() const; // interval_id,index,weight

private:
    GridPtr grid_;
    std::vector<double> w_;
    std::vector<double> cells_;
    std::vector<double> cum_; // prefix sums of cells per interval (with leading 0)
};

struct HolderReport {
    double c0 = 0.0;
    double seminorm = 0.0;
    double theta = 1.0;
    std::optional<double> b;
    double norm = 0.0;
};

struct SubInterval {
    int interval = 0;
    double lo = 0.0;
    double hi = 1.0;
};

struct PolyApprox {
    int degree = 0;
    std::vector<double> coefficients; // monomial basis in the original variable
    double error = 0.0;
    double lo = -1.0, hi = 1.0;
    std::vector<double> equioscillation; // reference points
    std::vector<double> signed_errors;   // u - p at the reference points
    int iterations = 0;

    double operator()(double s) const;
};

struct RemezError : ConvergenceError {
    RemezError(const std::string& msg, PolyApprox best) : ConvergenceError(msg), best_so_far(std::move(best)) {}
    PolyApprox best_so_far;
};

double holder_seminorm(const RealFunction& u, double theta);
double holder_seminorm(const ComplexFunction& u, double theta);
HolderReport norm_theta_b(const RealFunction& u, double theta, std::optional<double> b = std::nullopt);
HolderReport norm_theta_b(const ComplexFunction& u, double theta, std::optional<double> b = std::nullopt);
double c0_norm(const RealFunction& u);
double c0_norm(const ComplexFunction& u);

double oscillation(const RealFunction& u, const SubInterval& J);

// Discrete minimax fit of degree <= K to (xs, ys) by single-point exchange.
PolyApprox minimax(const std::vector<double>& xs, const std::vector<double>& ys, int K, int max_iter = 500);
PolyApprox poly_distance(const RealFunction& u, int K, const SubInterval& J);

double integrate(const RealFunction& u, const Measure& nu);
std::complex<double> integrate(const ComplexFunction& u, const Measure& nu);
double l2_norm(const RealFunction& u, const Measure& nu);
double l2_norm(const ComplexFunction& u, const Measure& nu);

} // namespace mixlab
