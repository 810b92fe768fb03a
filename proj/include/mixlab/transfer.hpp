#pragma once

#include "mixlab/errors.hpp"
#include "mixlab/grid.hpp"
#include "mixlab/markov_model.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace mixlab {

// (Lu)(x_g) = sum over the one-step preimages e of x_g of weight[e] * u(y_e).
template <class W, class T>
auto edge_apply(const MarkovModel& m, const std::vector<W>& weight, const GridFunction<T>& u) {
    using R = decltype(W{} * T{});
    const EdgeTable& e = m.edges();
    GridFunction<R> out(m.grid_ptr());
    const std::size_t n = m.grid().size();
    for (std::size_t g = 0; g < n; ++g) {
        R s{};
        for (std::size_t k = e.start[g]; k < e.start[g + 1]; ++k) s += weight[k] * u.eval(e.stencil[k]);
        out[g] = s;
    }
    return out;
}

// Transpose of edge_apply acting on node weights.
std::vector<double> edge_adjoint(const MarkovModel& m, const std::vector<double>& weight, const std::vector<double>& nu);

// Per-edge samples of a point function at the preimage points.
std::vector<double> edge_sample(const MarkovModel& m, const PointFn& f);

struct PowerResult {
    double eigenvalue = 0.0;
    std::vector<double> vector;
    int iterations = 0;
    double ratio_lo = 0.0, ratio_hi = 0.0;
};

using LinearMap = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Power iteration for a positive operator; stops once the ratio field
// (Lv)/v has relative oscillation below tol.
PowerResult power_iterate(const LinearMap& apply, std::size_t n, double tol = 1e-12, int cap = 10000);

// Fixed vector of the transpose, normalized to total mass 1.
std::vector<double> left_fixed_vector(const LinearMap& adjoint, std::size_t n, double eigenvalue, double tol = 1e-12,
                                      int cap = 10000);

// Sum over admissible words w of length n of weight(w, x) * u(v_w x), with u
// interpolated only at the final point v_w(x).
struct WordTable {
    int length = 0;
    std::vector<Word> words;
    std::vector<std::size_t> start; // per node, CSR into the entry arrays
    std::vector<int> word;
    std::vector<PointRef> point;
    std::vector<Stencil> stencil;
    std::vector<double> log_weight; // Birkhoff sum of the potential along the chain
    std::vector<double> tau;        // Birkhoff sum of the roof along the chain

    std::size_t entries() const { return word.size(); }
};

WordTable build_word_table(const MarkovModel& m, int length, const PointFn& potential,
                           std::size_t cap = std::size_t(1) << 26);

template <class W, class T>
auto word_apply(const MarkovModel& m, const WordTable& t, const std::vector<W>& weight, const GridFunction<T>& u) {
    using R = decltype(W{} * T{});
    GridFunction<R> out(m.grid_ptr());
    const std::size_t n = m.grid().size();
    for (std::size_t g = 0; g < n; ++g) {
        R s{};
        for (std::size_t k = t.start[g]; k < t.start[g + 1]; ++k) s += weight[k] * u.eval(t.stencil[k]);
        out[g] = s;
    }
    return out;
}

} // namespace mixlab
