#include "mixlab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mixlab {

std::vector<double> edge_adjoint(const MarkovModel& m, const std::vector<double>& weight, const std::vector<double>& nu) {
    const EdgeTable& e = m.edges();
    std::vector<double> out(nu.size(), 0.0);
    for (std::size_t g = 0; g < nu.size(); ++g) {
        if (nu[g] == 0.0) continue;
        for (std::size_t k = e.start[g]; k < e.start[g + 1]; ++k) {
            const Stencil& s = e.stencil[k];
            double mass = nu[g] * weight[k];
            out[s.lo] += mass * (1.0 - s.t);
            if (s.t != 0.0) out[s.lo + 1] += mass * s.t;
        }
    }
    return out;
}

std::vector<double> edge_sample(const MarkovModel& m, const PointFn& f) {
    const EdgeTable& e = m.edges();
    std::vector<double> out(e.edges());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(e.point[k]);
    return out;
}

PowerResult power_iterate(const LinearMap& apply, std::size_t n, double tol, int cap) {
    PowerResult r;
    std::vector<double> v(n, 1.0), w(n);
    for (int it = 1; it <= cap; ++it) {
        apply(v, w);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(v[i] > 0.0) || !(w[i] > 0.0)) throw ConvergenceError("power iteration lost positivity");
            double q = w[i] / v[i];
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        r.ratio_lo = lo;
        r.ratio_hi = hi;
        r.iterations = it;
        double top = *std::max_element(w.begin(), w.end());
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / top;
        if ((hi - lo) <= tol * hi) {
            r.eigenvalue = 0.5 * (lo + hi);
            r.vector = v;
            return r;
        }
    }
    throw ConvergenceError("power iteration did not converge in " + std::to_string(cap) +
                           " iterations; ratio bounds [" + std::to_string(r.ratio_lo) + ", " +
                           std::to_string(r.ratio_hi) + "]");
}

std::vector<double> left_fixed_vector(const LinearMap& adjoint, std::size_t n, double eigenvalue, double tol, int cap) {
    std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n);
    for (int it = 1; it <= cap; ++it) {
        adjoint(v, w);
        double tot = std::accumulate(w.begin(), w.end(), 0.0);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] /= tot;
            diff += std::abs(w[i] - v[i]);
        }
        v.swap(w);
        if (diff < tol) return v;
    }
    (void)eigenvalue;
    throw ConvergenceError("adjoint iteration did not converge in " + std::to_string(cap) + " iterations");
}

WordTable build_word_table(const MarkovModel& m, int length, const PointFn& potential, std::size_t cap) {
    WordTable t;
    t.length = length;
    t.words = enumerate_branches(m, length);
    const Grid& gr = m.grid();
    if (static_cast<double>(t.words.size()) * gr.size() > static_cast<double>(cap))
        throw SizeError("word table would hold more than " + std::to_string(cap) + " entries");
    std::vector<std::vector<int>> by_interval(gr.intervals().size());
    for (std::size_t i = 0; i < t.words.size(); ++i)
        for (const auto& iv : gr.intervals())
            if (m.branches[t.words[i].back()].accepts(iv.id)) by_interval[iv.id].push_back(static_cast<int>(i));
    t.start.assign(gr.size() + 1, 0);
    for (std::size_t g = 0; g < gr.size(); ++g) {
        t.start[g] = t.word.size();
        PointRef x = gr.node(g);
        for (int wi : by_interval[x.interval]) {
            const Word& w = t.words[wi];
            PointRef y = x;
            double lw = 0.0, tau = 0.0;
            for (auto it = w.rbegin(); it != w.rend(); ++it) {
                y = m.apply(*it, y);
                lw += potential(y);
                tau += m.tau(y);
            }
            t.word.push_back(wi);
            t.point.push_back(y);
            t.stencil.push_back(gr.locate(y));
            t.log_weight.push_back(lw);
            t.tau.push_back(tau);
        }
    }
    t.start[gr.size()] = t.word.size();
    return t;
}

} // namespace mixlab
