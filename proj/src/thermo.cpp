#include "mixlab/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace mixlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LinearMap edge_map(const MarkovModel& m, const std::vector<double>& w) {
    return [&m, &w](const std::vector<double>& v, std::vector<double>& out) {
        const EdgeTable& e = m.edges();
        for (std::size_t g = 0; g + 1 < e.start.size(); ++g) {
            double s = 0.0;
            for (std::size_t k = e.start[g]; k < e.start[g + 1]; ++k) {
                const Stencil& st = e.stencil[k];
                double val = st.t == 0.0 ? v[st.lo] : v[st.lo] * (1.0 - st.t) + v[st.lo + 1] * st.t;
                s += w[k] * val;
            }
            out[g] = s;
        }
    };
}

LinearMap edge_adjoint_map(const MarkovModel& m, const std::vector<double>& w) {
    return [&m, &w](const std::vector<double>& v, std::vector<double>& out) { out = edge_adjoint(m, w, v); };
}

EigenData eigendata_from_weights(const MarkovModel& m, const std::vector<double>& w) {
    const std::size_t n = m.grid().size();
    PowerResult pr = power_iterate(edge_map(m, w), n);
    std::vector<double> left = left_fixed_vector(edge_adjoint_map(m, w), n, pr.eigenvalue);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += left[i] * pr.vector[i];
    EigenData d;
    d.eigenvalue = pr.eigenvalue;
    d.iterations = pr.iterations;
    d.ratio_lo = pr.ratio_lo;
    d.ratio_hi = pr.ratio_hi;
    for (double& v : pr.vector) v /= mass;
    d.rho = RealFunction(m.grid_ptr(), std::move(pr.vector));
    d.left = std::move(left);
    return d;
}

} // namespace

NormalizedPotential::NormalizedPotential(ModelPtr model, PointFn base) : model_(std::move(model)), base_(std::move(base)) {
    rebuild_edges();
}

void NormalizedPotential::rebuild_edges() {
    const EdgeTable& e = model_->edges();
    const Grid& gr = model_->grid();
    edge_log_.assign(e.edges(), 0.0);
    for (std::size_t g = 0; g < gr.size(); ++g) {
        double at_x = 0.0;
        for (const auto& r : rhos_) at_x += std::log(r[g]);
        for (std::size_t k = e.start[g]; k < e.start[g + 1]; ++k) {
            double v = base_(e.point[k]) - at_x - log_e_;
            for (const auto& r : rhos_) v += std::log(r.eval(e.stencil[k]));
            edge_log_[k] = v;
        }
    }
}

std::vector<double> NormalizedPotential::edge_weights() const {
    std::vector<double> w(edge_log_.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(edge_log_[k]);
    return w;
}

double NormalizedPotential::value(const PointRef& y) const {
    double v = base_(y) - log_e_;
    if (!rhos_.empty()) {
        PointRef s = model_->forward(y);
        for (const auto& r : rhos_) v += std::log(r.eval(y)) - std::log(r.eval(s));
    }
    return v;
}

RealFunction NormalizedPotential::nodes() const {
    return RealFunction::sample(model_->grid_ptr(), [this](const PointRef& p) { return value(p); });
}

NormalizedPotential NormalizedPotential::twisted(const PointFn& extra, const RealFunction& rho, double eigenvalue) const {
    NormalizedPotential out = *this;
    PointFn old = base_;
    out.base_ = [old, extra](const PointRef& p) { return old(p) + extra(p); };
    out.rhos_.push_back(rho);
    out.log_e_ += std::log(eigenvalue);
    out.rebuild_edges();
    return out;
}

NormalizedPotential NormalizedPotential::conjugated(const RealFunction& rho, double eigenvalue) const {
    NormalizedPotential out = *this;
    out.rhos_.push_back(rho);
    out.log_e_ += std::log(eigenvalue);
    out.rebuild_edges();
    return out;
}

double NormalizedPotential::max_fiber_defect() const {
    const EdgeTable& e = model_->edges();
    double worst = 0.0;
    for (std::size_t g = 0; g + 1 < e.start.size(); ++g) {
        double s = 0.0;
        for (std::size_t k = e.start[g]; k < e.start[g + 1]; ++k) s += std::exp(edge_log_[k]);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

double section_potential_at(const MarkovModel& m, const PointRef& p) { return m.section_potential(p); }

RealFunction ruelle_apply(const MarkovModel& m, const RealFunction& weight, const RealFunction& u) {
    const EdgeTable& e = m.edges();
    std::vector<double> w(e.edges());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(weight.eval(e.stencil[k]));
    return edge_apply(m, w, u);
}

ComplexFunction ruelle_apply(const MarkovModel& m, const RealFunction& weight, const ComplexFunction& u) {
    const EdgeTable& e = m.edges();
    std::vector<double> w(e.edges());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(weight.eval(e.stencil[k]));
    return edge_apply(m, w, u);
}

RealFunction ruelle_apply(const MarkovModel& m, const PointFn& weight, const RealFunction& u) {
    std::vector<double> w = edge_sample(m, weight);
    for (double& v : w) v = std::exp(v);
    return edge_apply(m, w, u);
}

EigenData leading_eigendata(const MarkovModel& m, const PointFn& potential) {
    std::vector<double> w = edge_sample(m, potential);
    for (double& v : w) v = std::exp(v);
    return eigendata_from_weights(m, w);
}

EigenData leading_eigendata(const GibbsMeasure& g, double a) {
    const MarkovModel& m = *g.model;
    const EdgeTable& e = m.edges();
    std::vector<double> w(e.edges());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(g.fhat.edge_log()[k] + a * m.tau(e.point[k]));
    EigenData d = eigendata_from_weights(m, w);
    d.a = a;
    double mass = integrate(d.rho, g.nu);
    for (double& v : d.rho.values()) v /= mass;
    return d;
}

NormalizedPotential normalize_potential(const GibbsMeasure& g, double a, const EigenData& eig) {
    const MarkovModel* m = g.model.get();
    return g.fhat.twisted([m, a](const PointRef& p) { return a * m->tau(p); }, eig.rho, eig.eigenvalue);
}

NormalizedPotential normalize_potential(const GibbsMeasure& g, double a) {
    return normalize_potential(g, a, leading_eigendata(g, a));
}

double pressure(const MarkovModel& m, const PointFn& F) { return std::log(leading_eigendata(m, F).eigenvalue); }

double pressure(const MarkovModel& m, const RealFunction& F) {
    return pressure(m, [&F](const PointRef& p) { return F.eval(p); });
}

double pressure_root(const MarkovModel& m, const PointFn& F, double tol) {
    const double p0 = pressure(m, F);
    // Pr(F - s tau) has slope in [-tau_star, -tau0]
    double lo = std::min(p0 / m.tau_star, p0 / m.tau0) - 1e-6;
    double hi = std::max(p0 / m.tau_star, p0 / m.tau0) + 1e-6;
    auto P = [&](double s) {
        return pressure(m, [&](const PointRef& p) { return F(p) - s * m.tau(p); });
    };
    double plo = P(lo), phi = P(hi);
    if (!(plo > 0.0 && phi < 0.0)) {
        if (std::abs(plo) < 1e-15) return lo;
        if (std::abs(phi) < 1e-15) return hi;
        throw ConvergenceError("pressure root is not bracketed");
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double pm = P(mid);
        if (pm == 0.0) return mid;
        (pm > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

GibbsMeasure gibbs_measure(ModelPtr mp) {
    const MarkovModel& m = *mp;
    GibbsMeasure g;
    g.model = mp;
    const MarkovModel* raw = mp.get();
    PointFn FU = [raw](const PointRef& p) { return raw->section_potential(p); };
    g.flow_pressure = pressure_root(m, FU);
    const double s = g.flow_pressure;
    NormalizedPotential base(mp, [raw, s](const PointRef& p) { return raw->section_potential(p) - s * raw->tau(p); });
    std::vector<double> w = base.edge_weights();
    const std::size_t n = m.grid().size();
    PowerResult pr = power_iterate(edge_map(m, w), n);
    RealFunction rho(m.grid_ptr(), pr.vector);
    g.fhat = base.conjugated(rho, pr.eigenvalue);

    std::vector<double> wn = g.fhat.edge_weights();
    std::vector<double> nu = left_fixed_vector(edge_adjoint_map(m, wn), n, 1.0);
    g.nu = Measure(m.grid_ptr(), nu);
    g.fiber_defect = g.fhat.max_fiber_defect();

    double lhs = 0.0, rhs = 0.0;
    const Grid& gr = m.grid();
    for (std::size_t i = 0; i < n; ++i) {
        PointRef p = gr.node(i);
        lhs += nu[i] * std::sin(kTwoPi * m.forward(p).x);
        rhs += nu[i] * std::sin(kTwoPi * p.x);
    }
    g.invariance_defect = std::abs(lhs - rhs);
    return g;
}

double doubling_constant(const Measure& nu, const std::vector<double>& scales, int stride) {
    const Grid& gr = nu.grid();
    double best = 1e300;
    for (double r : scales) {
        if (r < gr.min_spacing()) throw DomainError("doubling_constant: radius below grid spacing");
        for (std::size_t g = 0; g < gr.size(); g += std::max(1, stride)) {
            PointRef p = gr.node(g);
            double big = nu.mass(p.interval, p.x - r, p.x + r);
            if (big <= 0.0) continue;
            double half = nu.mass(p.interval, p.x - 0.5 * r, p.x + 0.5 * r);
            best = std::min(best, half / big);
        }
    }
    return best;
}

namespace {

void check_gamma(double gamma0, int n) {
    if (n < 1) throw DomainError("moment: n must be >= 1");
    if (!(gamma0 > 0.0) || gamma0 > 1.0 / n + 1e-15)
        throw DomainError("moment: gamma0 must lie in (0, 1/n]");
}

double log_det_along(const MarkovModel& m, PointRef p, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        s += std::log(m.det(p));
        p = m.forward(p);
    }
    return s;
}

} // namespace

double fractional_moment(const MarkovModel& m, const Measure& nu, double gamma0, int n) {
    check_gamma(gamma0, n);
    const Grid& gr = m.grid();
    const auto& w = nu.weights();
    double s = 0.0;
    for (std::size_t g = 0; g < gr.size(); ++g)
        if (w[g] > 0.0) s += w[g] * std::exp(gamma0 * log_det_along(m, gr.node(g), n));
    return s;
}

bool is_non_expanding(const MarkovModel& m, const Measure& nu, double tol) {
    const Grid& gr = m.grid();
    const auto& w = nu.weights();
    double s = 0.0;
    for (std::size_t g = 0; g < gr.size(); ++g) s += w[g] * std::log(m.det(gr.node(g)));
    return s <= tol;
}

namespace {

constexpr int kCylSamples = 5;

// sup of det_n^gamma over the n-cylinder of word w
double cylinder_sup(const MarkovModel& m, const Word& w, double gamma0) {
    const Branch& last = m.branches[w.back()];
    double best = -1e300;
    for (int i = 0; i < kCylSamples; ++i) {
        double y = last.dom_left + (last.dom_right - last.dom_left) * i / (kCylSamples - 1);
        if (i == kCylSamples - 1) y = std::nextafter(y, last.dom_left);
        PointRef z = m.point(y);
        best = std::max(best, log_det_along(m, apply_branch(m, w, z), static_cast<int>(w.size())));
    }
    return std::exp(gamma0 * best);
}

std::pair<double, double> cylinder_span(const MarkovModel& m, const Word& w) {
    const Branch& last = m.branches[w.back()];
    double a = last.dom_left, b = last.dom_right;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        a = m.branches[*it].apply(a);
        b = m.branches[*it].apply(b);
    }
    return {std::min(a, b), std::max(a, b)};
}

} // namespace

double cylinder_moment(const GibbsMeasure& g, double gamma0, int n) {
    if (n < 1 || !(gamma0 > 0.0)) throw DomainError("cylinder_moment: need n >= 1 and gamma0 > 0");
    const MarkovModel& m = *g.model;
    std::vector<double> num(m.intervals.size(), 0.0), den(m.intervals.size(), 0.0);
    for (const Word& w : enumerate_branches(m, n)) {
        auto [a, b] = cylinder_span(m, w);
        int iv = m.branches[w.front()].target;
        double mass = g.nu.mass(iv, a, b);
        num[iv] += mass * cylinder_sup(m, w, gamma0);
        den[iv] += mass;
    }
    double best = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i)
        if (den[i] > 0.0) best = std::max(best, num[i] / den[i]);
    return best;
}

MomentReport moment_report(const GibbsMeasure& g, double gamma0, int n, const std::vector<int>& ks) {
    const MarkovModel& m = *g.model;
    MomentReport r;
    r.gamma0 = gamma0;
    r.n = n;
    r.k.push_back(1);
    for (int k : ks) r.k.push_back(k);
    for (int k : r.k) {
        r.moment.push_back(fractional_moment(m, g.nu, gamma0, k * n));
        r.cylinder.push_back(k <= 2 ? cylinder_moment(g, gamma0, k * n) : 0.0);
    }
    // Q_n(x) = sum_w e^{fhat_n(v_w x)} S_n(w) is comparable across each interval;
    // the ratio sup/inf is the constant of the submultiplicativity step.
    std::vector<Word> words = enumerate_branches(m, n);
    std::vector<double> S(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) S[i] = cylinder_sup(m, words[i], gamma0);
    double C = 1.0;
    constexpr int kPts = 33;
    for (const auto& iv : m.intervals) {
        double lo = 1e300, hi = 0.0;
        for (int j = 0; j < kPts; ++j) {
            PointRef x{iv.id, iv.left + iv.length() * j / (kPts - 1)};
            if (j == kPts - 1) x.x = std::nextafter(iv.right, iv.left);
            double q = 0.0;
            for (std::size_t i = 0; i < words.size(); ++i) {
                if (!m.branches[words[i].back()].accepts(iv.id)) continue;
                PointRef y = x;
                double f = 0.0;
                for (auto it = words[i].rbegin(); it != words[i].rend(); ++it) {
                    y = m.apply(*it, y);
                    f += g.fhat.value(y);
                }
                q += std::exp(f) * S[i];
            }
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        C = std::max(C, hi / lo);
    }
    r.C = C;
    double Mn = r.cylinder[0];
    r.C_min = 1.0;
    r.submultiplicative = true;
    for (std::size_t i = 1; i < r.k.size(); ++i) {
        if (r.k[i] > 2) continue;
        double k = r.k[i];
        r.C_min = std::max(r.C_min, std::pow(r.cylinder[i], 1.0 / k) / Mn);
        r.submultiplicative = r.submultiplicative && r.cylinder[i] <= std::pow(C * Mn, k) * (1.0 + 1e-12);
    }
    return r;
}

} // namespace mixlab
