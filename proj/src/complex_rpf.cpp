#include "mixlab/complex_rpf.hpp"

#include "mixlab/transfer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mixlab {

namespace {

// even reflection into [0, N]
std::size_t reflect(long i, long N) {
    const long period = 2 * N;
    long r = i % period;
    if (r < 0) r += period;
    return static_cast<std::size_t>(r <= N ? r : period - r);
}

double c1_norm(const RealFunction& u) {
    const Grid& gr = u.grid();
    double c0 = 0.0, d = 0.0;
    for (const auto& iv : gr.intervals()) {
        std::size_t off = gr.offset(iv.id);
        const int N = iv.grid_size;
        const double h = iv.spacing();
        for (int i = 0; i <= N; ++i) {
            c0 = std::max(c0, std::abs(u[off + i]));
            int l = std::max(0, i - 1), r = std::min(N, i + 1);
            d = std::max(d, std::abs(u[off + r] - u[off + l]) / ((r - l) * h));
        }
    }
    return c0 + d;
}

} // namespace

RealFunction mollify(const RealFunction& u, double half_width, bool* clamped) {
    const Grid& gr = u.grid();
    RealFunction out(u.grid_ptr());
    bool was_clamped = false;
    for (const auto& iv : gr.intervals()) {
        const long N = iv.grid_size;
        const std::size_t off = gr.offset(iv.id);
        // weights (K - |m|) for |m| < K: the convolution of two boxes of K samples
        long K = std::lround(half_width / iv.spacing());
        if (K < 2) {
            K = 2;
            was_clamped = true;
        }
        // box of K samples starting at m = -(K-1), then box of K samples ending at 0
        std::vector<double> ext(N + 1 + 2 * K);
        for (long i = 0; i < static_cast<long>(ext.size()); ++i) ext[i] = u[off + reflect(i - K, N)];
        // prefix sums give first box B1[i] = sum_{j=i}^{i+K-1} ext[j]
        std::vector<double> pre(ext.size() + 1, 0.0);
        for (std::size_t i = 0; i < ext.size(); ++i) pre[i + 1] = pre[i] + ext[i];
        const long M = static_cast<long>(ext.size()) - K + 1;
        std::vector<double> box(M);
        for (long i = 0; i < M; ++i) box[i] = pre[i + K] - pre[i];
        std::vector<double> pre2(M + 1, 0.0);
        for (long i = 0; i < M; ++i) pre2[i + 1] = pre2[i] + box[i];
        const double norm = static_cast<double>(K) * K;
        for (long i = 0; i <= N; ++i) {
            // node i sits at ext index i + K; window of box starts i+1 .. i+K
            long a = i + 1, b = i + K;
            out[off + i] = (pre2[b + 1] - pre2[a]) / norm;
        }
    }
    if (clamped) *clamped = was_clamped;
    return out;
}

SmoothedPair smooth_coefficients(const GibbsMeasure& g, double b, double delta1) {
    if (!(delta1 > 0.0 && delta1 < 1.0)) throw DomainError("smooth_coefficients: delta1 must lie in (0,1)");
    if (b == 0.0) throw DomainError("smooth_coefficients: b must be nonzero");
    const MarkovModel& m = *g.model;
    SmoothedPair s;
    s.width = std::pow(std::abs(b), -delta1 / 2.0);
    bool c1 = false, c2 = false;
    s.f = mollify(g.fhat.nodes(), s.width, &c1);
    s.tau = mollify(RealFunction::sample(m.grid_ptr(), [&m](const PointRef& p) { return m.tau(p); }), s.width, &c2);
    s.clamped = c1 || c2;
    s.c1_f = c1_norm(s.f);
    s.c1_tau = c1_norm(s.tau);
    return s;
}

std::vector<Complex> complex_rpf_weights(const NormalizedPotential& fa, double b) {
    const MarkovModel& m = fa.model();
    const EdgeTable& e = m.edges();
    std::vector<Complex> w(e.edges());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(Complex(fa.edge_log()[k], b * m.tau(e.point[k])));
    return w;
}

ComplexFunction complex_rpf_apply(const GibbsMeasure& g, double a, double b, const ComplexFunction& u) {
    NormalizedPotential fa = a == 0.0 ? g.fhat : normalize_potential(g, a);
    return edge_apply(*g.model, complex_rpf_weights(fa, b), u);
}

ComplexRPF make_complex_rpf(const GibbsMeasure& g, double a, double b, double delta1) {
    ComplexRPF r;
    r.model = g.model;
    r.a = a;
    r.b = b;
    r.delta1 = delta1;
    r.smooth = smooth_coefficients(g, b, delta1);
    const MarkovModel& m = *g.model;
    const RealFunction fs = r.smooth.f, ts = r.smooth.tau;
    PointFn base = [fs, ts, a](const PointRef& p) { return fs.eval(p) + a * ts.eval(p); };
    r.eig = leading_eigendata(m, base);
    r.eig.a = a;
    double mass = integrate(r.eig.rho, g.nu);
    for (double& v : r.eig.rho.values()) v /= mass;
    r.fab = NormalizedPotential(g.model, base).conjugated(r.eig.rho, r.eig.eigenvalue);
    r.m_weights = r.fab.edge_weights();
    const EdgeTable& e = m.edges();
    r.l_weights.resize(e.edges());
    for (std::size_t k = 0; k < e.edges(); ++k)
        r.l_weights[k] = r.m_weights[k] * std::exp(Complex(0.0, b * m.tau(e.point[k])));
    return r;
}

ComplexFunction tilde_rpf_apply(const ComplexRPF& r, const ComplexFunction& u) {
    return edge_apply(*r.model, r.l_weights, u);
}

RealFunction m_apply(const ComplexRPF& r, const RealFunction& u) { return edge_apply(*r.model, r.m_weights, u); }

int decay_steps(double b, double c) { return static_cast<int>(std::ceil(c * std::log(std::abs(b)))); }

DecayProfile decay_profile(const GibbsMeasure& g, double a, const std::vector<double>& bs, double c,
                           const ComplexFunction& u) {
    const MarkovModel& m = *g.model;
    DecayProfile out;
    out.theta = m.theta;
    out.model_hash = m.hash;
    NormalizedPotential fa = a == 0.0 ? g.fhat : normalize_potential(g, a);
    for (double b : bs) {
        int n = std::abs(b) > 1.0 ? decay_steps(b, c) : 0;
        auto w = complex_rpf_weights(fa, b);
        ComplexFunction v = u;
        for (int i = 0; i < n; ++i) v = edge_apply(m, w, v);
        DecayRow row;
        row.b = b;
        row.n = n;
        row.c0 = c0_norm(v);
        row.l2 = l2_norm(v, g.nu);
        row.seminorm = holder_seminorm(v, m.theta);
        row.flagged = !std::isfinite(row.c0) || !std::isfinite(row.l2) || row.l2 < 1e-300;
        out.rows.push_back(row);
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : out.rows)
        if (!r.flagged && std::abs(r.b) > 1.0) pts.push_back({std::log(std::abs(r.b)), -std::log(r.l2)});
    if (pts.size() >= 4) {
        double mx = 0, my = 0;
        for (auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= pts.size();
        my /= pts.size();
        double sxy = 0, sxx = 0;
        for (auto& [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        if (sxx > 0) {
            out.kappa = sxy / sxx;
            out.fitted = true;
        }
    }
    return out;
}

std::string DecayProfile::to_csv() const {
    std::ostringstream o;
    o << "b,n,c0,l2,seminorm,theta,model_hash,flag\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%s,%s\n", r.b, r.n, r.c0, r.l2, r.seminorm,
                      theta, model_hash.c_str(), r.flagged ? "flagged" : "ok");
        o << buf;
    }
    return o.str();
}

LasotaYorke lasota_yorke_fit(const ComplexRPF& r, const ComplexFunction& u, int steps) {
    const MarkovModel& m = *r.model;
    LasotaYorke out;
    const double s0 = holder_seminorm(u, m.theta);
    const double c0 = c0_norm(u);
    ComplexFunction v = u;
    for (int n = 0; n <= steps; ++n) {
        out.seminorms.push_back(holder_seminorm(v, m.theta));
        if (n < steps) v = tilde_rpf_apply(r, v);
    }
    // least squares for s_n ~ A q^n s0 + B c0, then B raised until the bound holds
    const double q = std::exp(-m.theta * m.chi0);
    Eigen::MatrixXd X(steps + 1, 2);
    Eigen::VectorXd y(steps + 1);
    for (int n = 0; n <= steps; ++n) {
        X(n, 0) = std::pow(q, n) * s0;
        X(n, 1) = c0;
        y(n) = out.seminorms[n];
    }
    Eigen::VectorXd sol = X.colPivHouseholderQr().solve(y);
    out.A = std::max(0.0, sol(0));
    out.B = std::max(0.0, sol(1));
    if (c0 > 0.0)
        for (int n = 0; n <= steps; ++n)
            out.B = std::max(out.B, (out.seminorms[n] - out.A * std::pow(q, n) * s0) / c0);
    return out;
}

} // namespace mixlab
