#include "mixlab/scales_uni.hpp"
#include "mixlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>

namespace mixlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kDepthCap = 100000;

double circle_dist(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

std::vector<std::size_t> sample_nodes(const Grid& gr, int per_interval) {
    std::vector<std::size_t> out;
    for (const auto& iv : gr.intervals()) {
        int N = iv.grid_size;
        int step = std::max(1, N / std::max(1, per_interval));
        for (int i = 0; i <= N; i += step) out.push_back(gr.offset(iv.id) + i);
    }
    return out;
}

} // namespace

int ScaleFunction::depth_at(const MarkovModel& m, double eps, const PointRef& p) {
    if (!(eps > 0.0) || eps >= 1.0) throw DomainError("matching_scale: eps must lie in (0,1)");
    double prod = 1.0;
    PointRef q = p;
    for (int k = 1; k <= kDepthCap; ++k) {
        prod *= m.mu(q);
        if (prod < eps) return k;
        q = m.forward(q);
    }
    throw DomainError("matching_scale: stable contraction never reaches eps");
}

double ScaleFunction::value_at(const MarkovModel& m, double eps, const PointRef& p) {
    return expansion_cocycle(m, p, depth_at(m, eps, p)).value;
}

ScaleFunction matching_scale(const MarkovModel& m, double eps, bool certify) {
    ScaleFunction s;
    s.eps = eps;
    const Grid& gr = m.grid();
    s.values = RealFunction(m.grid_ptr());
    s.depth.resize(gr.size());
    s.min = 1e300;
    s.max = 0.0;
    for (std::size_t g = 0; g < gr.size(); ++g) {
        PointRef p = gr.node(g);
        s.depth[g] = ScaleFunction::depth_at(m, eps, p);
        s.values[g] = expansion_cocycle(m, p, s.depth[g]).value;
        s.min = std::min(s.min, s.values[g]);
        s.max = std::max(s.max, s.values[g]);
    }
    if (certify) s.certificate = check_stable(m, s);
    return s;
}

StabilityReport check_stable(const MarkovModel& m, const ScaleFunction& s, int max_m) {
    StabilityReport r;
    const Grid& gr = m.grid();
    auto nodes = sample_nodes(gr, 32);
    // worst (largest) log ratio / m for each m
    std::vector<double> worst(max_m + 1, -1e300);
    std::vector<PointRef> wit(max_m + 1);
    r.kappa_floor = 1e300;
    for (std::size_t g : nodes) {
        double L = s.values[g];
        r.kappa_floor = std::min(r.kappa_floor, std::log(L) / std::log(1.0 / s.eps));
    }
    r.slow_growth = -1000000;
    for (int mm = 1; mm <= max_m; ++mm) {
        for (const Word& v : enumerate_branches(m, mm)) {
            for (std::size_t g : nodes) {
                PointRef x = gr.node(g);
                if (!m.admissible(v, x.interval)) continue;
                PointRef vx = apply_branch(m, v, x);
                double Lv = ScaleFunction::value_at(m, s.eps, vx);
                double Lm = expansion_cocycle(m, vx, mm).value;
                double lr = std::log(Lv / (Lm * s.values[g])) / mm;
                if (lr > worst[mm]) {
                    worst[mm] = lr;
                    wit[mm] = x;
                }
                if (mm <= 4)
                    r.slow_growth = std::max(r.slow_growth, ScaleFunction::depth_at(m, s.eps, vx) - s.depth[g] - mm);
            }
        }
    }
    int n = max_m + 1;
    for (int mm = max_m; mm >= 1 && worst[mm] < 0.0; --mm) n = mm;
    if (n > max_m) {
        r.pass = false;
        r.n = max_m + 1;
        r.kappa = 0.0;
        r.witness = wit[max_m];
        return r;
    }
    r.n = n;
    r.kappa = 1e300;
    for (int mm = n; mm <= max_m; ++mm)
        if (-worst[mm] < r.kappa) {
            r.kappa = -worst[mm];
            r.witness = wit[mm];
        }
    r.margin = r.certified();
    r.pass = r.kappa > 0.0 && r.kappa_floor > 0.0;
    return r;
}

double UniformSet::fraction() const {
    if (mask.empty()) return 0.0;
    std::size_t c = 0;
    for (auto v : mask) c += v;
    return static_cast<double>(c) / mask.size();
}

bool UniformSet::contains(const Grid& gr, const PointRef& p) const {
    Stencil s = gr.locate(p);
    return mask[s.t > 0.5 ? s.lo + 1 : s.lo] != 0;
}

std::string UniformSet::to_csv(const Grid& gr) const {
    std::ostringstream o;
    o << "interval_id,index,member\n";
    for (std::size_t g = 0; g < mask.size(); ++g) {
        int a = gr.interval_of(g);
        o << a << ',' << (g - gr.offset(a)) << ',' << int(mask[g]) << '\n';
    }
    return o.str();
}

UniformSet uniform_set(const MarkovModel& m, int n, double kappa, int horizon, int cap) {
    if (horizon > cap) throw DomainError("uniform_set: horizon exceeds the orbit-evaluation cap");
    if (n < 0 || horizon < 0) throw DomainError("uniform_set: n and horizon must be >= 0");
    UniformSet u;
    u.n = n;
    u.kappa = kappa;
    u.horizon = horizon;
    const Grid& gr = m.grid();
    u.mask.assign(gr.size(), 1);
    for (std::size_t g = 0; g < gr.size(); ++g) {
        PointRef p = gr.node(g);
        double s = 0.0;
        for (int i = 1; i <= horizon; ++i) {
            s += std::log(m.det(p));
            if (i > n && s >= i * kappa) {
                u.mask[g] = 0;
                break;
            }
            p = m.forward(p);
        }
    }
    return u;
}

AdaptedReport check_adapted(const MarkovModel& m, const ScaleFunction& s, const UniformSet& omega, int n1,
                            double C_bound, int stride) {
    AdaptedReport r;
    const Grid& gr = m.grid();
    const double reach = 4.0 / s.min;
    for (std::size_t g = 0; g < gr.size(); g += std::max(1, stride)) {
        if (!omega.mask[g]) continue;
        PointRef x = gr.node(g);
        for (const Word& v : enumerate_branches(m, n1, x.interval)) {
            PointRef vx = apply_branch(m, v, x);
            const auto& iv = gr.intervals()[vx.interval];
            std::size_t off = gr.offset(vx.interval);
            long lo = static_cast<long>(std::floor((vx.x - reach - iv.left) / iv.spacing()));
            long hi = static_cast<long>(std::ceil((vx.x + reach - iv.left) / iv.spacing()));
            lo = std::max(0L, lo);
            hi = std::min<long>(iv.grid_size, hi);
            for (long i = lo; i <= hi; ++i) {
                double Ly = s.values[off + i];
                double y = gr.node(off + i).x;
                if (std::abs(y - vx.x) >= 4.0 / Ly) continue;
                double c = s.values[g] / Ly;
                if (c > r.C) {
                    r.C = c;
                    r.witness = x;
                }
            }
        }
    }
    r.pass = r.C <= C_bound;
    return r;
}

double temporal_distance(const MarkovModel& m, const PointRef& x, const Word& w1, const Word& w2, const PointRef& z) {
    if (w1.size() != w2.size()) throw DomainError("temporal_distance: words must have equal length");
    if (z.interval != x.interval) throw DomainError("temporal_distance: z must lie in the interval of x");
    if (!m.admissible(w1, x.interval) || !m.admissible(w2, x.interval))
        throw DomainError("temporal_distance: inadmissible word");
    return (tau_along(m, w1, z) - tau_along(m, w1, x)) - (tau_along(m, w2, z) - tau_along(m, w2, x));
}

namespace {

struct Contrast {
    Word a1, a2, c; // w_i = a_i c
    double y = 1.0;
};

std::vector<Contrast> contrasts(const MarkovModel& m, const PointRef& x, int max_depth, int prefix) {
    std::vector<Contrast> out;
    std::vector<Word> pre = enumerate_branches(m, prefix);
    for (int d = 0; d <= max_depth; ++d) {
        std::vector<Word> suffixes = d == 0 ? std::vector<Word>{Word{}} : enumerate_branches(m, d, x.interval);
        for (const Word& c : suffixes) {
            PointRef cx = c.empty() ? x : apply_branch(m, c, x);
            double y = 1.0;
            PointRef q = x;
            for (auto it = c.rbegin(); it != c.rend(); ++it) {
                q = m.apply(*it, q);
                y *= m.mu(q);
            }
            std::vector<const Word*> ok;
            for (const Word& a : pre)
                if (m.branches[a.back()].accepts(cx.interval)) ok.push_back(&a);
            for (std::size_t i = 0; i < ok.size(); ++i)
                for (std::size_t j = i + 1; j < ok.size(); ++j) out.push_back({*ok[i], *ok[j], c, y});
        }
    }
    return out;
}

// eps^{-1} Psi along the rescaled window; the common suffix cancels, so only
// the prefixes are summed.
std::vector<double> contrast_profile(const MarkovModel& m, const PointRef& x, const Contrast& k, double scale,
                                     int dir, double eps, int S) {
    std::vector<double> D(S);
    PointRef cx = k.c.empty() ? x : apply_branch(m, k.c, x);
    const double t1 = tau_along(m, k.a1, cx), t2 = tau_along(m, k.a2, cx);
    for (int i = 0; i < S; ++i) {
        PointRef z{x.interval, x.x + dir * (static_cast<double>(i) / S) / scale};
        PointRef cz = k.c.empty() ? z : apply_branch(m, k.c, z);
        D[i] = ((tau_along(m, k.a1, cz) - t1) - (tau_along(m, k.a2, cz) - t2)) / eps;
    }
    return D;
}

struct ScanResult {
    double kappa = 0.0;
    double j1_lo = 0.0, j1_hi = 0.0;
};

// min over omega of max over window sizes of min(|J1|, inf_{J1} dist(D, omega))
ScanResult scan_profile(const std::vector<double>& D, const UniOptions& opt) {
    const int S = static_cast<int>(D.size());
    std::vector<double> omegas;
    for (int k = 0; k < opt.omega_grid; ++k) omegas.push_back(kTwoPi * k / opt.omega_grid);
    for (int i = 0; i < S; i += std::max(1, S / 16)) omegas.push_back(std::fmod(std::fmod(D[i], kTwoPi) + kTwoPi, kTwoPi));
    ScanResult worst;
    worst.kappa = 1e300;
    std::vector<double> dist(S);
    for (double w : omegas) {
        for (int i = 0; i < S; ++i) dist[i] = circle_dist(D[i], w);
        ScanResult best;
        for (int j = 1; j <= opt.window_sizes; ++j) {
            const double len = static_cast<double>(j) / opt.window_sizes;
            const int L = std::max(1, static_cast<int>(std::lround(len * S)));
            if (len <= best.kappa) continue;
            std::deque<int> dq;
            double wmin = -1.0;
            int wpos = 0;
            for (int i = 0; i < S; ++i) {
                while (!dq.empty() && dist[dq.back()] >= dist[i]) dq.pop_back();
                dq.push_back(i);
                if (dq.front() <= i - L) dq.pop_front();
                if (i >= L - 1 && dist[dq.front()] > wmin) {
                    wmin = dist[dq.front()];
                    wpos = i - L + 1;
                }
            }
            double v = std::min(len, wmin);
            if (v > best.kappa) {
                best.kappa = v;
                best.j1_lo = static_cast<double>(wpos) / S;
                best.j1_hi = best.j1_lo + len;
            }
        }
        if (best.kappa < worst.kappa) worst = best;
    }
    return worst;
}

} // namespace

UniCertificate uni_scan(const MarkovModel& m, const ScaleFunction& s, const UniformSet& omega, double C1,
                        const UniOptions& opt) {
    if (C1 < 1.0) throw DomainError("uni_scan: C1 must be >= 1");
    UniCertificate cert;
    cert.eps = s.eps;
    cert.C1 = C1;
    cert.omega_grid = opt.omega_grid;
    cert.window_sizes = opt.window_sizes;
    cert.s_samples = opt.s_samples;
    const Grid& gr = m.grid();
    double kappa = 1e300;
    for (const auto& iv : gr.intervals()) {
        for (int i = 0; i < opt.samples_per_interval; ++i) {
            PointRef x{iv.id, iv.left + iv.length() * (i + 0.5) / opt.samples_per_interval};
            const double L = s.at(m, x);
            // W^u(x, C1/L) must meet omega
            bool meets = false;
            std::size_t off = gr.offset(iv.id);
            long lo = std::max(0L, static_cast<long>(std::floor((x.x - C1 / L - iv.left) / iv.spacing())));
            long hi = std::min<long>(iv.grid_size, static_cast<long>(std::ceil((x.x + C1 / L - iv.left) / iv.spacing())));
            for (long k = lo; k <= hi && !meets; ++k) meets = omega.mask[off + k] != 0;
            if (!meets) continue;
            int dir = 0;
            if (x.x + 1.0 / L <= iv.right) dir = 1;
            else if (x.x - 1.0 / L >= iv.left) dir = -1;
            if (dir == 0) continue;
            ++cert.points;

            auto cands = contrasts(m, x, opt.max_depth, opt.prefix);
            std::vector<std::pair<double, std::size_t>> proxy;
            std::vector<std::vector<double>> prof(cands.size());
            for (std::size_t c = 0; c < cands.size(); ++c) {
                prof[c] = contrast_profile(m, x, cands[c], L, dir, s.eps, opt.s_samples);
                auto [mn, mx] = std::minmax_element(prof[c].begin(), prof[c].end());
                proxy.push_back({-std::min(*mx - *mn, kTwoPi), c});
            }
            std::stable_sort(proxy.begin(), proxy.end());
            ScanResult best;
            best.kappa = -1.0;
            std::size_t best_c = 0;
            for (std::size_t r = 0; r < proxy.size() && static_cast<int>(r) < opt.full_scan; ++r) {
                ScanResult sr = scan_profile(prof[proxy[r].second], opt);
                if (sr.kappa > best.kappa) {
                    best = sr;
                    best_c = proxy[r].second;
                }
            }
            if (cands.empty()) best.kappa = 0.0;
            if (best.kappa < kappa) {
                kappa = best.kappa;
                cert.x = x;
                if (!cands.empty()) {
                    const Contrast& k = cands[best_c];
                    cert.w1 = k.a1;
                    cert.w1.insert(cert.w1.end(), k.c.begin(), k.c.end());
                    cert.w2 = k.a2;
                    cert.w2.insert(cert.w2.end(), k.c.begin(), k.c.end());
                    cert.y_bar = k.y;
                }
                cert.j1_lo = dir > 0 ? best.j1_lo : -best.j1_hi;
                cert.j1_hi = dir > 0 ? best.j1_hi : -best.j1_lo;
            }
        }
    }
    cert.kappa = cert.points > 0 ? std::max(0.0, kappa) : 0.0;
    return cert;
}

std::string UniCertificate::to_csv() const {
    std::ostringstream o;
    char buf[512];
    o << "eps,kappa,C1,w1,w2,y_bar,x_interval,x,j1_lo,j1_hi,omega_grid,window_sizes,s_samples,points\n";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%s,%.17g,%d,%.17g,%.17g,%.17g,%d,%d,%d,%d\n", eps, kappa, C1,
                  word_string(w1).c_str(), word_string(w2).c_str(), y_bar, x.interval, x.x, j1_lo, j1_hi, omega_grid,
                  window_sizes, s_samples, points);
    o << buf;
    return o.str();
}

TameReport check_tame(const MarkovModel& m, const ScaleFunction& s, int samples, double kappa) {
    TameReport r;
    r.kappa = kappa;
    const Grid& gr = m.grid();
    UniOptions opt;
    const int S = opt.s_samples;
    for (const auto& iv : gr.intervals()) {
        for (int i = 0; i < samples; ++i) {
            PointRef x{iv.id, iv.left + iv.length() * (i + 0.5) / samples};
            const double L = s.at(m, x);
            int dir = x.x + 1.0 / L <= iv.right ? 1 : -1;
            if (dir < 0 && x.x - 1.0 / L < iv.left) continue;
            for (const Contrast& k : contrasts(m, x, 3, 1)) {
                auto R = contrast_profile(m, x, k, L, dir, s.eps, S);
                double c0 = 0.0, sem = 0.0;
                for (double v : R) c0 = std::max(c0, std::abs(v));
                for (int d = 1; d < S; d *= 2)
                    for (int j = 0; j + d < S; ++j)
                        sem = std::max(sem, std::abs(R[j + d] - R[j]) / std::pow(static_cast<double>(d) / S, m.theta));
                double c = (c0 + sem) / std::pow(k.y, kappa);
                if (c > r.C) {
                    r.C = c;
                    r.witness = x;
                }
            }
        }
    }
    r.defect = 0.0; // R is the sampled rescaled temporal function itself
    r.pass = std::isfinite(r.C);
    return r;
}

RecurrenceReport recurrence_rate(const MarkovModel& m, const Measure& nu, const UniformSet& omega, int n1, int steps,
                                 int trials, std::uint64_t seed) {
    if (n1 < 1 || steps < 1 || trials < 1) throw DomainError("recurrence_rate: n1, m and trials must be positive");
    RecurrenceReport r;
    r.n1 = n1;
    r.m = steps;
    r.trials = trials;
    const Grid& gr = m.grid();
    std::vector<double> cells = nu.cell_masses();
    std::vector<double> cum(cells.size());
    std::partial_sum(cells.begin(), cells.end(), cum.begin());
    // cell index -> (interval, cell)
    std::vector<std::pair<int, int>> where;
    for (const auto& iv : gr.intervals())
        for (int c = 0; c < iv.grid_size; ++c) where.push_back({iv.id, c});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<int> visits(trials);
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        double u = U(rng) * cum.back();
        std::size_t c = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
        c = std::min(c, cum.size() - 1);
        const auto& iv = gr.intervals()[where[c].first];
        PointRef p{iv.id, iv.left + (where[c].second + U(rng)) * iv.spacing()};
        int count = 0;
        for (int j = 1; j <= steps; ++j) {
            for (int k = 0; k < n1; ++k) p = m.forward(p);
            if (omega.contains(gr, p)) ++count;
        }
        visits[t] = count;
        total += count;
    }
    r.mean_visits = total / trials;
    for (int k = 1; k <= 20; ++k) {
        RecurrenceRow row;
        row.kappa = 0.05 * k;
        int bad = 0;
        for (int v : visits) bad += v < row.kappa * steps;
        row.bad_mass = static_cast<double>(bad) / trials;
        row.bound = std::exp(-steps * row.kappa);
        r.rows.push_back(row);
    }
    return r;
}

std::string RecurrenceReport::to_csv() const {
    std::ostringstream o;
    char buf[160];
    o << "kappa,bad_mass,bound,n1,m,trials\n";
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d,%d\n", row.kappa, row.bad_mass, row.bound, n1, m, trials);
        o << buf;
    }
    return o.str();
}

} // namespace mixlab
