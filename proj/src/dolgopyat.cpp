#include "mixlab/dolgopyat.hpp"
#include "mixlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mixlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circle_dist(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

// v_w on a global coordinate (last symbol first).
double chain(const MarkovModel& m, const Word& w, double x) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) x = m.branches[*it].apply(x);
    return x;
}

std::pair<double, double> image(const MarkovModel& m, const Word& w, double lo, double hi) {
    double a = chain(m, w, lo), b = chain(m, w, hi);
    return {std::min(a, b), std::max(a, b)};
}

// Nodes of interval iv with coordinate in [lo, hi); the right end node joins the last cell.
std::pair<long, long> node_range(const MarkovInterval& iv, double lo, double hi) {
    const double h = iv.spacing();
    long first = static_cast<long>(std::ceil((lo - iv.left) / h - 1e-9));
    long last = static_cast<long>(std::ceil((hi - iv.left) / h - 1e-9)) - 1;
    if (hi >= iv.right - 1e-12 * iv.length()) last = iv.grid_size;
    return {std::max(0L, first), std::min<long>(iv.grid_size, last)};
}

int target_interval(const MarkovModel& m, const Word& w) { return m.branches[w.front()].target; }

} // namespace

int CylinderPartition::find(const MarkovModel& m, const PointRef& p) const {
    const Grid& gr = m.grid();
    const auto& iv = gr.intervals()[p.interval];
    long i = static_cast<long>(std::floor((p.x - iv.left) / iv.spacing()));
    i = std::clamp<long>(i, 0, iv.grid_size);
    int k = atom_of[gr.offset(p.interval) + i];
    while (k + 1 < static_cast<int>(atoms.size()) && atoms[k + 1].interval == p.interval && p.x >= atoms[k + 1].lo)
        ++k;
    while (k > 0 && atoms[k].interval == p.interval && p.x < atoms[k].lo) --k;
    return k;
}

CylinderPartition build_partition(const MarkovModel& m, const ScaleFunction& s, double C1) {
    if (C1 <= 0.0) throw DomainError("build_partition: C1 must be positive");
    CylinderPartition part;
    part.C1 = C1;
    part.eps = s.eps;
    const Grid& gr = m.grid();
    part.atom_of.assign(gr.size(), -1);
    for (const auto& iv : gr.intervals()) {
        const std::size_t off = gr.offset(iv.id);
        std::vector<Atom> found;
        struct Item {
            Word w;
            double lo, hi;
        };
        std::vector<Item> stack{{Word{}, iv.left, iv.right}};
        while (!stack.empty()) {
            Item it = std::move(stack.back());
            stack.pop_back();
            auto [first, last] = node_range(iv, it.lo, it.hi);
            PointRef mid{iv.id, 0.5 * (it.lo + it.hi)};
            double sup_inv = 1.0 / s.at(m, mid);
            PointRef z = mid;
            for (long i = first; i <= last; ++i) {
                double inv = 1.0 / s.values[off + i];
                if (inv > sup_inv) {
                    sup_inv = inv;
                    z = gr.node(off + i);
                }
            }
            if (sup_inv > iv.length() / 2.0)
                throw DomainError("build_partition: scale too coarse, Lambda^{-1} exceeds half the interval");
            if (it.hi - it.lo <= C1 * sup_inv * (1.0 + 1e-12) || it.w.size() >= 48) {
                Atom a;
                a.word = it.w;
                a.interval = iv.id;
                a.lo = it.lo;
                a.hi = it.hi;
                a.first = off + first;
                a.last = off + last;
                a.z = z;
                a.inv_scale = sup_inv;
                a.depth = static_cast<int>(it.w.size());
                found.push_back(std::move(a));
                continue;
            }
            for (int sym = 0; sym < m.alphabet(); ++sym) {
                const Branch& br = m.branches[sym];
                bool ok = it.w.empty() ? br.target == iv.id : m.adjacency[it.w.back()][sym] != 0;
                if (!ok) continue;
                Word c = it.w;
                c.push_back(sym);
                auto [lo, hi] = image(m, it.w, br.apply(br.dom_left), br.apply(br.dom_right));
                stack.push_back({std::move(c), lo, hi});
            }
        }
        std::sort(found.begin(), found.end(), [](const Atom& x, const Atom& y) { return x.lo < y.lo; });
        for (auto& a : found) part.atoms.push_back(std::move(a));
    }
    part.contained = true;
    part.half_neighbourhood = true;
    for (std::size_t k = 0; k < part.atoms.size(); ++k) {
        const Atom& a = part.atoms[k];
        if (a.length() > C1 * a.inv_scale * (1.0 + 1e-9)) part.contained = false;
        for (std::size_t g = a.first; g <= a.last && a.first <= a.last; ++g) {
            part.atom_of[g] = static_cast<int>(k);
            double x = gr.node(g).x;
            if (std::max(x - a.lo, a.hi - x) < 0.5 / s.values[g]) part.half_neighbourhood = false;
        }
    }
    for (int v : part.atom_of)
        if (v < 0) throw DomainError("build_partition: grid node left uncovered");
    return part;
}

bool refines(const CylinderPartition& fine, const CylinderPartition& coarse) {
    for (const Atom& a : fine.atoms) {
        bool inside = false;
        for (const Atom& c : coarse.atoms) {
            if (c.interval != a.interval) continue;
            double tol = 1e-12 * std::max(1.0, std::abs(c.hi));
            if (a.lo >= c.lo - tol && a.hi <= c.hi + tol) {
                inside = true;
                break;
            }
        }
        if (!inside) return false;
    }
    return true;
}

int refining_depth(const MarkovModel& m, const CylinderPartition& p, const ScaleFunction& s, int max_n) {
    for (int n = 1; n <= max_n; ++n) {
        bool ok = true;
        for (const Word& w : enumerate_branches(m, n)) {
            const int tgt = target_interval(m, w);
            for (const Atom& a : p.atoms) {
                if (!m.branches[w.back()].accepts(a.interval)) continue;
                auto [lo, hi] = image(m, w, a.lo, a.hi);
                double pad = 1e-9 * (hi - lo);
                int k1 = p.find(m, {tgt, lo + pad}), k2 = p.find(m, {tgt, hi - pad});
                double inv = 1.0 / s.at(m, apply_branch(m, w, a.z));
                if (k1 != k2 || hi - lo > inv * (1.0 + 1e-9)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (ok) return n;
    }
    throw DomainError("refining_depth: no depth up to " + std::to_string(max_n) + " refines the partition");
}

ConeReport cone_membership(const RealFunction& h, const ScaleFunction& s, double tol) {
    const Grid& gr = h.grid();
    ConeReport r;
    double worst = 0.0;
    for (const auto& iv : gr.intervals()) {
        const std::size_t off = gr.offset(iv.id);
        const int N = iv.grid_size;
        const double sp = iv.spacing();
        std::vector<double> lg(N + 1), inv(N + 1);
        for (int i = 0; i <= N; ++i) {
            if (!(h[off + i] > 0.0)) throw DomainError("cone_membership: h must be positive");
            lg[i] = std::log(h[off + i]);
            inv[i] = 1.0 / s.values[off + i];
        }
        // largest Lambda(x)^{-1} among nodes x whose rescaling window covers node i
        const int R = static_cast<int>(std::ceil(1.0 / (s.min * sp)));
        for (int i = 0; i <= N; ++i) {
            double w = inv[i];
            for (int j = std::max(0, i - R); j <= std::min(N, i + R); ++j)
                if (std::abs(j - i) * sp <= inv[j] * (1.0 + 1e-12)) w = std::max(w, inv[j]);
            int l = std::max(0, i - 1), rr = std::min(N, i + 1);
            double d = std::abs(lg[rr] - lg[l]) / ((rr - l) * sp) * w;
            if (d > worst) {
                worst = d;
                r.witness = gr.node(off + i);
            }
        }
    }
    r.margin = 1.0 - worst;
    r.member = worst <= 1.0 + tol;
    return r;
}

double zeta(double s, double kappa5) {
    constexpr double a = 0.1;
    auto G = [](double t) {
        double v;
        if (t < a) v = t * t / (2 * a);
        else if (t <= 1 - a) v = a / 2 + (t - a);
        else v = (1 - a) - (1 - t) * (1 - t) / (2 * a);
        return v / (1 - a);
    };
    if (s <= 0.125 || s >= 0.875) return 1.0;
    if (s >= 0.25 && s <= 0.75) return 1.0 - kappa5;
    double t = s < 0.5 ? (s - 0.125) * 8.0 : (0.875 - s) * 8.0;
    return 1.0 - kappa5 * G(t);
}

Engine make_engine(const GibbsMeasure& g, double a, double b, const EngineParams& params) {
    if (b == 0.0) throw DomainError("make_engine: b must be nonzero");
    Engine e;
    e.model = g.model;
    e.a = a;
    e.b = b;
    e.params = params;
    const MarkovModel& m = *g.model;
    e.rpf = make_complex_rpf(g, a, b, params.delta1);
    double eps = params.eps > 0.0 ? params.eps : 1.0 / std::abs(b);
    e.scale = matching_scale(m, eps);
    e.partition = build_partition(m, e.scale, params.C1);
    e.n1 = refining_depth(m, e.partition, e.scale);
    NormalizedPotential fab = e.rpf.fab;
    e.table = build_word_table(m, e.n1, [fab](const PointRef& y) { return fab.value(y); });

    const WordTable& t = e.table;
    std::vector<double> w(t.entries());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(t.log_weight[k]);
    auto grid = m.grid_ptr();
    PowerResult pr = power_iterate(
        [&](const std::vector<double>& v, std::vector<double>& out) {
            RealFunction f(grid, v);
            out = word_apply(m, t, w, f).values();
        },
        m.grid().size());
    RealFunction rho(grid, pr.vector);
    e.word_eigenvalue = pr.eigenvalue;
    e.m_weights.resize(w.size());
    e.l_weights.resize(w.size());
    for (std::size_t x = 0; x < m.grid().size(); ++x)
        for (std::size_t k = t.start[x]; k < t.start[x + 1]; ++k) {
            e.m_weights[k] = w[k] * rho.eval(t.stencil[k]) / (pr.eigenvalue * rho[x]);
            e.l_weights[k] = e.m_weights[k] * std::polar(1.0, b * t.tau[k]);
        }

    e.omega = uniform_set(m, params.omega_n, params.omega_kappa, params.omega_horizon);
    e.uni = uni_scan(m, e.scale, e.omega, params.C1, params.uni);
    e.kappa6 = e.uni.kappa;
    e.refused = e.kappa6 < 1e-8;
    e.atom_in_omega.assign(e.partition.atoms.size(), 0);
    for (std::size_t k = 0; k < e.partition.atoms.size(); ++k) {
        const Atom& at = e.partition.atoms[k];
        for (std::size_t x = at.first; x <= at.last; ++x)
            if (e.omega.mask[x]) {
                e.atom_in_omega[k] = 1;
                break;
            }
    }
    return e;
}

MajorantState initial_state(const Engine& e, const ComplexFunction& u0, double H0) {
    MajorantState s;
    auto grid = e.model->grid_ptr();
    s.u = u0;
    s.H = RealFunction(grid, H0);
    s.P = RealFunction(grid, 1.0);
    s.omega_next.assign(grid->size(), 0);
    return s;
}

namespace {

std::size_t entry_for(const WordTable& t, std::size_t x, int word) {
    for (std::size_t k = t.start[x]; k < t.start[x + 1]; ++k)
        if (t.word[k] == word) return k;
    return static_cast<std::size_t>(-1);
}

double eval_product(const RealFunction& P, const RealFunction& H, const Stencil& s) {
    double v = P[s.lo] * H[s.lo];
    if (s.t == 0.0) return v;
    return v * (1.0 - s.t) + P[s.lo + 1] * H[s.lo + 1] * s.t;
}

} // namespace

DichotomyResult dichotomy_test(const Engine& e, const MajorantState& s, const Atom& atom, int word) {
    DichotomyResult r;
    const WordTable& t = e.table;
    r.min_ratio = 1e300;
    Complex dir{0.0, 0.0};
    std::vector<double> args;
    for (std::size_t x = atom.first; x <= atom.last; ++x) {
        std::size_t k = entry_for(t, x, word);
        if (k == static_cast<std::size_t>(-1)) return r;
        Complex z = std::polar(1.0, e.b * t.tau[k]) * s.u.eval(t.stencil[k]);
        double h = s.H.eval(t.stencil[k]);
        double az = std::abs(z);
        double ratio = h > 0.0 ? az / h : (az == 0.0 ? 0.0 : 1e300);
        r.max_ratio = std::max(r.max_ratio, ratio);
        r.min_ratio = std::min(r.min_ratio, ratio);
        if (az > 0.0) {
            dir += z / az;
            args.push_back(std::arg(z));
        }
    }
    r.omega = std::abs(dir) > 0.0 ? std::arg(dir) : 0.0;
    for (double a : args) r.spread = std::max(r.spread, circle_dist(a, r.omega));
    if (r.max_ratio <= 0.75) r.kind = BranchKind::Small;
    else if (r.min_ratio > 1.0 / e.params.C9 && r.spread <= e.kappa6 / 100.0) r.kind = BranchKind::Aligned;
    else r.kind = BranchKind::Indeterminate;
    return r;
}

namespace {

struct Window {
    int interval;
    double lo, hi;
};

// Lower P on the window; returns the previous values for rollback.
std::vector<std::pair<std::size_t, double>> place_bump(const Grid& gr, RealFunction& P, const Window& w, double depth) {
    std::vector<std::pair<std::size_t, double>> saved;
    const auto& iv = gr.intervals()[w.interval];
    auto [first, last] = node_range(iv, w.lo, w.hi);
    const std::size_t off = gr.offset(w.interval);
    const double len = w.hi - w.lo;
    for (long i = first; i <= last; ++i) {
        double x = gr.node(off + i).x;
        double v = zeta((x - w.lo) / len, depth);
        if (v < P[off + i]) {
            saved.push_back({off + i, P[off + i]});
            P[off + i] = v;
        }
    }
    return saved;
}

double min_scale_on(const Grid& gr, const ScaleFunction& s, const Window& w) {
    const auto& iv = gr.intervals()[w.interval];
    auto [first, last] = node_range(iv, w.lo, w.hi);
    double mn = 1e300;
    for (long i = first; i <= last; ++i) mn = std::min(mn, s.values[gr.offset(w.interval) + i]);
    return mn;
}

// Domination of the next step at nodes first..last.
bool dominated(const Engine& e, const MajorantState& s, std::size_t first, std::size_t last) {
    const WordTable& t = e.table;
    for (std::size_t x = first; x <= last; ++x) {
        Complex u{0.0, 0.0};
        double H = 0.0;
        for (std::size_t k = t.start[x]; k < t.start[x + 1]; ++k) {
            u += e.l_weights[k] * s.u.eval(t.stencil[k]);
            H += e.m_weights[k] * eval_product(s.P, s.H, t.stencil[k]);
        }
        if (std::abs(u) > H) return false;
    }
    return true;
}

} // namespace

std::vector<Bump> build_cancellation(const Engine& e, MajorantState& s) {
    std::vector<Bump> out;
    const MarkovModel& m = *e.model;
    const Grid& gr = m.grid();
    const WordTable& t = e.table;
    std::fill(s.P.values().begin(), s.P.values().end(), 1.0);
    std::fill(s.omega_next.begin(), s.omega_next.end(), 0);
    s.bumps = s.small_bumps = s.pair_bumps = s.dropped = 0;
    if (e.refused) return out;
    const double k5 = e.params.kappa5;
    const double min_len_nodes = 6.0;

    for (std::size_t ai = 0; ai < e.partition.atoms.size(); ++ai) {
        if (!e.atom_in_omega[ai]) continue;
        const Atom& A = e.partition.atoms[ai];
        if (A.first > A.last) continue;
        std::vector<int> words;
        for (std::size_t k = t.start[A.first]; k < t.start[A.first + 1]; ++k) words.push_back(t.word[k]);
        std::vector<DichotomyResult> dr;
        for (int w : words) dr.push_back(dichotomy_test(e, s, A, w));

        Bump bump;
        bump.atom = ai;
        Window win{};
        std::size_t lo_node = A.first, hi_node = A.last;
        bool have = false;

        // small branch: full-window bump on the best margin
        int best = -1;
        for (std::size_t i = 0; i < words.size(); ++i)
            if (dr[i].kind == BranchKind::Small && (best < 0 || dr[i].max_ratio < dr[best].max_ratio))
                best = static_cast<int>(i);
        if (best >= 0) {
            const Word& w = t.words[words[best]];
            auto [lo, hi] = image(m, w, A.lo, A.hi);
            win = {target_interval(m, w), lo, hi};
            double len = hi - lo;
            if (len >= min_len_nodes * gr.intervals()[win.interval].spacing()) {
                double q = len * min_scale_on(gr, e.scale, win) / (kZetaSlope * 1.05);
                bump.word = words[best];
                bump.depth = std::min({k5, q / (1.0 + q), 1.0 - dr[best].max_ratio});
                bump.kind = 1;
                have = bump.depth > 0.0;
            }
        }

        // separated pair: bump the lighter branch over the longest separated run
        if (!have && words.size() >= 2) {
            const std::size_t nn = A.last - A.first + 1;
            std::vector<std::vector<double>> arg(words.size(), std::vector<double>(nn));
            std::vector<std::vector<double>> wt(words.size(), std::vector<double>(nn));
            for (std::size_t i = 0; i < words.size(); ++i)
                for (std::size_t j = 0; j < nn; ++j) {
                    std::size_t k = entry_for(t, A.first + j, words[i]);
                    Complex z = e.l_weights[k] * s.u.eval(t.stencil[k]);
                    arg[i][j] = std::arg(z);
                    wt[i][j] = e.m_weights[k] * s.H.eval(t.stencil[k]);
                }
            const double need = e.kappa6 * A.inv_scale;
            const double sp = gr.intervals()[A.interval].spacing();
            double best_len = -1.0;
            for (std::size_t i = 0; i < words.size(); ++i)
                for (std::size_t j = i + 1; j < words.size(); ++j) {
                    if (dr[i].kind == BranchKind::Small || dr[j].kind == BranchKind::Small) continue;
                    std::size_t run = 0;
                    for (std::size_t y = 0; y <= nn; ++y) {
                        bool sep = y < nn && circle_dist(arg[i][y], arg[j][y]) > e.kappa6 / 2.0;
                        if (sep) {
                            ++run;
                            continue;
                        }
                        if (run >= 2) {
                            std::size_t y0 = y - run, y1 = y - 1;
                            double len = (y1 - y0) * sp;
                            if (len >= need && len > best_len) {
                                double g = kTwoPi, wi = 0.0, wj = 0.0;
                                for (std::size_t q = y0; q <= y1; ++q) {
                                    g = std::min(g, circle_dist(arg[i][q], arg[j][q]));
                                    wi = std::max(wi, wt[i][q]);
                                    wj = std::max(wj, wt[j][q]);
                                }
                                std::size_t pick = wi <= wj ? i : j;
                                const Word& w = t.words[words[pick]];
                                double x0 = gr.node(A.first + y0).x, x1 = gr.node(A.first + y1).x;
                                auto [lo, hi] = image(m, w, x0, x1);
                                Window cand{target_interval(m, w), lo, hi};
                                if (hi - lo >= min_len_nodes * gr.intervals()[cand.interval].spacing()) {
                                    double q = (hi - lo) * min_scale_on(gr, e.scale, cand) / (kZetaSlope * 1.05);
                                    double depth = std::min({k5, q / (1.0 + q), 0.99 * (1.0 - std::cos(g)) / 2.0});
                                    if (depth > 0.0) {
                                        best_len = len;
                                        win = cand;
                                        bump.word = words[pick];
                                        bump.depth = depth;
                                        bump.kind = 2;
                                        lo_node = A.first + y0;
                                        hi_node = A.first + y1;
                                        have = true;
                                    }
                                }
                            }
                        }
                        run = 0;
                    }
                }
        }
        if (!have) continue;

        auto saved = place_bump(gr, s.P, win, bump.depth);
        std::size_t c0 = A.first > 0 && gr.interval_of(A.first - 1) == A.interval ? A.first - 1 : A.first;
        std::size_t c1 = A.last + 1 < gr.size() && gr.interval_of(A.last + 1) == A.interval ? A.last + 1 : A.last;
        if (!dominated(e, s, c0, c1)) {
            for (auto it = saved.rbegin(); it != saved.rend(); ++it) s.P[it->first] = it->second;
            ++s.dropped;
            continue;
        }
        bump.interval = win.interval;
        bump.lo = win.lo;
        bump.hi = win.hi;
        const double len = win.hi - win.lo;
        for (std::size_t x = lo_node; x <= hi_node; ++x) {
            std::size_t k = entry_for(t, x, bump.word);
            double r = (t.point[k].x - win.lo) / len;
            if (r >= 0.25 && r <= 0.75) s.omega_next[x] = 1;
        }
        ++s.bumps;
        if (bump.kind == 1) ++s.small_bumps;
        else ++s.pair_bumps;
        out.push_back(bump);
    }
    return out;
}

MajorantState majorant_step(const Engine& e, const MajorantState& s) {
    const MarkovModel& m = *e.model;
    MajorantState next;
    next.n = s.n + 1;
    next.u = word_apply(m, e.table, e.l_weights, s.u);
    RealFunction PH(m.grid_ptr());
    for (std::size_t g = 0; g < PH.size(); ++g) PH[g] = s.P[g] * s.H[g];
    next.H = word_apply(m, e.table, e.m_weights, PH);
    for (std::size_t g = 0; g < PH.size(); ++g) {
        double u = std::abs(next.u[g]);
        if (u > next.H[g] * (1.0 + 1e-12)) {
            PointRef p = m.grid().node(g);
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "majorant domination fails at step %d, interval %d, x = %.17g: |u| = %.17g > H = %.17g",
                          next.n, p.interval, p.x, u, next.H[g]);
            throw InvariantViolation(buf);
        }
    }
    next.P = RealFunction(m.grid_ptr(), 1.0);
    next.omega_next.assign(PH.size(), 0);
    return next;
}

CauchySchwarzReport cauchy_schwarz_check(const MarkovModel& m, const WordTable& t, const std::vector<double>& w,
                                         const RealFunction& P, const RealFunction& H,
                                         const std::vector<std::uint8_t>& omega, double tol) {
    CauchySchwarzReport r;
    auto grid = m.grid_ptr();
    RealFunction PH(grid), P2(grid), H2(grid);
    for (std::size_t g = 0; g < PH.size(); ++g) {
        PH[g] = P[g] * H[g];
        P2[g] = P[g] * P[g];
        H2[g] = H[g] * H[g];
    }
    RealFunction mph = word_apply(m, t, w, PH), mp2 = word_apply(m, t, w, P2), mh2 = word_apply(m, t, w, H2);
    r.kappa4 = 1.0;
    bool any = false;
    for (std::size_t g = 0; g < PH.size(); ++g) {
        double lhs = mph[g] * mph[g], rhs = mp2[g] * mh2[g];
        double scale = std::max(rhs, 1e-300);
        r.max_violation = std::max(r.max_violation, (lhs - rhs) / scale);
        if (omega[g]) {
            any = true;
            r.kappa4 = std::min(r.kappa4, 1.0 - mp2[g]);
        }
    }
    if (!any) r.kappa4 = 0.0;
    if (any)
        for (std::size_t g = 0; g < PH.size(); ++g)
            if (omega[g]) {
                double lhs = mph[g] * mph[g], rhs = (1.0 - r.kappa4) * mh2[g];
                r.max_violation = std::max(r.max_violation, (lhs - rhs) / std::max(rhs, 1e-300));
            }
    r.pass = r.max_violation <= tol;
    return r;
}

L2Certificate run_l2_iteration(const GibbsMeasure& g, double a, double b, const ComplexFunction& u,
                               const EngineParams& params) {
    Engine e = make_engine(g, a, b, params);
    return run_l2_iteration(e, g, u);
}

L2Certificate run_l2_iteration(const Engine& e, const GibbsMeasure& g, const ComplexFunction& u) {
    const MarkovModel& m = *e.model;
    const Measure& nu = g.nu;
    L2Certificate c;
    c.model_hash = m.hash;
    c.a = e.a;
    c.b = e.b;
    c.n1 = e.n1;
    c.C8 = e.params.C8;
    c.kappa5 = e.params.kappa5;
    c.kappa6 = e.kappa6;
    c.refused = e.refused;
    c.u_norm = norm_theta_b(u, m.theta, e.b).norm;
    const double lb = std::log(std::abs(e.b));
    c.burn_in = static_cast<int>(std::floor(e.params.C8 * lb));
    c.steps = e.params.steps > 0 ? e.params.steps : static_cast<int>(std::floor(lb));

    ComplexFunction u0 = u;
    for (int i = 0; i < c.burn_in; ++i) u0 = tilde_rpf_apply(e.rpf, u0);
    ComplexFunction u_true = u0;
    MajorantState s = initial_state(e, u0, c.u_norm);

    auto row_of = [&](const MajorantState& st) {
        IterationRow r;
        r.n = st.n;
        r.u_c0 = c0_norm(st.u);
        r.u_l2 = l2_norm(st.u, nu);
        r.H_l2 = l2_norm(st.H, nu);
        r.H_min = *std::min_element(st.H.values().begin(), st.H.values().end());
        r.u_seminorm = holder_seminorm(st.u, m.theta);
        if (r.H_min > 0.0) r.cone_margin = cone_membership(st.H, e.scale).margin;
        else r.cone_margin = 1.0;
        return r;
    };
    c.rows.push_back(row_of(s));
    c.kappa4 = 1.0;
    const double floor_coef = std::pow(e.scale.eps, e.params.eta1 / 2.0) * c.u_norm;
    for (int n = 0; n < c.steps; ++n) {
        if (c.rows.back().H_min < (n + 1) * floor_coef) {
            c.truncated = true;
            c.truncated_at = n;
            break;
        }
        build_cancellation(e, s);
        auto cs = cauchy_schwarz_check(m, e.table, e.m_weights, s.P, s.H, s.omega_next);
        c.max_cs_violation = std::max(c.max_cs_violation, cs.max_violation);
        if (!cs.pass) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "Cauchy-Schwarz check fails at step %d by %.3g", n, cs.max_violation);
            throw InvariantViolation(buf);
        }
        double frac = 0.0;
        for (auto v : s.omega_next) frac += v;
        frac /= static_cast<double>(s.omega_next.size());
        int bumps = s.bumps;
        if (bumps > 0) c.kappa4 = std::min(c.kappa4, cs.kappa4);
        s = majorant_step(e, s);
        for (int i = 0; i < e.n1; ++i) u_true = tilde_rpf_apply(e.rpf, u_true);
        IterationRow r = row_of(s);
        r.omega_fraction = frac;
        r.bumps = bumps;
        r.kappa4 = cs.kappa4;
        r.cs_violation = cs.max_violation;
        c.rows.push_back(r);
    }
    if (c.kappa4 == 1.0) c.kappa4 = 0.0;

    double drift = 0.0;
    for (std::size_t g2 = 0; g2 < u_true.size(); ++g2) drift = std::max(drift, std::abs(u_true[g2] - s.u[g2]));
    c.drift = drift;
    const double HL = c.rows.back().H_l2;
    c.bound = 2.0 * drift * drift + 2.0 * HL * HL;
    c.true_l2 = l2_norm(u_true, nu);
    if (e.refused || c.u_norm == 0.0 || HL <= 0.0) c.kappa = 0.0;
    else c.kappa = std::max(0.0, -std::log(HL / c.u_norm) / lb);
    c.recurrence = recurrence_rate(m, nu, e.omega, e.n1, std::max(4, c.steps), 512, 1);
    c.pass = c.violations == 0 && c.max_cs_violation <= 1e-12 && std::isfinite(c.bound);
    return c;
}

std::string L2Certificate::to_csv() const {
    std::ostringstream o;
    char buf[512];
    o << "n,u_c0,u_l2,H_l2,H_min,u_seminorm,omega_fraction,bumps,kappa4,cs_violation,cone_margin\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g\n", r.n, r.u_c0,
                      r.u_l2, r.H_l2, r.H_min, r.u_seminorm, r.omega_fraction, r.bumps, r.kappa4, r.cs_violation,
                      r.cone_margin);
        o << buf;
    }
    return o.str();
}

std::string L2Certificate::summary_csv() const {
    std::ostringstream o;
    char buf[768];
    o << "model_hash,a,b,kappa,kappa4,kappa5,kappa6,n1,C8,burn_in,steps,truncated,refused,u_norm,drift,bound,true_l2,"
         "violations,max_cs_violation,pass\n";
    std::snprintf(buf, sizeof buf,
                  "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%zu,%.17g,%s\n",
                  model_hash.c_str(), a, b, kappa, kappa4, kappa5, kappa6, n1, C8, burn_in, steps, int(truncated),
                  int(refused), u_norm, drift, bound, true_l2, violations, max_cs_violation, pass ? "pass" : "fail");
    o << buf;
    return o.str();
}

} // namespace mixlab
