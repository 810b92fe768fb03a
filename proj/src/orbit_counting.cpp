#include "mixlab/orbit_counting.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace mixlab {

namespace {

bool cyclic_admissible(const MarkovModel& m, const Word& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!m.adjacency[w[i]][w[(i + 1) % w.size()]]) return false;
    return true;
}

using Matrix = std::vector<std::vector<unsigned __int128>>;

Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t k = a.size();
    Matrix c(k, std::vector<unsigned __int128>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l < k; ++l)
            if (a[i][l])
                for (std::size_t j = 0; j < k; ++j) c[i][j] += a[i][l] * b[l][j];
    return c;
}

int mobius(int n) {
    int r = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        r = -r;
    }
    return n > 1 ? -r : r;
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm), right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::vector<PeriodicOrbit> enumerate_periodic_orbits(const MarkovModel& m, int n_max, std::size_t cap) {
    if (n_max < 1) throw DomainError("enumerate_periodic_orbits: n_max must be >= 1");
    const int k = m.alphabet();
    if (std::pow(static_cast<double>(k), n_max) > static_cast<double>(cap))
        throw SizeError("enumerate_periodic_orbits: |A|^n_max exceeds the cap " + std::to_string(cap));
    std::vector<PeriodicOrbit> out;
    // Duval's generation of Lyndon words in lexicographic order
    Word w{-1};
    while (!w.empty()) {
        ++w.back();
        if (cyclic_admissible(m, w)) {
            PeriodicOrbit o;
            o.word = w;
            o.n = static_cast<int>(w.size());
            const auto& iv = m.grid().intervals()[m.branches[w.front()].target];
            PointRef x{iv.id, 0.5 * (iv.left + iv.right)};
            for (int it = 0; it < 200; ++it) {
                PointRef y = apply_branch(m, w, x);
                bool done = std::abs(y.x - x.x) <= 1e-16 * std::max(1.0, std::abs(x.x));
                x = y;
                if (done) break;
            }
            o.point = x;
            o.residual = std::abs(apply_branch(m, w, x).x - x.x);
            o.period = tau_along(m, w, x);
            out.push_back(std::move(o));
        }
        const std::size_t len = w.size();
        while (static_cast<int>(w.size()) < n_max) w.push_back(w[w.size() - len]);
        while (!w.empty() && w.back() == k - 1) w.pop_back();
    }
    std::stable_sort(out.begin(), out.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) { return a.n < b.n; });
    return out;
}

std::uint64_t fixed_point_count(const MarkovModel& m, int n) {
    if (n < 1) throw DomainError("fixed_point_count: n must be >= 1");
    const std::size_t k = m.alphabet();
    Matrix a(k, std::vector<unsigned __int128>(k, 0)), r(k, std::vector<unsigned __int128>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        r[i][i] = 1;
        for (std::size_t j = 0; j < k; ++j) a[i][j] = m.adjacency[i][j] ? 1 : 0;
    }
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) r = multiply(r, a);
        if (e > 1) a = multiply(a, a);
    }
    unsigned __int128 tr = 0;
    for (std::size_t i = 0; i < k; ++i) tr += r[i][i];
    if (tr > std::numeric_limits<std::uint64_t>::max()) throw SizeError("fixed_point_count: overflow");
    return static_cast<std::uint64_t>(tr);
}

std::uint64_t necklace_count(const MarkovModel& m, int n) {
    __int128 s = 0;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) s += static_cast<__int128>(mobius(d)) * fixed_point_count(m, n / d);
    return static_cast<std::uint64_t>(s / n);
}

double entropy(const MarkovModel& m, double tol) {
    if (!(m.tau0 > 0.0)) throw DomainError("entropy: roof must be bounded below by a positive constant");
    return pressure_root(m, [](const PointRef&) { return 0.0; }, tol);
}

double li(double y) {
    if (!(y > 2.0)) return 0.0;
    // substitute u = e^t
    auto f = [](double t) { return std::exp(t) / t; };
    double a = std::log(2.0), b = std::log(y);
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double scale = y / std::log(y);
    return simpson(f, a, b, fa, fm, fb, whole, 1e-13 * scale, 60);
}

CountingReport prime_orbit_report(const MarkovModel& m, const std::vector<PeriodicOrbit>& orbits, int n_max,
                                  const std::vector<double>& T_grid) {
    CountingReport r;
    r.h = entropy(m);
    r.n_max = n_max;
    std::vector<double> periods;
    for (const auto& o : orbits) periods.push_back(o.period);
    std::sort(periods.begin(), periods.end());
    for (double T : T_grid) {
        CountingRow row;
        row.T = T;
        row.pi = std::upper_bound(periods.begin(), periods.end(), T) - periods.begin();
        row.li = li(std::exp(r.h * T));
        row.diff = static_cast<double>(row.pi) - row.li;
        row.rel = row.li > 0.0 ? std::abs(row.diff) / row.li : 0.0;
        row.complete = T <= n_max * m.tau0;
        r.rows.push_back(row);
    }
    std::vector<double> xs, ys;
    for (const auto& row : r.rows)
        if (row.complete && std::abs(row.diff) >= 1.0) {
            xs.push_back(row.T);
            ys.push_back(std::log(std::abs(row.diff)));
        }
    if (xs.size() >= 2) {
        double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        if (sxx > 0.0) {
            r.c_hat = sxy / sxx;
            r.fitted = true;
        }
    }
    return r;
}

CountingReport prime_orbit_report(const MarkovModel& m, int n_max, const std::vector<double>& T_grid) {
    return prime_orbit_report(m, enumerate_periodic_orbits(m, n_max), n_max, T_grid);
}

std::string CountingReport::to_csv() const {
    std::ostringstream o;
    o << "T,pi,li,diff,rel,complete\n";
    for (const auto& row : rows)
        o << csv_double(row.T) << ',' << row.pi << ',' << csv_double(row.li) << ',' << csv_double(row.diff) << ','
          << csv_double(row.rel) << ',' << int(row.complete) << '\n';
    return o.str();
}

std::string orbits_csv(const std::vector<PeriodicOrbit>& orbits) {
    std::ostringstream o;
    o << "word,n,period\n";
    for (const auto& orb : orbits) o << word_string(orb.word) << ',' << orb.n << ',' << csv_double(orb.period) << '\n';
    return o.str();
}

double Observable::operator()(const MarkovModel& m, const PointRef& x, double s) const {
    return section(x) * fiber(s / m.tau(x));
}

Observable named_observable(const std::string& name) {
    auto dash = name.find('-');
    if (dash == std::string::npos) throw ConfigError("observable must read <section>-<fiber>, got '" + name + "'");
    std::string sec = name.substr(0, dash), fib = name.substr(dash + 1);
    constexpr double tp = 2.0 * std::numbers::pi;
    Observable o;
    o.name = name;
    if (sec == "one") o.section = [](const PointRef&) { return 1.0; };
    else if (sec == "sin") o.section = [](const PointRef& p) { return std::sin(tp * p.x); };
    else if (sec == "cos") o.section = [](const PointRef& p) { return std::cos(tp * p.x); };
    else throw ConfigError("unknown section observable '" + sec + "'");
    if (fib == "one") o.fiber = [](double) { return 1.0; };
    else if (fib == "sin") o.fiber = [](double r) { return std::sin(tp * r); };
    else if (fib == "cos") o.fiber = [](double r) { return std::cos(tp * r); };
    else throw ConfigError("unknown fiber observable '" + fib + "'");
    return o;
}

CorrelationReport correlation_decay(const GibbsMeasure& g, const Observable& A, const Observable& B,
                                    const std::vector<double>& t_grid, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw DomainError("correlation_decay: samples must be positive");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) || (!t_grid.empty() && t_grid.front() < 0.0))
        throw DomainError("correlation_decay: t grid must be nonnegative and ascending");
    const MarkovModel& m = *g.model;
    const Grid& gr = m.grid();
    std::vector<double> cum = g.nu.cell_masses();
    std::partial_sum(cum.begin(), cum.end(), cum.begin());
    std::vector<std::pair<int, int>> where;
    for (const auto& iv : gr.intervals())
        for (int c = 0; c < iv.grid_size; ++c) where.push_back({iv.id, c});

    const std::size_t T = t_grid.size();
    constexpr std::size_t kBlock = 1 << 16;
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    struct Acc {
        double a0 = 0, a0sq = 0, b = 0, bsq = 0;
        std::vector<double> at, ab, ab2;
    };
    std::vector<Acc> acc(blocks);
    parallel_for(blocks, [&](std::size_t blk) {
        Acc& s = acc[blk];
        s.at.assign(T, 0.0);
        s.ab.assign(T, 0.0);
        s.ab2.assign(T, 0.0);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const std::size_t n = std::min(kBlock, samples - blk * kBlock);
        for (std::size_t i = 0; i < n; ++i) {
            PointRef x;
            double tau;
            do {
                double u = U(rng) * cum.back();
                std::size_t c = std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(),
                                                      cum.size() - 1);
                const auto& iv = gr.intervals()[where[c].first];
                x = {iv.id, iv.left + (where[c].second + U(rng)) * iv.spacing()};
                tau = m.tau(x);
            } while (U(rng) * m.tau_star > tau);
            double s0 = U(rng) * tau;
            const double bv = B(m, x, s0);
            const double a0 = A(m, x, s0);
            s.b += bv;
            s.bsq += bv * bv;
            s.a0 += a0;
            s.a0sq += a0 * a0;
            double rem = s0, prev = 0.0;
            for (std::size_t k = 0; k < T; ++k) {
                rem += t_grid[k] - prev;
                prev = t_grid[k];
                while (rem >= (tau = m.tau(x))) {
                    rem -= tau;
                    x = m.forward(x);
                }
                double av = A(m, x, rem);
                s.at[k] += av;
                s.ab[k] += av * bv;
                s.ab2[k] += av * bv * av * bv;
            }
        }
    });
    Acc tot;
    tot.at.assign(T, 0.0);
    tot.ab.assign(T, 0.0);
    tot.ab2.assign(T, 0.0);
    for (const Acc& s : acc) {
        tot.a0 += s.a0;
        tot.a0sq += s.a0sq;
        tot.b += s.b;
        tot.bsq += s.bsq;
        for (std::size_t k = 0; k < T; ++k) {
            tot.at[k] += s.at[k];
            tot.ab[k] += s.ab[k];
            tot.ab2[k] += s.ab2[k];
        }
    }
    CorrelationReport r;
    r.samples = samples;
    r.seed = seed;
    const double N = static_cast<double>(samples);
    r.mean_a = tot.a0 / N;
    r.mean_b = tot.b / N;
    r.var_a = std::max(0.0, tot.a0sq / N - r.mean_a * r.mean_a);
    r.var_b = std::max(0.0, tot.bsq / N - r.mean_b * r.mean_b);
    r.degenerate = r.var_a <= 1e-14 || r.var_b <= 1e-14;
    for (std::size_t k = 0; k < T; ++k) {
        CorrelationRow row;
        row.t = t_grid[k];
        double mab = tot.ab[k] / N;
        row.corr = mab - (tot.at[k] / N) * r.mean_b;
        row.stderr_ = std::sqrt(std::max(0.0, tot.ab2[k] / N - mab * mab) / N);
        if (r.degenerate) row.corr = 0.0;
        r.rows.push_back(row);
    }
    if (!r.degenerate) fit_correlation_rate(r);
    return r;
}

void fit_correlation_rate(CorrelationReport& r) {
    r.fitted = false;
    for (auto& row : r.rows) row.fitted = false;
    if (r.rows.empty()) return;
    const double c0 = r.rows.front().corr;
    if (c0 == 0.0) return;
    std::size_t end = 0;
    while (end < r.rows.size()) {
        const auto& row = r.rows[end];
        bool same_sign = (row.corr > 0) == (c0 > 0) && row.corr != 0.0;
        if (!same_sign || std::abs(row.corr) < std::max(3.0 * row.stderr_, 0.05 * std::abs(c0))) break;
        ++end;
    }
    if (end < 4) return;
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < end; ++i) {
        mt += r.rows[i].t;
        my += std::log(std::abs(r.rows[i].corr));
    }
    mt /= end;
    my /= end;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < end; ++i) {
        double dt = r.rows[i].t - mt, dy = std::log(std::abs(r.rows[i].corr)) - my;
        sxx += dt * dt;
        sxy += dt * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) return;
    const double slope = sxy / sxx;
    r.rate = -slope;
    double var = 0.0;
    for (std::size_t i = 0; i < end; ++i) {
        double w = (r.rows[i].t - mt) / sxx;
        double sig = r.rows[i].stderr_ / std::abs(r.rows[i].corr);
        var += w * w * sig * sig;
        r.rows[i].fitted = true;
    }
    r.rate_stderr = std::sqrt(var);
    r.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    r.fitted = true;
}

std::string CorrelationReport::to_csv() const {
    std::ostringstream o;
    o << "t,corr,stderr,fitted\n";
    for (const auto& row : rows)
        o << csv_double(row.t) << ',' << csv_double(row.corr) << ',' << csv_double(row.stderr_) << ','
          << int(row.fitted) << '\n';
    return o.str();
}

} // namespace mixlab
