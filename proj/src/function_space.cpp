#include "mixlab/function_space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

namespace mixlab {

Measure::Measure(GridPtr grid, std::vector<double> node_weights) : grid_(std::move(grid)), w_(std::move(node_weights)) {
    if (w_.size() != grid_->size()) throw DomainError("measure: weight count does not match grid");
    double tot = 0.0;
    for (double v : w_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("measure: weights must be finite and nonnegative");
        tot += v;
    }
    if (std::abs(tot - 1.0) > 1e-9) throw DomainError("measure: weights must sum to 1 (got " + std::to_string(tot) + ")");
    // end nodes give their whole mass to the adjacent cell, interior nodes split evenly
    for (const auto& iv : grid_->intervals()) {
        std::size_t off = grid_->offset(iv.id);
        int N = iv.grid_size;
        cum_.push_back(0.0);
        for (int c = 0; c < N; ++c) {
            double left = (c == 0) ? w_[off] : 0.5 * w_[off + c];
            double right = (c == N - 1) ? w_[off + N] : 0.5 * w_[off + c + 1];
            cells_.push_back(left + right);
            cum_.push_back(cum_.back() + cells_.back());
        }
    }
}

Measure Measure::lebesgue(GridPtr grid) {
    std::vector<double> w(grid->size(), 0.0);
    double total = 0.0;
    for (const auto& iv : grid->intervals()) total += iv.length();
    for (const auto& iv : grid->intervals()) {
        std::size_t off = grid->offset(iv.id);
        double h = iv.spacing() / total;
        for (int i = 0; i <= iv.grid_size; ++i) w[off + i] = (i == 0 || i == iv.grid_size) ? 0.5 * h : h;
    }
    return Measure(grid, std::move(w));
}

std::vector<double> Measure::cell_masses() const { return cells_; }

double Measure::total() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

double Measure::mass(int interval, double lo, double hi) const {
    const auto& iv = grid_->intervals()[interval];
    lo = std::max(lo, iv.left);
    hi = std::min(hi, iv.right);
    if (hi <= lo) return 0.0;
    std::size_t base = 0;
    for (int a = 0; a < interval; ++a) base += grid_->intervals()[a].grid_size + 1;
    // cum_ holds N+1 entries per interval
    auto F = [&](double x) {
        double u = (x - iv.left) / iv.spacing();
        int c = std::clamp(static_cast<int>(std::floor(u)), 0, iv.grid_size - 1);
        double frac = std::clamp(u - c, 0.0, 1.0);
        return cum_[base + c] + frac * (cum_[base + c + 1] - cum_[base + c]);
    };
    return F(hi) - F(lo);
}

std::string Measure::to_csv() const {
    std::ostringstream o;
    o << "interval_id,index,weight\n";
    char buf[96];
    for (std::size_t g = 0; g < w_.size(); ++g) {
        int a = grid_->interval_of(g);
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g\n", a, g - grid_->offset(a), w_[g]);
        o << buf;
    }
    return o.str();
}

namespace {

template <class T>
double seminorm_impl(const GridFunction<T>& u, double theta) {
    const Grid& gr = u.grid();
    double best = 0.0;
    for (const auto& iv : gr.intervals()) {
        std::size_t off = gr.offset(iv.id);
        int N = iv.grid_size;
        for (int s = 1; s <= N; s *= 2) {
            double d = std::pow(iv.spacing() * s, theta);
            for (int i = 0; i + s <= N; ++i) best = std::max(best, std::abs(u[off + i + s] - u[off + i]) / d);
        }
    }
    return best;
}

template <class T>
double c0_impl(const GridFunction<T>& u) {
    double m = 0.0;
    for (const auto& v : u.values()) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
}

template <class T>
HolderReport norm_impl(const GridFunction<T>& u, double theta, std::optional<double> b) {
    HolderReport r;
    r.theta = theta;
    r.b = b;
    r.c0 = c0_impl(u);
    r.seminorm = seminorm_impl(u, theta);
    if (b) {
        if (*b == 0.0) throw DomainError("norm_theta_b: b must be nonzero");
        r.norm = std::max(r.c0, r.seminorm / std::abs(*b));
    } else {
        r.norm = r.c0 + r.seminorm;
    }
    return r;
}

void check_probability(const Measure& nu) {
    if (std::abs(nu.total() - 1.0) > 1e-9) throw DomainError("integration weights are not normalized");
}

} // namespace

double holder_seminorm(const RealFunction& u, double theta) { return seminorm_impl(u, theta); }
double holder_seminorm(const ComplexFunction& u, double theta) { return seminorm_impl(u, theta); }
HolderReport norm_theta_b(const RealFunction& u, double theta, std::optional<double> b) { return norm_impl(u, theta, b); }
HolderReport norm_theta_b(const ComplexFunction& u, double theta, std::optional<double> b) {
    return norm_impl(u, theta, b);
}
double c0_norm(const RealFunction& u) { return c0_impl(u); }
double c0_norm(const ComplexFunction& u) { return c0_impl(u); }

double oscillation(const RealFunction& u, const SubInterval& J) {
    const Grid& gr = u.grid();
    const auto& iv = gr.intervals().at(J.interval);
    double lo = 1e300, hi = -1e300;
    std::size_t off = gr.offset(J.interval);
    for (int i = 0; i <= iv.grid_size; ++i) {
        double x = gr.node(off + i).x;
        if (x < J.lo || x > J.hi) continue;
        lo = std::min(lo, u[off + i]);
        hi = std::max(hi, u[off + i]);
    }
    if (lo > hi) throw DomainError("oscillation: sub-interval contains no grid samples");
    return hi - lo;
}

double PolyApprox::operator()(double s) const {
    double v = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * s + *it;
    return v;
}

namespace {

// Chebyshev basis on [lo, hi]
void cheb_row(double x, double lo, double hi, int K, double* row) {
    double t = (2.0 * x - lo - hi) / (hi - lo);
    row[0] = 1.0;
    if (K >= 1) row[1] = t;
    for (int k = 2; k <= K; ++k) row[k] = 2.0 * t * row[k - 1] - row[k - 2];
}

std::vector<double> cheb_to_monomial(const std::vector<double>& c, double lo, double hi) {
    // sum c_k T_k(a x + b) expanded in powers of x
    const int K = static_cast<int>(c.size()) - 1;
    const double a = 2.0 / (hi - lo), b = -(lo + hi) / (hi - lo);
    std::vector<std::vector<double>> T(K + 1);
    T[0] = {1.0};
    if (K >= 1) T[1] = {b, a};
    for (int k = 2; k <= K; ++k) {
        T[k].assign(k + 1, 0.0);
        for (std::size_t i = 0; i < T[k - 1].size(); ++i) {
            T[k][i] += 2.0 * b * T[k - 1][i];
            T[k][i + 1] += 2.0 * a * T[k - 1][i];
        }
        for (std::size_t i = 0; i < T[k - 2].size(); ++i) T[k][i] -= T[k - 2][i];
    }
    std::vector<double> out(K + 1, 0.0);
    for (int k = 0; k <= K; ++k)
        for (std::size_t i = 0; i < T[k].size(); ++i) out[i] += c[k] * T[k][i];
    return out;
}

} // namespace

PolyApprox minimax(const std::vector<double>& xs, const std::vector<double>& ys, int K, int max_iter) {
    if (K < 0) throw DomainError("minimax: degree must be >= 0");
    const int M = static_cast<int>(xs.size());
    if (M != static_cast<int>(ys.size()) || M == 0) throw DomainError("minimax: bad sample arrays");
    PolyApprox out;
    out.degree = K;
    out.lo = *std::min_element(xs.begin(), xs.end());
    out.hi = *std::max_element(xs.begin(), xs.end());
    const double lo = out.lo, hi = out.hi > out.lo ? out.hi : out.lo + 1.0;
    const double scale = std::max(1.0, *std::max_element(ys.begin(), ys.end(), [](double a, double b) {
        return std::abs(a) < std::abs(b);
    }));

    if (M <= K + 1) {
        // interpolation is exact
        Eigen::MatrixXd A(M, K + 1);
        Eigen::VectorXd y(M);
        std::vector<double> row(K + 1);
        for (int i = 0; i < M; ++i) {
            cheb_row(xs[i], lo, hi, K, row.data());
            for (int k = 0; k <= K; ++k) A(i, k) = row[k];
            y(i) = ys[i];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        out.coefficients = cheb_to_monomial(std::vector<double>(c.data(), c.data() + K + 1), lo, hi);
        out.equioscillation = xs;
        out.signed_errors.assign(M, 0.0);
        return out;
    }

    const int R = K + 2;
    std::vector<int> ref(R);
    for (int j = 0; j < R; ++j) {
        double t = 0.5 * (1.0 - std::cos(std::numbers::pi * j / (R - 1)));
        ref[j] = static_cast<int>(std::lround(t * (M - 1)));
    }
    for (int j = 1; j < R; ++j)
        if (ref[j] <= ref[j - 1]) ref[j] = ref[j - 1] + 1;
    for (int j = R - 1; j >= 0; --j)
        if (ref[j] > M - 1 - (R - 1 - j)) ref[j] = M - 1 - (R - 1 - j);

    std::vector<double> coef(K + 1, 0.0), row(K + 2);
    double E = 0.0;
    auto eval = [&](double x) {
        cheb_row(x, lo, hi, K, row.data());
        double v = 0.0;
        for (int k = 0; k <= K; ++k) v += coef[k] * row[k];
        return v;
    };
    auto finish = [&](int it) {
        out.iterations = it;
        out.coefficients = cheb_to_monomial(coef, lo, hi);
        out.equioscillation.clear();
        out.signed_errors.clear();
        for (int j : ref) {
            out.equioscillation.push_back(xs[j]);
            out.signed_errors.push_back(ys[j] - eval(xs[j]));
        }
        double worst = 0.0;
        for (int i = 0; i < M; ++i) worst = std::max(worst, std::abs(ys[i] - eval(xs[i])));
        out.error = worst;
    };

    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd A(R, R);
        Eigen::VectorXd y(R);
        for (int j = 0; j < R; ++j) {
            cheb_row(xs[ref[j]], lo, hi, K, row.data());
            for (int k = 0; k <= K; ++k) A(j, k) = row[k];
            A(j, K + 1) = (j % 2 == 0) ? 1.0 : -1.0;
            y(j) = ys[ref[j]];
        }
        Eigen::VectorXd sol = A.partialPivLu().solve(y);
        for (int k = 0; k <= K; ++k) coef[k] = sol(k);
        E = sol(K + 1);

        int imax = 0;
        double rmax = -1.0;
        for (int i = 0; i < M; ++i) {
            double r = std::abs(ys[i] - eval(xs[i]));
            if (r > rmax) {
                rmax = r;
                imax = i;
            }
        }
        if (rmax <= std::abs(E) + 1e-13 * scale) {
            finish(it);
            return out;
        }
        // single-point exchange keeping sign alternation
        auto sgn = [&](int i) { return (ys[i] - eval(xs[i])) >= 0 ? 1 : -1; };
        const int s_new = sgn(imax);
        auto pos = std::lower_bound(ref.begin(), ref.end(), imax) - ref.begin();
        if (pos < R && ref[pos] == imax) {
            finish(it);
            return out;
        }
        if (pos == 0) {
            if (sgn(ref[0]) == s_new) ref[0] = imax;
            else {
                ref.insert(ref.begin(), imax);
                ref.pop_back();
            }
        } else if (pos == R) {
            if (sgn(ref[R - 1]) == s_new) ref[R - 1] = imax;
            else {
                ref.push_back(imax);
                ref.erase(ref.begin());
            }
        } else {
            if (sgn(ref[pos - 1]) == s_new) ref[pos - 1] = imax;
            else ref[pos] = imax;
        }
    }
    finish(max_iter);
    throw RemezError("minimax exchange did not converge in " + std::to_string(max_iter) + " iterations", out);
}

PolyApprox poly_distance(const RealFunction& u, int K, const SubInterval& J) {
    const Grid& gr = u.grid();
    const auto& iv = gr.intervals().at(J.interval);
    std::vector<double> xs, ys;
    std::size_t off = gr.offset(J.interval);
    for (int i = 0; i <= iv.grid_size; ++i) {
        double x = gr.node(off + i).x;
        if (x < J.lo || x > J.hi) continue;
        xs.push_back(x);
        ys.push_back(u[off + i]);
    }
    if (xs.empty()) throw DomainError("poly_distance: sub-interval contains no grid samples");
    return minimax(xs, ys, K);
}

double integrate(const RealFunction& u, const Measure& nu) {
    check_probability(nu);
    double s = 0.0;
    const auto& w = nu.weights();
    for (std::size_t g = 0; g < u.size(); ++g) s += w[g] * u[g];
    return s;
}

std::complex<double> integrate(const ComplexFunction& u, const Measure& nu) {
    check_probability(nu);
    std::complex<double> s = 0.0;
    const auto& w = nu.weights();
    for (std::size_t g = 0; g < u.size(); ++g) s += w[g] * u[g];
    return s;
}

double l2_norm(const RealFunction& u, const Measure& nu) {
    check_probability(nu);
    double s = 0.0;
    const auto& w = nu.weights();
    for (std::size_t g = 0; g < u.size(); ++g) s += w[g] * u[g] * u[g];
    return std::sqrt(s);
}

double l2_norm(const ComplexFunction& u, const Measure& nu) {
    check_probability(nu);
    double s = 0.0;
    const auto& w = nu.weights();
    for (std::size_t g = 0; g < u.size(); ++g) s += w[g] * std::norm(u[g]);
    return std::sqrt(s);
}

} // namespace mixlab
