#include "mixlab/markov_model.hpp"
#include "mixlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mixlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

std::vector<std::vector<int>> parse_transitions(const std::string& s) {
    std::vector<std::vector<int>> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ',')) {
        std::vector<int> r;
        for (char ch : row) {
            if (ch == '0' || ch == '1') r.push_back(ch - '0');
            else if (ch != ' ') throw ConfigError("transitions: unexpected character '" + std::string(1, ch) + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

bool primitive(const std::vector<std::vector<int>>& t) {
    const std::size_t n = t.size();
    std::vector<std::vector<int>> p = t;
    std::size_t bound = (n - 1) * (n - 1) + 1;
    for (std::size_t k = 1; k <= bound; ++k) {
        bool all = true;
        for (auto& r : p)
            for (int v : r) all = all && v > 0;
        if (all) return true;
        std::vector<std::vector<int>> q(n, std::vector<int>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t l = 0; l < n; ++l) q[i][j] = q[i][j] || (p[i][l] && t[l][j]);
        p = q;
    }
    return false;
}

} // namespace

std::string word_string(const Word& w) {
    std::string s;
    for (int a : w) s += std::to_string(a);
    return s;
}

Word parse_word(const std::string& s) {
    Word w;
    for (char ch : s) {
        if (ch < '0' || ch > '9') throw DomainError("bad word '" + s + "'");
        w.push_back(ch - '0');
    }
    return w;
}

double Branch::image_left() const { return apply(dom_left); }
double Branch::image_right() const { return apply(dom_right); }

double MarkovModel::tau(const PointRef& p) const {
    const auto& c = config;
    double v = c.roof_const + c.roof_linear * p.x;
    if (c.roof_sin != 0.0) v += c.roof_sin * std::sin(kTwoPi * p.x);
    if (c.roof_cos != 0.0) v += c.roof_cos * std::cos(kTwoPi * p.x);
    if (!c.roof_step.empty()) v += c.roof_step[symbol_at(p)];
    return v;
}

double MarkovModel::mu(const PointRef& p) const {
    double v = config.mu_const;
    if (config.mu_sin != 0.0) v += config.mu_sin * std::sin(kTwoPi * p.x);
    return v;
}

double MarkovModel::expansion(const PointRef& p) const { return 1.0 / branches[symbol_at(p)].scale; }

double MarkovModel::det(const PointRef& p) const { return expansion(p) * mu(p); }

double MarkovModel::flow_potential(const PointRef& p, double t) const {
    const auto& c = config;
    double v = c.pot_const;
    if (c.pot_sin != 0.0) v += c.pot_sin * std::sin(kTwoPi * p.x);
    if (c.pot_cos != 0.0) v += c.pot_cos * std::cos(kTwoPi * p.x);
    if (c.pot_fiber != 0.0) v += c.pot_fiber * std::sin(std::numbers::pi * t / tau(p));
    return v;
}

double MarkovModel::section_potential(const PointRef& p) const {
    constexpr int kSub = 16;
    const double T = tau(p);
    const double h = T / kSub;
    double s = 0.5 * (flow_potential(p, 0.0) + flow_potential(p, T));
    for (int i = 1; i < kSub; ++i) s += flow_potential(p, i * h);
    return s * h;
}

int MarkovModel::symbol_at(const PointRef& p, bool* boundary) const {
    int best = -1;
    double best_left = -1e300;
    double lowest = 1e300;
    for (const auto& br : branches) {
        if (br.target != p.interval) continue;
        double l = br.image_left();
        lowest = std::min(lowest, l);
        if (l <= p.x && l > best_left) {
            best = br.symbol;
            best_left = l;
        }
    }
    if (best < 0) {
        // left of every image: only possible through rounding at the interval start
        for (const auto& br : branches)
            if (br.target == p.interval && br.image_left() == lowest) best = br.symbol;
    }
    if (boundary) *boundary = (p.x == best_left && best_left != lowest);
    return best;
}

PointRef MarkovModel::forward(const PointRef& p, bool* boundary) const {
    const Branch& br = branches[symbol_at(p, boundary)];
    double y = std::clamp(br.invert(p.x), br.dom_left, br.dom_right);
    return point_in(br, y);
}

PointRef MarkovModel::point_in(const Branch& br, double y) const {
    for (int a = br.dom_first; a <= br.dom_last; ++a)
        if (y < intervals[a].right || a == br.dom_last) return {a, y};
    return {br.dom_last, y};
}

PointRef MarkovModel::apply(int symbol, const PointRef& p) const {
    const Branch& br = branches[symbol];
    return {br.target, br.apply(p.x)};
}

PointRef MarkovModel::point(double x) const {
    for (const auto& iv : intervals)
        if (x < iv.right) return {iv.id, std::max(x, iv.left)};
    return {intervals.back().id, intervals.back().right};
}

bool MarkovModel::admissible(const Word& w) const {
    for (int a : w)
        if (a < 0 || a >= alphabet()) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!adjacency[w[i]][w[i + 1]]) return false;
    return true;
}

bool MarkovModel::admissible(const Word& w, int interval) const {
    if (!admissible(w)) return false;
    return w.empty() || branches[w.back()].accepts(interval);
}

MarkovModel build_model(const ModelConfig& config) {
    MarkovModel m;
    m.config = config;
    if (!is_power_of_two(config.grid_size))
        throw ConfigError("grid_size must be a power of two >= 2, got " + std::to_string(config.grid_size));
    if (!(config.theta > 0.0 && config.theta <= 1.0)) throw ConfigError("theta must lie in (0,1]");
    m.theta = config.theta;

    if (config.family == "doubling" || config.family == "fullshift") {
        int k = config.family == "doubling" ? 2 : config.branches;
        if (config.family == "doubling" && config.branches != 2)
            throw ConfigError("doubling family has exactly 2 branches");
        if (k < 2) throw ConfigError("fullshift needs at least 2 branches");
        m.intervals.push_back({0, 0.0, 1.0, config.grid_size});
        for (int a = 0; a < k; ++a) {
            Branch br;
            br.symbol = a;
            br.target = 0;
            br.dom_first = br.dom_last = 0;
            br.dom_left = 0.0;
            br.dom_right = 1.0;
            br.scale = 1.0 / k;
            br.offset = static_cast<double>(a) / k;
            m.branches.push_back(br);
        }
    } else if (config.family == "markov3") {
        auto t = parse_transitions(config.transitions);
        if (t.size() != 3) throw ConfigError("markov3 needs 3 transition rows");
        for (int a = 0; a < 3; ++a) m.intervals.push_back({a, a / 3.0, (a + 1) / 3.0, config.grid_size});
        for (int a = 0; a < 3; ++a) {
            if (t[a].size() != 3) throw ConfigError("markov3 transition rows need 3 entries");
            int first = -1, last = -1;
            for (int b = 0; b < 3; ++b)
                if (t[a][b]) {
                    if (first < 0) first = b;
                    last = b;
                }
            if (first < 0) throw ConfigError("non-Markov adjacency: symbol " + std::to_string(a) + " has no successor");
            for (int b = first; b <= last; ++b)
                if (!t[a][b])
                    throw ConfigError("non-Markov adjacency: successors of " + std::to_string(a) +
                                      " are not contiguous, so sigma(U_a) is not a union of intervals");
            Branch br;
            br.symbol = a;
            br.target = a;
            br.dom_first = first;
            br.dom_last = last;
            br.dom_left = m.intervals[first].left;
            br.dom_right = m.intervals[last].right;
            br.scale = m.intervals[a].length() / (br.dom_right - br.dom_left);
            br.offset = m.intervals[a].left - br.scale * br.dom_left;
            if (br.scale >= 1.0)
                throw ConfigError("non-Markov adjacency: branch " + std::to_string(a) + " is not contracting");
            m.branches.push_back(br);
        }
        if (!primitive(t)) throw ConfigError("non-Markov adjacency: transition matrix is not primitive");
    } else {
        throw ConfigError("unknown family '" + config.family + "'");
    }

    const int k = m.alphabet();
    m.adjacency.assign(k, std::vector<int>(k, 0));
    for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c) m.adjacency[a][c] = m.branches[a].accepts(m.branches[c].target) ? 1 : 0;

    if (!config.roof_step.empty() && static_cast<int>(config.roof_step.size()) != k)
        throw ConfigError("roof_step needs one value per symbol");
    if (!(config.mu_const - std::abs(config.mu_sin) > 0.0 && config.mu_const + std::abs(config.mu_sin) < 1.0))
        throw ConfigError("mu_cocycle must take values in (0,1)");

    m.grid_ = std::make_shared<Grid>(m.intervals);

    double smin = 1.0, smax = 0.0;
    for (const auto& br : m.branches) {
        smin = std::min(smin, br.scale);
        smax = std::max(smax, br.scale);
    }
    m.chi0 = -std::log(smax);
    m.chi_star = -std::log(smin);
    m.chi_u = m.chi0;
    m.chi_u_bar = m.chi_star;

    double tmin = 1e300, tmax = -1e300, mumin = 1e300, mumax = -1e300;
    const Grid& gr = *m.grid_;
    for (std::size_t g = 0; g < gr.size(); ++g) {
        PointRef p = gr.node(g);
        double tv = m.tau(p);
        tmin = std::min(tmin, tv);
        tmax = std::max(tmax, tv);
        double mv = m.mu(p);
        mumin = std::min(mumin, mv);
        mumax = std::max(mumax, mv);
    }
    // second-level cylinders carry the one-sided values of a step roof
    if (!config.roof_step.empty()) {
        for (const auto& br : m.branches) {
            PointRef right{br.target, std::nextafter(br.image_right(), br.image_left())};
            double tv = m.tau(right);
            tmin = std::min(tmin, tv);
            tmax = std::max(tmax, tv);
        }
    }
    if (!(tmin > 0.0)) throw ConfigError("roof function must satisfy inf tau > 0 (got " + std::to_string(tmin) + ")");
    m.tau0 = tmin;
    m.tau_star = tmax;
    m.chi_s = -std::log(mumax);
    m.chi_s_bar = -std::log(mumin);
    m.hash = config.hash();

    EdgeTable& e = m.edges_;
    e.start.assign(gr.size() + 1, 0);
    for (std::size_t g = 0; g < gr.size(); ++g) {
        PointRef x = gr.node(g);
        e.start[g] = e.branch.size();
        for (const auto& br : m.branches) {
            if (!br.accepts(x.interval)) continue;
            PointRef y{br.target, br.apply(x.x)};
            e.branch.push_back(br.symbol);
            e.point.push_back(y);
            e.stencil.push_back(gr.locate(y));
        }
    }
    e.start[gr.size()] = e.branch.size();
    return m;
}

ModelPtr make_model(const ModelConfig& config) { return std::make_shared<const MarkovModel>(build_model(config)); }

PointRef apply_branch(const MarkovModel& m, const Word& word, const PointRef& x) {
    if (!m.admissible(word, x.interval))
        throw DomainError("word '" + word_string(word) + "' is not admissible at interval " + std::to_string(x.interval));
    PointRef y = x;
    for (auto it = word.rbegin(); it != word.rend(); ++it) y = m.apply(*it, y);
    return y;
}

OrbitValue expansion_cocycle(const MarkovModel& m, const PointRef& x, int n) {
    if (n < 0) throw DomainError("expansion_cocycle: n must be >= 0");
    OrbitValue out{1.0, false};
    PointRef p = x;
    for (int i = 0; i < n; ++i) {
        bool b = false;
        int a = m.symbol_at(p, &b);
        out.boundary = out.boundary || b;
        out.value /= m.branches[a].scale;
        p = m.forward(p);
    }
    return out;
}

OrbitValue birkhoff_sum(const MarkovModel& m, const PointFn& phi, const PointRef& x, int n) {
    if (n < 0) throw DomainError("birkhoff_sum: n must be >= 0");
    OrbitValue out{0.0, false};
    PointRef p = x;
    for (int i = 0; i < n; ++i) {
        out.value += phi(p);
        bool b = false;
        p = m.forward(p, &b);
        out.boundary = out.boundary || b;
    }
    return out;
}

OrbitValue birkhoff_sum(const MarkovModel& m, const RealFunction& phi, const PointRef& x, int n) {
    return birkhoff_sum(m, [&](const PointRef& p) { return phi.eval(p); }, x, n);
}

namespace {

void dfs_words(const MarkovModel& m, int n, int interval, Word& cur, std::vector<Word>& out) {
    if (static_cast<int>(cur.size()) == n) {
        if (interval < 0 || m.branches[cur.back()].accepts(interval)) out.push_back(cur);
        return;
    }
    for (int a = 0; a < m.alphabet(); ++a) {
        if (!cur.empty() && !m.adjacency[cur.back()][a]) continue;
        cur.push_back(a);
        dfs_words(m, n, interval, cur, out);
        cur.pop_back();
    }
}

std::vector<Word> words_impl(const MarkovModel& m, int n, int interval, std::size_t cap) {
    if (n < 1) throw DomainError("enumerate_branches: n must be >= 1");
    double total = std::pow(static_cast<double>(m.alphabet()), n);
    if (total > static_cast<double>(cap))
        throw SizeError("enumerate_branches: |A|^n = " + std::to_string(total) + " exceeds cap " + std::to_string(cap));
    std::vector<Word> out;
    Word cur;
    dfs_words(m, n, interval, cur, out);
    return out;
}

} // namespace

std::vector<Word> enumerate_branches(const MarkovModel& m, int n, std::size_t cap) { return words_impl(m, n, -1, cap); }

std::vector<Word> enumerate_branches(const MarkovModel& m, int n, int interval, std::size_t cap) {
    return words_impl(m, n, interval, cap);
}

double tau_along(const MarkovModel& m, const Word& w, const PointRef& z) {
    PointRef y = z;
    double s = 0.0;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        y = m.apply(*it, y);
        s += m.tau(y);
    }
    return s;
}

ContractionReport contraction_sandwich(const MarkovModel& m, int max_length) {
    ContractionReport r;
    r.max_length = max_length;
    // affine branches: |v(x) - v(y)| / |x - y| is the product of scales
    std::vector<std::pair<int, double>> frontier;
    for (int a = 0; a < m.alphabet(); ++a) frontier.push_back({a, m.branches[a].scale});
    for (int n = 1; n <= max_length; ++n) {
        for (auto& [last, prod] : frontier) {
            double upper = std::exp(-n * m.chi0);
            double lower = std::exp(-n * m.chi_star);
            r.C = std::max({r.C, prod / upper, lower / prod});
        }
        if (n == max_length) break;
        std::vector<std::pair<int, double>> next;
        for (auto& [last, prod] : frontier)
            for (int a = 0; a < m.alphabet(); ++a)
                if (m.adjacency[a][last]) next.push_back({a, prod * m.branches[a].scale});
        frontier.swap(next);
    }
    return r;
}

double tau_word_holder(const MarkovModel& m, int max_length, double theta) {
    constexpr int kSamples = 64;
    double worst = 0.0;
    for (int n = 1; n <= max_length; ++n) {
        for (const auto& w : enumerate_branches(m, n)) {
            const Branch& last = m.branches[w.back()];
            for (int a = last.dom_first; a <= last.dom_last; ++a) {
                const auto& iv = m.intervals[a];
                std::vector<double> vals(kSamples + 1);
                for (int i = 0; i <= kSamples; ++i)
                    vals[i] = tau_along(m, w, {a, iv.left + iv.length() * i / kSamples});
                for (int s = 1; s <= kSamples; s *= 2)
                    for (int i = 0; i + s <= kSamples; ++i) {
                        double d = std::pow(iv.length() * s / kSamples, theta);
                        worst = std::max(worst, std::abs(vals[i + s] - vals[i]) / d);
                    }
            }
        }
    }
    return worst;
}

} // namespace mixlab
