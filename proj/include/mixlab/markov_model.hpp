#pragma once

#include "mixlab/grid.hpp"
#include "mixlab/model_config.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mixlab {

using Word = std::vector<int>;

std::string word_string(const Word& w);
Word parse_word(const std::string& s);

// Generating inverse branch v_a(x) = offset + scale*x, defined on the
// intervals dom_first..dom_last and landing in interval `target`.
struct Branch {
    int symbol = 0;
    int target = 0;
    int dom_first = 0;
    int dom_last = 0;
    double scale = 0.5;
    double offset = 0.0;

    bool accepts(int interval) const { return interval >= dom_first && interval <= dom_last; }
    double apply(double x) const { return offset + scale * x; }
    double invert(double y) const { return (y - offset) / scale; }
    double image_left() const;
    double image_right() const;
    double dom_left = 0.0;
    double dom_right = 1.0;
};

// One-step preimages of every grid node, stored by target node.
struct EdgeTable {
    std::vector<std::size_t> start; // size nodes+1
    std::vector<int> branch;
    std::vector<PointRef> point;
    std::vector<Stencil> stencil;

    std::size_t edges() const { return branch.size(); }
};

struct OrbitValue {
    double value = 0.0;
    bool boundary = false;
};

class MarkovModel {
public:
    ModelConfig config;
    std::vector<MarkovInterval> intervals;
    std::vector<Branch> branches;
    std::vector<std::vector<int>> adjacency; // adjacency[a][c] = word "ac" admissible
    double theta = 0.5;
    double chi0 = 0, chi_star = 0, chi_u = 0, chi_u_bar = 0, chi_s = 0, chi_s_bar = 0;
    double tau0 = 0, tau_star = 0;
    std::string hash;

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const EdgeTable& edges() const { return edges_; }
    int alphabet() const { return static_cast<int>(branches.size()); }

    double tau(const PointRef& p) const;
    double mu(const PointRef& p) const;
    double det(const PointRef& p) const;
    double expansion(const PointRef& p) const;
    double flow_potential(const PointRef& p, double t) const;
    double section_potential(const PointRef& p) const;

    // Symbol of the first-level cylinder containing p (right-continuous).
    int symbol_at(const PointRef& p, bool* boundary = nullptr) const;
    PointRef forward(const PointRef& p, bool* boundary = nullptr) const;
    PointRef apply(int symbol, const PointRef& p) const;
    PointRef point(double x) const; // interval lookup for a global coordinate
    bool admissible(const Word& w) const;
    bool admissible(const Word& w, int interval) const;

    friend MarkovModel build_model(const ModelConfig& config);

private:
    PointRef point_in(const Branch& br, double y) const;
    GridPtr grid_;
    EdgeTable edges_;
};

using ModelPtr = std::shared_ptr<const MarkovModel>;

MarkovModel build_model(const ModelConfig& config);
ModelPtr make_model(const ModelConfig& config);

PointRef apply_branch(const MarkovModel& m, const Word& word, const PointRef& x);
OrbitValue expansion_cocycle(const MarkovModel& m, const PointRef& x, int n);
OrbitValue birkhoff_sum(const MarkovModel& m, const PointFn& phi, const PointRef& x, int n);
OrbitValue birkhoff_sum(const MarkovModel& m, const RealFunction& phi, const PointRef& x, int n);
std::vector<Word> enumerate_branches(const MarkovModel& m, int n, std::size_t cap = std::size_t(1) << 22);
// Admissible words of length n whose domain contains `interval`.
std::vector<Word> enumerate_branches(const MarkovModel& m, int n, int interval, std::size_t cap = std::size_t(1) << 22);

// Birkhoff sum of tau along v_w(z): sum of tau over the chain of partial images.
double tau_along(const MarkovModel& m, const Word& w, const PointRef& z);

struct ContractionReport {
    int max_length = 0;
    double C = 1.0; // smallest C making the sandwich hold over all sampled words
};
ContractionReport contraction_sandwich(const MarkovModel& m, int max_length);

// Measured sup over words of length <= max_length of the theta-Hoelder norm of tau_n o w.
double tau_word_holder(const MarkovModel& m, int max_length, double theta);

} // namespace mixlab
