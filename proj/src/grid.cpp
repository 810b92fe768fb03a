#include "mixlab/grid.hpp"
#include "mixlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mixlab {

Grid::Grid(std::vector<MarkovInterval> intervals) : intervals_(std::move(intervals)) {
    for (const auto& iv : intervals_) {
        offset_.push_back(size_);
        size_ += iv.grid_size + 1;
        owner_.insert(owner_.end(), iv.grid_size + 1, iv.id);
    }
}

PointRef Grid::node(std::size_t g) const {
    int a = owner_[g];
    const auto& iv = intervals_[a];
    std::size_t i = g - offset_[a];
    double x = (i == static_cast<std::size_t>(iv.grid_size)) ? iv.right : iv.left + static_cast<double>(i) * iv.spacing();
    return {a, x};
}

int Grid::interval_of(std::size_t g) const { return owner_[g]; }

Stencil Grid::locate(const PointRef& p) const {
    const auto& iv = intervals_[p.interval];
    double u = (p.x - iv.left) / iv.spacing();
    double fl = std::floor(u);
    long i = static_cast<long>(fl);
    double t = u - fl;
    if (i < 0) {
        i = 0;
        t = 0.0;
    } else if (i >= iv.grid_size) {
        i = iv.grid_size - 1;
        t = 1.0;
    }
    if (t >= 1.0) t = 1.0;
    return {offset_[p.interval] + static_cast<std::size_t>(i), t};
}

double Grid::min_spacing() const {
    double h = intervals_.front().spacing();
    for (const auto& iv : intervals_) h = std::min(h, iv.spacing());
    return h;
}

RealFunction abs(const ComplexFunction& u) {
    RealFunction out(u.grid_ptr());
    for (std::size_t g = 0; g < u.size(); ++g) out[g] = std::abs(u[g]);
    return out;
}

ComplexFunction to_complex(const RealFunction& u) {
    ComplexFunction out(u.grid_ptr());
    for (std::size_t g = 0; g < u.size(); ++g) out[g] = u[g];
    return out;
}

namespace {

template <class T>
std::string csv_impl(const GridFunction<T>& u) {
    std::ostringstream o;
    o << "interval_id,index,coordinate,re,im\n";
    char buf[160];
    const Grid& gr = u.grid();
    for (std::size_t g = 0; g < u.size(); ++g) {
        PointRef p = gr.node(g);
        std::complex<double> v(u[g]);
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g\n", p.interval, g - gr.offset(p.interval), p.x,
                      v.real(), v.imag());
        o << buf;
    }
    return o.str();
}

} // namespace

std::string to_csv(const RealFunction& u) { return csv_impl(u); }
std::string to_csv(const ComplexFunction& u) { return csv_impl(u); }

} // namespace mixlab
