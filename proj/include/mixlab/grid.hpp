#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mixlab {

struct PointRef {
    int interval = 0;
    double x = 0.0;
};

struct MarkovInterval {
    int id = 0;
    double left = 0.0;
    double right = 1.0;
    int grid_size = 4096;

    double length() const { return right - left; }
    double spacing() const { return length() / grid_size; }
};

// Node i of interval a sits at left + i*spacing, i = 0..grid_size.
struct Stencil {
    std::size_t lo = 0; // global index of the left node
    double t = 0.0;     // weight of node lo+1
};

class Grid {
public:
    explicit Grid(std::vector<MarkovInterval> intervals);

    const std::vector<MarkovInterval>& intervals() const { return intervals_; }
    std::size_t size() const { return size_; }
    std::size_t offset(int interval) const { return offset_[interval]; }
    std::size_t nodes(int interval) const { return intervals_[interval].grid_size + 1; }
    PointRef node(std::size_t g) const;
    int interval_of(std::size_t g) const;
    Stencil locate(const PointRef& p) const;
    double min_spacing() const;

private:
    std::vector<MarkovInterval> intervals_;
    std::vector<std::size_t> offset_;
    std::vector<int> owner_;
    std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

template <class T>
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridPtr grid, T fill = T{}) : grid_(std::move(grid)), values_(grid_->size(), fill) {}
    GridFunction(GridPtr grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {}

    static GridFunction sample(GridPtr grid, const std::function<T(const PointRef&)>& f) {
        GridFunction out(grid);
        for (std::size_t g = 0; g < grid->size(); ++g) out.values_[g] = f(grid->node(g));
        return out;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    T& operator[](std::size_t g) { return values_[g]; }
    const T& operator[](std::size_t g) const { return values_[g]; }
    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    T eval(const Stencil& s) const {
        if (s.t == 0.0) return values_[s.lo];
        return values_[s.lo] * (1.0 - s.t) + values_[s.lo + 1] * s.t;
    }
    T eval(const PointRef& p) const { return eval(grid_->locate(p)); }

private:
    GridPtr grid_;
    std::vector<T> values_;
};

using RealFunction = GridFunction<double>;
using ComplexFunction = GridFunction<std::complex<double>>;
using PointFn = std::function<double(const PointRef&)>;

RealFunction abs(const ComplexFunction& u);
ComplexFunction to_complex(const RealFunction& u);

// CSV with columns interval_id,index,coordinate,re,im.
std::string to_csv(const RealFunction& u);
std::string to_csv(const ComplexFunction& u);

} // namespace mixlab
