#pragma once

#include "mixlab/mixlab.hpp"

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <string>
#include <utility>

namespace mixlab::test {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLog2 = std::numbers::ln2;

inline ModelPtr model(std::initializer_list<std::pair<const char*, const char*>> kv, int grid = 0) {
    ModelConfig c;
    for (const auto& [k, v] : kv) c.set(k, v);
    if (grid > 0) c.grid_size = grid;
    return make_model(c);
}

inline ModelPtr doubling(int grid = 0) { return model({}, grid); }
inline ModelPtr sin_roof(int grid = 0) { return model({{"roof_const", "2"}, {"roof_sin", "0.5"}}, grid); }

inline GridPtr unit_grid(int n) { return std::make_shared<Grid>(std::vector<MarkovInterval>{{0, 0.0, 1.0, n}}); }

// owns the values, so it is safe in a range-for over a temporary
template <class T>
std::vector<T> values_of(const GridFunction<T>& f) {
    return f.values();
}

template <class F>
RealFunction sample(const GridPtr& g, F f) {
    return RealFunction::sample(g, [&f](const PointRef& p) { return f(p.x); });
}

} // namespace mixlab::test
