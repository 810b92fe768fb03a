#include "mixlab/parallel.hpp"

namespace mixlab {

namespace {
std::atomic<unsigned> g_cap{0};
}

void set_thread_cap(unsigned n) { g_cap = n; }

unsigned thread_cap() {
    unsigned c = g_cap.load();
    if (c == 0) c = std::max(1u, std::thread::hardware_concurrency());
    return c;
}

} // namespace mixlab
