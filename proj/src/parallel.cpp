#include "lacunary/parallel.hpp"

namespace lacunary {

unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
}

}  // namespace lacunary
