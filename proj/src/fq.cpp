#include "prcm/fq.hpp"

namespace prcm {

bool Fq::is_prime(uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (uint32_t f = 3; static_cast<uint64_t>(f) * f <= n; f += 2)
        if (n % f == 0) return false;
    return true;
}

} // namespace prcm
