#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace prcm {

// Arithmetic context for the prime field F_q. Elements are stored as
// uint32_t values in [0, q). The context is cheap to copy and is passed
// by value or const reference everywhere a coefficient field is needed.
class Fq {
public:
    explicit Fq(uint32_t q) : q_(q) {
        if (q < 2) throw std::invalid_argument("field modulus must be >= 2");
        if (!is_prime(q)) throw std::invalid_argument("field modulus must be prime");
        inv_.assign(q_, 0);
        for (uint32_t a = 1; a < q_; ++a) inv_[a] = pow(a, q_ - 2);
    }

    uint32_t modulus() const { return q_; }

    uint32_t add(uint32_t a, uint32_t b) const {
        uint32_t s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + q_ - b; }
    uint32_t neg(uint32_t a) const { return a == 0 ? 0 : q_ - a; }
    uint32_t mul(uint32_t a, uint32_t b) const {
        return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % q_);
    }
    uint32_t inv(uint32_t a) const {
        if (a == 0) throw std::domain_error("inverse of zero in F_q");
        return inv_[a];
    }
    uint32_t pow(uint32_t a, uint64_t e) const {
        uint64_t r = 1, x = a % q_;
        while (e) {
            if (e & 1) r = (r * x) % q_;
            x = (x * x) % q_;
            e >>= 1;
        }
        return static_cast<uint32_t>(r);
    }
    // Reduce a possibly negative integer (e.g. an orientation sign) into [0, q).
    uint32_t from_int(int64_t v) const {
        int64_t m = v % static_cast<int64_t>(q_);
        if (m < 0) m += q_;
        return static_cast<uint32_t>(m);
    }

    static bool is_prime(uint32_t n);

private:
    uint32_t q_;
    std::vector<uint32_t> inv_;
};

} // namespace prcm
