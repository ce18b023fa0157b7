#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace skp {

// All stochastic stages go through these helpers instead of the standard
// distributions, whose output is implementation-defined. mt19937 itself is
// pinned by the standard, so a fixed seed gives the same stream everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(static_cast<std::mt19937::result_type>(seed)) {}

    uint32_t next_u32() { return gen_(); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(gen_()) * (1.0 / 4294967296.0);
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // uniform integer in [0, n)
    size_t index(size_t n) {
        return static_cast<size_t>(next_double() * static_cast<double>(n)) % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

private:
    std::mt19937 gen_;
};

}  // namespace skp
