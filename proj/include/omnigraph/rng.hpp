#pragma once

#include <cstdint>
#include <random>

namespace omnigraph {

// Seeded generator with distribution helpers whose output does not depend on
// the standard library implementation (std::uniform_*_distribution does).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform index in [0, n); n > 0.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    template <typename Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::size_t j = index(i);
            using std::swap;
            swap(c[i - 1], c[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace omnigraph
