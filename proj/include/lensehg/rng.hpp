#pragma once

#include <cstdint>
#include <random>

namespace lensehg {

// Deterministic uniform generator. The mapping from raw 64-bit words to
// doubles is fixed here instead of relying on std::uniform_real_distribution,
// whose output is implementation defined; identical seeds must reproduce
// identical streams on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Uniform integer in {0, ..., n-1}.
    int below(int n) {
        int v = static_cast<int>(u01() * n);
        return v >= n ? n - 1 : v;
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace lensehg
