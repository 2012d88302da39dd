// Deterministic randomness for the whole library.
//
// Everything flows through std::mt19937_64, whose output sequence is specified
// bit-for-bit by the C++ standard. The <random> distributions are NOT specified
// across standard libraries, so every mapping from raw 64-bit words to samples
// is hand-rolled here and documented:
//
//   uniform01(): ((x >> 11) + 0.5) * 2^-53, a 53-bit uniform on the open (0,1)
//   normal():    Box-Muller on two uniform01 draws; the second variate is cached
//   below(n):    for power-of-two n a bitmask (x & (n-1)); otherwise rejection
//
// Given the same seed, every sequence of calls reproduces byte-identically on
// any conforming implementation.
#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

namespace ganlab {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform on the open interval (0,1), 53-bit resolution
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // standard normal via Box-Muller; consumes two words every other call
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.28318530717958647692528676655900577 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // uniform integer in [0, n); bitmask for powers of two, rejection otherwise
    std::uint64_t below(std::uint64_t n) {
        if ((n & (n - 1)) == 0) return gen_() & (n - 1);
        const std::uint64_t lim = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= lim);
        return x % n;
    }

    // Fisher-Yates
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ganlab
