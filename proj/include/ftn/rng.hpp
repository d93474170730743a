#ifndef FTN_RNG_HPP
#define FTN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ftn {

// Deterministic RNG used everywhere simulation noise or shuffling is drawn.
//
// std::mt19937_64 has a standard-mandated output sequence, but the standard
// distributions do not, so the uniform and gaussian converters are spelled
// out here. Independent streams are derived from (seed, stream) via
// splitmix64, so Monte Carlo shards and QPSK rails can draw reproducible,
// non-overlapping-by-construction sequences.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]; safe as a log() argument
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::uint64_t below(std::uint64_t n) {
        return n ? next_u64() % n : 0;
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    // Box-Muller; one spare kept between calls.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ftn

#endif
