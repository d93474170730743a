#ifndef FTN_UTIL_HPP
#define FTN_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace ftn {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_function(double x) {
    return 0.5 * std::erfc(x / 1.4142135623730950488);
}

// FNV-1a over a byte string; used for config hashes in manifests.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

std::string hex64(std::uint64_t v);

// 95% binomial confidence half-width (normal approximation).
inline double binomial_ci95_halfwidth(std::uint64_t errors, std::uint64_t trials) {
    if (trials == 0) return 0.0;
    const double p = static_cast<double>(errors) / static_cast<double>(trials);
    return 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

// Parse "lo:step:hi" or a comma list into a grid of doubles.
std::vector<double> parse_grid(const std::string& text);

}  // namespace ftn

#endif
