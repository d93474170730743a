#include "ftn/modulation.hpp"

#include <cmath>

#include "ftn/errors.hpp"
#include "ftn/rng.hpp"

namespace ftn::modulation {

namespace {
const double kPam4Scale = 1.0 / std::sqrt(5.0);
// class id -> level factor and Gray bits
const double kPam4Levels[4] = {-3.0, -1.0, 1.0, 3.0};
const int kPam4Bits[4][2] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
}  // namespace

Scheme scheme_from_string(const std::string& name) {
    if (name == "bpsk") return Scheme::bpsk;
    if (name == "qpsk") return Scheme::qpsk;
    if (name == "4pam" || name == "pam4") return Scheme::pam4;
    throw ConfigError("unknown modulation scheme: " + name);
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::bpsk: return "bpsk";
        case Scheme::qpsk: return "qpsk";
        case Scheme::pam4: return "4pam";
    }
    return "?";
}

int bits_per_symbol(Scheme s) { return s == Scheme::bpsk ? 1 : 2; }
int classes_per_rail(Scheme s) { return s == Scheme::pam4 ? 4 : 2; }

double bpsk_level(int bit) { return bit ? 1.0 : -1.0; }

double pam4_level(int cls) { return kPam4Levels[cls & 3] * kPam4Scale; }

int pam4_class_from_bits(int b0, int b1) {
    for (int c = 0; c < 4; ++c) {
        if (kPam4Bits[c][0] == b0 && kPam4Bits[c][1] == b1) return c;
    }
    return 0;
}

void pam4_bits_from_class(int cls, int& b0, int& b1) {
    b0 = kPam4Bits[cls & 3][0];
    b1 = kPam4Bits[cls & 3][1];
}

int nearest_pam4_class(double value) {
    int best = 0;
    double best_d = std::abs(value - pam4_level(0));
    for (int c = 1; c < 4; ++c) {
        const double d = std::abs(value - pam4_level(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

double pilot_level(Scheme s) { return s == Scheme::pam4 ? pam4_level(2) : 1.0; }
int pilot_class(Scheme s) { return s == Scheme::pam4 ? 2 : 1; }

SymbolSequence modulate(const std::vector<int>& bits, Scheme scheme) {
    const int bps = bits_per_symbol(scheme);
    if (bits.size() % static_cast<std::size_t>(bps) != 0) {
        throw ContractError("modulate: bit count not divisible by bits-per-symbol");
    }
    const std::size_t n = bits.size() / static_cast<std::size_t>(bps);

    SymbolSequence out;
    out.scheme = scheme;
    switch (scheme) {
        case Scheme::bpsk: {
            out.rails.resize(1);
            out.rails[0].resize(n);
            for (std::size_t i = 0; i < n; ++i) out.rails[0][i] = bpsk_level(bits[i]);
            break;
        }
        case Scheme::qpsk: {
            out.rails.resize(2);
            out.rails[0].resize(n);
            out.rails[1].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                out.rails[0][i] = bpsk_level(bits[2 * i]);
                out.rails[1][i] = bpsk_level(bits[2 * i + 1]);
            }
            break;
        }
        case Scheme::pam4: {
            out.rails.resize(1);
            out.rails[0].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                out.rails[0][i] = pam4_level(pam4_class_from_bits(bits[2 * i], bits[2 * i + 1]));
            }
            break;
        }
    }
    return out;
}

std::vector<int> demodulate_bits(const SymbolSequence& s) {
    std::vector<int> bits;
    const std::size_t n = s.size();
    switch (s.scheme) {
        case Scheme::bpsk:
            bits.resize(n);
            for (std::size_t i = 0; i < n; ++i) bits[i] = s.rails[0][i] > 0.0 ? 1 : 0;
            break;
        case Scheme::qpsk:
            bits.resize(2 * n);
            for (std::size_t i = 0; i < n; ++i) {
                bits[2 * i] = s.rails[0][i] > 0.0 ? 1 : 0;
                bits[2 * i + 1] = s.rails[1][i] > 0.0 ? 1 : 0;
            }
            break;
        case Scheme::pam4:
            bits.resize(2 * n);
            for (std::size_t i = 0; i < n; ++i) {
                int b0 = 0, b1 = 0;
                pam4_bits_from_class(nearest_pam4_class(s.rails[0][i]), b0, b1);
                bits[2 * i] = b0;
                bits[2 * i + 1] = b1;
            }
            break;
    }
    return bits;
}

std::vector<std::uint8_t> rail_labels(const SymbolSequence& s, std::size_t rail) {
    if (rail >= s.rail_count()) throw ContractError("rail_labels: rail index out of range");
    const auto& r = s.rails[rail];
    std::vector<std::uint8_t> labels(r.size());
    if (s.scheme == Scheme::pam4) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            labels[i] = static_cast<std::uint8_t>(nearest_pam4_class(r[i]));
        }
    } else {
        for (std::size_t i = 0; i < r.size(); ++i) labels[i] = r[i] > 0.0 ? 1 : 0;
    }
    return labels;
}

int slice_class(Scheme s, double value) {
    if (s == Scheme::pam4) return nearest_pam4_class(value);
    return value > 0.0 ? 1 : 0;
}

double level_for_class(Scheme s, int cls) {
    if (s == Scheme::pam4) return pam4_level(cls);
    return bpsk_level(cls);
}

int bit_errors_between(Scheme s, int cls_a, int cls_b) {
    if (s == Scheme::pam4) {
        int a0, a1, b0, b1;
        pam4_bits_from_class(cls_a, a0, a1);
        pam4_bits_from_class(cls_b, b0, b1);
        return (a0 != b0) + (a1 != b1);
    }
    return cls_a != cls_b ? 1 : 0;
}

SymbolSequence random_symbols(Scheme scheme, std::size_t n_symbols, std::uint64_t seed,
                              std::uint64_t stream) {
    Rng rng(seed, stream);
    const int bps = bits_per_symbol(scheme);
    std::vector<int> bits(n_symbols * static_cast<std::size_t>(bps));
    for (int& b : bits) b = rng.coin() ? 1 : 0;
    return modulate(bits, scheme);
}

}  // namespace ftn::modulation
