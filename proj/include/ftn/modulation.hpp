#ifndef FTN_MODULATION_HPP
#define FTN_MODULATION_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ftn::modulation {

enum class Scheme { bpsk, qpsk, pam4 };

Scheme scheme_from_string(const std::string& name);  // throws ConfigError
std::string scheme_name(Scheme s);
int bits_per_symbol(Scheme s);
int classes_per_rail(Scheme s);  // 2 for bpsk/qpsk rails, 4 for pam4

// Real-valued symbol rails. BPSK and 4-PAM use one rail; QPSK is carried as
// two independent BPSK rails (I and Q never interact over a real pulse).
struct SymbolSequence {
    Scheme scheme = Scheme::bpsk;
    std::vector<std::vector<double>> rails;

    std::size_t size() const { return rails.empty() ? 0 : rails[0].size(); }
    std::size_t rail_count() const { return rails.size(); }
};

// bit 0 -> -1, bit 1 -> +1
double bpsk_level(int bit);

// Gray-mapped unit-average-energy 4-PAM; class ids follow level order.
//   bits 00 -> class 0 -> -3/sqrt(5)     bits 01 -> class 1 -> -1/sqrt(5)
//   bits 11 -> class 2 -> +1/sqrt(5)     bits 10 -> class 3 -> +3/sqrt(5)
double pam4_level(int cls);
int pam4_class_from_bits(int b0, int b1);
void pam4_bits_from_class(int cls, int& b0, int& b1);
int nearest_pam4_class(double value);

// Pilot symbols are a known constellation point close to +1.
double pilot_level(Scheme s);
int pilot_class(Scheme s);

// Gray-mapped symbols with unit average energy per rail. Bit count must be
// divisible by bits_per_symbol; QPSK sends even bits on rail 0, odd on rail 1.
SymbolSequence modulate(const std::vector<int>& bits, Scheme scheme);

// Inverse of modulate (exact on constellation points).
std::vector<int> demodulate_bits(const SymbolSequence& s);

// Per-rail class labels (0/1 for BPSK rails, 0..3 for 4-PAM).
std::vector<std::uint8_t> rail_labels(const SymbolSequence& s, std::size_t rail);

// Hard decision for one rail value.
int slice_class(Scheme s, double value);
double level_for_class(Scheme s, int cls);
int bit_errors_between(Scheme s, int cls_a, int cls_b);

// Random symbol generation straight from fair bits.
SymbolSequence random_symbols(Scheme scheme, std::size_t n_symbols, std::uint64_t seed,
                              std::uint64_t stream = 0);

}  // namespace ftn::modulation

#endif
