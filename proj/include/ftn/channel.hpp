#ifndef FTN_CHANNEL_HPP
#define FTN_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "ftn/pulse.hpp"

namespace ftn::channel {

// Causal symbol-rate replacement for the two-sided FTN autocorrelation.
// Obtained by real-cepstrum spectral factorization, which preserves the
// magnitude spectrum while front-loading the tap energy; the low-energy
// leading ramp is reported as `precursor_len` so decoders can run ahead
// by that many symbols.
struct EffectiveChannel {
    std::vector<double> taps;        // h[0..L_h-1], causal
    std::size_t precursor_len = 0;   // L_P
    double tau = 0.0;                // provenance
    double beta = 0.0;
    double discarded_energy = 0.0;   // fraction removed by truncate_channel

    double energy() const {
        double e = 0.0;
        for (double t : taps) e += t * t;
        return e;
    }
    std::size_t length() const { return taps.size(); }
};

// FFT grid for the spectral factorization and the spectrum floor applied
// before taking logs. Truncation of a PSD autocorrelation may produce tiny
// negative spectrum values; anything below -kNonPsdTolerance (relative to
// the spectrum peak) is treated as a genuine factorization failure.
inline constexpr std::size_t kFactorFftSize = 4096;
inline constexpr double kSpectrumFloor = 1e-12;
inline constexpr double kNonPsdTolerance = 1e-6;

// g_two_sided: symmetric odd-length symbol-rate autocorrelation samples.
// precursor_energy_floor: leading taps are counted into the precursor while
// their cumulative energy stays below this fraction of the total.
EffectiveChannel to_super_minimum_phase(const std::vector<double>& g_two_sided,
                                        double precursor_energy_floor = 1e-3,
                                        double tau = 0.0,
                                        double beta = 0.0);

// Drops the precursor, keeps at most max_len of the remaining taps and
// records the discarded energy fraction.
EffectiveChannel truncate_channel(const EffectiveChannel& ch, std::size_t max_len);

// Default working-channel policy: factorize the pulse autocorrelation, drop
// the precursor and keep taps until the cumulative energy reaches
// (1 - energy_tail), capped at max_taps.
EffectiveChannel working_channel(const pulse::PulseConfig& cfg,
                                 std::size_t max_taps = 32,
                                 double energy_tail = 1e-4,
                                 double precursor_energy_floor = 1e-3);

// |FFT(taps)| on the factorization grid; used by tests and the CLI to check
// magnitude-spectrum preservation against the floored target spectrum.
std::vector<double> magnitude_spectrum(const std::vector<double>& taps,
                                       std::size_t nfft = kFactorFftSize);

// Floored target magnitude spectrum of a two-sided autocorrelation.
std::vector<double> target_magnitude_spectrum(const std::vector<double>& g_two_sided,
                                              std::size_t nfft = kFactorFftSize);

}  // namespace ftn::channel

#endif
