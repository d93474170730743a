#ifndef FTN_TRANSMIT_HPP
#define FTN_TRANSMIT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ftn/channel.hpp"
#include "ftn/modulation.hpp"
#include "ftn/pulse.hpp"
#include "ftn/rng.hpp"

namespace ftn::transmit {

// Noise bookkeeping. The two simulation paths interpret n0 through their own
// model equations:
//   whitened path       w[k] i.i.d. gaussian, variance n0/2
//   matched-filter path eta with covariance    n0*G
// ebn0 conversion keeps the paths information-equivalent at the same stated
// Eb/N0 (see noise_for_ebn0 and the README formula).
struct NoiseModel {
    double n0 = 0.0;
    bool whitened = true;
};

// sigma = sqrt(E_h / (2 * bits_per_symbol * 10^(ebn0_db/10))): the per-sample
// noise standard deviation of the whitened path for a unit-average-energy
// constellation sent through a channel of energy E_h, with Eb counted per
// transmitted bit at the FTN rate.
double ebn0_to_sigma(double ebn0_db, modulation::Scheme scheme, double channel_energy);

// whitened=true  -> n0 = 2*sigma^2 (so the injected variance is sigma^2)
// whitened=false -> n0 = sigma^2   (so the matched covariance is sigma^2*G)
NoiseModel noise_for_ebn0(double ebn0_db, modulation::Scheme scheme, double channel_energy,
                          bool whitened);

struct ReceivedSequence {
    std::vector<std::vector<double>> observations;  // one array per rail
    modulation::SymbolSequence labels;              // includes pilot symbols
    double ebn0_db = 0.0;
    double noise_sigma = 0.0;
    double offset_fraction = 0.0;
    std::uint64_t seed = 0;
    std::size_t pilot_len = 0;       // known-symbol prefix
    std::size_t tail_pilot_len = 0;  // known-symbol suffix (waveform path)
    channel::EffectiveChannel channel;
    double tau = 0.0;
    double beta = 0.0;

    std::size_t total_len() const { return labels.size(); }
    std::size_t data_len() const { return total_len() - pilot_len - tail_pilot_len; }
    std::size_t rail_count() const { return observations.size(); }
};

inline constexpr std::size_t kDefaultPilotLen = 46;

// Discrete-equivalent fast path: y[k] = sum_i h[i] s[k-i] + w[k] with w
// i.i.d. gaussian of variance n0/2. The sequence is prefixed by known pilot
// symbols so every output index has full channel support.
ReceivedSequence transmit_discrete(const modulation::SymbolSequence& s,
                                   const channel::EffectiveChannel& ch,
                                   const NoiseModel& noise, std::uint64_t seed,
                                   std::size_t pilot_len = 0);

// Waveform path: synthesises sum_n s[n] q(t - n*tau*t0) on the oversampled
// grid, adds white gaussian noise at waveform rate, matched-filters with q
// and samples at t = k*tau*t0 + offset_fraction*tau*t0 (rounded to the
// grid). With noise.whitened the sampled block is additionally passed
// through the finite-block whitening transform derived from the Gram matrix
// at offset zero, which reproduces the discrete path statistics.
ReceivedSequence transmit_waveform(const modulation::SymbolSequence& s,
                                   const pulse::PulseConfig& cfg, const NoiseModel& noise,
                                   double offset_fraction, std::uint64_t seed,
                                   std::size_t pilot_len = 0);

// Matched-filter-path noise only: one block of n samples with covariance
// n0*G (used by the covariance fidelity checks).
Eigen::VectorXd sample_matched_noise(const Eigen::MatrixXd& gram, double n0, Rng& rng);

// Dataset container: JSON header + little-endian float64 observations and
// uint8 labels per rail, with a trailing CRC32 of the payload.
void save_dataset(const ReceivedSequence& rx, const std::string& path);
ReceivedSequence load_dataset(const std::string& path);
void export_dataset_csv(const ReceivedSequence& rx, const std::string& path);

}  // namespace ftn::transmit

#endif
