#ifndef FTN_CLASSIC_TRELLIS_HPP
#define FTN_CLASSIC_TRELLIS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ftn/channel.hpp"
#include "ftn/modulation.hpp"
#include "ftn/transmit.hpp"

namespace ftn::classic {

// Trellis over the truncated causal channel. State = the last `memory`
// symbols, base-A encoded with the most recent symbol in the lowest digit.
struct TrellisConfig {
    channel::EffectiveChannel channel;  // taps actually used (memory + 1 of them)
    modulation::Scheme scheme = modulation::Scheme::bpsk;

    std::size_t memory() const { return channel.length() - 1; }
    std::size_t alphabet() const { return static_cast<std::size_t>(modulation::classes_per_rail(scheme)); }
    std::size_t state_count() const;
    void validate() const;  // memory caps: 16 (binary rails), 8 (4-PAM)
};

// Exact block MLSE: minimises sum_k (y[k] - sum_i h[i] s[k-i])^2 with known
// pilot symbols constrained; ties broken toward the lexicographically
// smaller symbol sequence (symbols ordered by class id).
modulation::SymbolSequence viterbi_detect(const transmit::ReceivedSequence& rx,
                                          const TrellisConfig& cfg);

// Log-domain forward-backward. Returns per-symbol class posteriors, one row
// per class; for binary rails row 1 is P(x = +1 | y).
Eigen::MatrixXd bcjr_posteriors_rail(const transmit::ReceivedSequence& rx,
                                     const TrellisConfig& cfg, double sigma,
                                     std::size_t rail = 0);

// Hard MAP decisions by thresholding the posteriors at 1/2 (binary) or
// taking the per-symbol argmax (4-PAM); ties resolve to the larger class.
modulation::SymbolSequence map_detect(const transmit::ReceivedSequence& rx,
                                      const TrellisConfig& cfg, double sigma);

}  // namespace ftn::classic

#endif
