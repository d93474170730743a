#ifndef FTN_PULSE_HPP
#define FTN_PULSE_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace ftn::pulse {

// Root-raised-cosine pulse generation and the FTN Gram matrix.
//
// All time axes are expressed in Nyquist intervals (t0 defaults to 1.0); the
// FTN symbol interval is tau*t0. `oversample` counts samples per Nyquist
// interval and tau*oversample must be an integer so that FTN sampling
// instants land exactly on the grid.

struct PulseConfig {
    double beta = 0.3;     // roll-off, 0 < beta <= 1
    double tau = 0.5;      // packing factor, 0 < tau <= 1
    double t0 = 1.0;       // Nyquist symbol interval (seconds)
    int span = 16;         // truncation half-length in Nyquist intervals
    int oversample = 8;    // samples per Nyquist interval

    void validate() const;                   // throws ConfigError
    int samples_per_ftn_symbol() const;      // tau*oversample, exact
};

struct SampledPulse {
    std::vector<double> taps;
    double dt = 0.0;
    std::size_t center_index = 0;

    double at_lag(long lag_samples) const {  // 0 outside the stored support
        const long idx = static_cast<long>(center_index) + lag_samples;
        if (idx < 0 || idx >= static_cast<long>(taps.size())) return 0.0;
        return taps[static_cast<std::size_t>(idx)];
    }
};

struct GramMatrix {
    std::size_t n = 0;
    Eigen::MatrixXd entries;
};

inline constexpr std::size_t kMaxGramSize = 16384;

// Closed-form RRC value at x = t/t0 (not energy-normalised); the removable
// singularities at x = 0 and |x| = 1/(4 beta) return their analytic limits.
double rrc_closed_form(double x, double beta);

// Closed-form raised-cosine autocorrelation at x = t/t0 for the unit-energy
// pulse; exact zeros at nonzero integer x. The Gram matrix samples this form
// so that the tau = 1 identity holds to full precision instead of carrying
// the pulse-truncation leakage of the convolved grid.
double rc_closed_form(double x, double beta);

// Truncated unit-energy RRC pulse; singular points evaluated by their limits.
SampledPulse rrc_taps(const PulseConfig& cfg);

// g = q (*) q reversed, on the same grid; g(0) = 1 for the unit-energy pulse.
SampledPulse rc_autocorrelation(const PulseConfig& cfg);

// Two-sided symbol-rate samples g(k*tau*t0), k = -max_lag..max_lag.
// max_lag < 0 means "all lags the stored support provides".
std::vector<double> symbol_rate_autocorrelation(const PulseConfig& cfg, long max_lag = -1);

// G(k, m) = g((k - m) * tau * t0); symmetric Toeplitz, identity at tau = 1.
GramMatrix gram_matrix(const PulseConfig& cfg, std::size_t n);

// True iff tau <= 1/(1+beta): folding the RC spectrum leaves nulls.
bool has_spectral_nulls(double tau, double beta);

// CSV dump "t,value" for plotting.
void write_pulse_csv(const SampledPulse& p, const std::string& path);

}  // namespace ftn::pulse

#endif
