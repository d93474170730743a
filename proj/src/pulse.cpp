#include "ftn/pulse.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ftn/errors.hpp"

namespace ftn::pulse {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

// x = t/t0. The removable singularities sit at x = 0 and |x| = 1/(4*beta);
// a guard band on the denominator switches to the limit branch.
double rrc_closed_form(double x, double beta) {
    if (std::abs(x) < 1e-12) {
        return 1.0 - beta + 4.0 * beta / kPi;
    }
    const double four_beta_x = 4.0 * beta * x;
    const double den = kPi * x * (1.0 - four_beta_x * four_beta_x);
    if (std::abs(den) < 1e-8) {
        // limit at |x| = 1/(4*beta)
        const double a = kPi / (4.0 * beta);
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * x * (1.0 - beta)) +
                       four_beta_x * std::cos(kPi * x * (1.0 + beta));
    return num / den;
}

double rc_closed_form(double x, double beta) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double sinc = std::sin(kPi * x) / (kPi * x);
    const double two_beta_x = 2.0 * beta * x;
    const double den = 1.0 - two_beta_x * two_beta_x;
    if (std::abs(den) < 1e-8) {
        // limit at |x| = 1/(2*beta)
        return kPi / 4.0 * sinc;
    }
    return sinc * std::cos(kPi * beta * x) / den;
}

void PulseConfig::validate() const {
    std::ostringstream msg;
    if (!(tau > 0.0 && tau <= 1.0)) {
        msg << "tau = " << tau << " violates 0 < tau <= 1";
        throw ConfigError(msg.str());
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
        msg << "beta = " << beta << " violates 0 < beta <= 1";
        throw ConfigError(msg.str());
    }
    if (!(t0 > 0.0)) {
        msg << "t0 = " << t0 << " violates t0 > 0";
        throw ConfigError(msg.str());
    }
    if (span < 8) {
        msg << "span = " << span << " violates span >= 8";
        throw ConfigError(msg.str());
    }
    if (oversample < 4) {
        msg << "oversample = " << oversample << " violates oversample >= 4";
        throw ConfigError(msg.str());
    }
    const double spf = tau * oversample;
    if (std::abs(spf - std::round(spf)) > 1e-9) {
        msg << "tau*oversample = " << spf
            << " must be an integer so FTN instants land on the grid";
        throw ConfigError(msg.str());
    }
}

int PulseConfig::samples_per_ftn_symbol() const {
    return static_cast<int>(std::llround(tau * oversample));
}

SampledPulse rrc_taps(const PulseConfig& cfg) {
    cfg.validate();
    const int half = cfg.span * cfg.oversample;
    const double dt = cfg.t0 / cfg.oversample;

    SampledPulse p;
    p.dt = dt;
    p.center_index = static_cast<std::size_t>(half);
    p.taps.resize(2 * half + 1);
    for (int i = -half; i <= half; ++i) {
        const double x = static_cast<double>(i) / cfg.oversample;
        p.taps[static_cast<std::size_t>(i + half)] = rrc_closed_form(x, cfg.beta);
    }

    double energy = 0.0;
    for (double v : p.taps) energy += v * v;
    energy *= dt;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : p.taps) v *= scale;
    return p;
}

SampledPulse rc_autocorrelation(const PulseConfig& cfg) {
    const SampledPulse q = rrc_taps(cfg);
    const std::size_t n = q.taps.size();

    SampledPulse g;
    g.dt = q.dt;
    g.center_index = n - 1;
    g.taps.assign(2 * n - 1, 0.0);
    // q is even, so q (*) q(-t) is plain convolution; exploit output symmetry.
    for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += q.taps[i] * q.taps[i + lag];
        acc *= q.dt;
        g.taps[g.center_index + lag] = acc;
        g.taps[g.center_index - lag] = acc;
    }
    return g;
}

std::vector<double> symbol_rate_autocorrelation(const PulseConfig& cfg, long max_lag) {
    const SampledPulse g = rc_autocorrelation(cfg);
    const long step = cfg.samples_per_ftn_symbol();
    const long support = static_cast<long>(g.center_index) / step;
    const long lags = (max_lag < 0) ? support : std::min(max_lag, support);

    std::vector<double> out(static_cast<std::size_t>(2 * lags + 1));
    for (long k = -lags; k <= lags; ++k) {
        out[static_cast<std::size_t>(k + lags)] = g.at_lag(k * step);
    }
    return out;
}

GramMatrix gram_matrix(const PulseConfig& cfg, std::size_t n) {
    cfg.validate();
    if (n < 1) throw SizeError("gram_matrix: n must be >= 1");
    if (n > kMaxGramSize) {
        std::ostringstream msg;
        msg << "gram_matrix: n = " << n << " exceeds the maximum " << kMaxGramSize;
        throw SizeError(msg.str());
    }

    std::vector<double> lag_value(n);
    for (std::size_t k = 0; k < n; ++k) {
        lag_value[k] = rc_closed_form(static_cast<double>(k) * cfg.tau, cfg.beta);
    }

    GramMatrix gm;
    gm.n = n;
    gm.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t lag = (r >= c) ? r - c : c - r;
            gm.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                lag_value[lag];
        }
    }
    return gm;
}

bool has_spectral_nulls(double tau, double beta) {
    if (!(tau > 0.0 && tau <= 1.0) || !(beta > 0.0 && beta <= 1.0)) {
        throw ConfigError("has_spectral_nulls: tau and beta must lie in (0, 1]");
    }
    return tau <= 1.0 / (1.0 + beta);
}

void write_pulse_csv(const SampledPulse& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "t,value\n";
    for (std::size_t i = 0; i < p.taps.size(); ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(p.center_index)) * p.dt;
        out << t << "," << p.taps[i] << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ftn::pulse
