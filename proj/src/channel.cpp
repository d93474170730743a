#include "ftn/channel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <sstream>

#include "ftn/errors.hpp"

namespace ftn::channel {

namespace {

using cplx = std::complex<double>;

// Real part of the DFT of a zero-padded circular placement of the two-sided
// sequence (center at bin 0); this is the folded power spectrum.
std::vector<double> folded_spectrum(const std::vector<double>& g, std::size_t nfft) {
    const std::size_t len = g.size();
    const std::size_t center = (len - 1) / 2;
    std::vector<double> buf(nfft, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        const long rel = static_cast<long>(i) - static_cast<long>(center);
        const std::size_t idx =
            static_cast<std::size_t>((rel % static_cast<long>(nfft) + static_cast<long>(nfft)) %
                                     static_cast<long>(nfft));
        buf[idx] += g[i];
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, buf);
    std::vector<double> s(nfft);
    for (std::size_t i = 0; i < nfft; ++i) s[i] = spec[i].real();
    return s;
}

void check_symmetric(const std::vector<double>& g) {
    if (g.empty() || g.size() % 2 == 0) {
        throw ContractError("to_super_minimum_phase: input must be odd-length two-sided");
    }
    double peak = 0.0;
    for (double v : g) peak = std::max(peak, std::abs(v));
    const std::size_t c = (g.size() - 1) / 2;
    for (std::size_t k = 0; k <= c; ++k) {
        if (std::abs(g[c + k] - g[c - k]) > 1e-9 * std::max(1.0, peak)) {
            throw ContractError("to_super_minimum_phase: input autocorrelation is not symmetric");
        }
    }
}

}  // namespace

EffectiveChannel to_super_minimum_phase(const std::vector<double>& g_two_sided,
                                        double precursor_energy_floor,
                                        double tau,
                                        double beta) {
    check_symmetric(g_two_sided);
    if (g_two_sided.size() > kFactorFftSize / 2) {
        throw SizeError("to_super_minimum_phase: input exceeds half the factorization grid");
    }

    const std::size_t nfft = kFactorFftSize;
    std::vector<double> s = folded_spectrum(g_two_sided, nfft);

    double peak = 0.0;
    for (double v : s) peak = std::max(peak, v);
    if (peak <= 0.0) throw NumericError("to_super_minimum_phase: spectrum has no positive mass");
    for (std::size_t i = 0; i < nfft; ++i) {
        if (s[i] < -kNonPsdTolerance * peak) {
            std::ostringstream msg;
            msg << "to_super_minimum_phase: spectrum not PSD at bin " << i << " (value " << s[i]
                << ", peak " << peak << ")";
            throw NumericError(msg.str());
        }
        s[i] = std::max(s[i], kSpectrumFloor);
    }

    // Real cepstrum of the magnitude spectrum, folded onto the causal part,
    // exponentiated back: the classic minimum-phase construction.
    std::vector<double> log_mag(nfft);
    for (std::size_t i = 0; i < nfft; ++i) log_mag[i] = 0.5 * std::log(s[i]);

    Eigen::FFT<double> fft;
    std::vector<cplx> tmp(nfft);
    for (std::size_t i = 0; i < nfft; ++i) tmp[i] = cplx(log_mag[i], 0.0);
    std::vector<cplx> ceps_c;
    fft.inv(ceps_c, tmp);

    std::vector<cplx> folded(nfft, cplx(0.0, 0.0));
    folded[0] = ceps_c[0];
    for (std::size_t i = 1; i < nfft / 2; ++i) folded[i] = 2.0 * ceps_c[i];
    folded[nfft / 2] = ceps_c[nfft / 2];

    std::vector<cplx> log_h;
    fft.fwd(log_h, folded);
    for (std::size_t i = 0; i < nfft; ++i) log_h[i] = std::exp(log_h[i]);
    std::vector<cplx> h_c;
    fft.inv(h_c, log_h);

    std::vector<double> h(nfft);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < nfft; ++i) {
        h[i] = h_c[i].real();
        max_abs = std::max(max_abs, std::abs(h[i]));
    }

    // Trim the numerically-zero tail (the construction is causal up to FFT
    // round-off); keep everything that contributes to the spectrum match.
    std::size_t keep = nfft;
    while (keep > 1 && std::abs(h[keep - 1]) < 1e-13 * max_abs) --keep;
    h.resize(keep);

    EffectiveChannel ch;
    ch.taps = std::move(h);
    ch.tau = tau;
    ch.beta = beta;

    const double total = ch.energy();
    double acc = 0.0;
    std::size_t p = 0;
    while (p < ch.taps.size() && acc + ch.taps[p] * ch.taps[p] < precursor_energy_floor * total) {
        acc += ch.taps[p] * ch.taps[p];
        ++p;
    }
    ch.precursor_len = p;
    return ch;
}

EffectiveChannel truncate_channel(const EffectiveChannel& ch, std::size_t max_len) {
    if (max_len < 1) throw ContractError("truncate_channel: max_len must be >= 1");
    const double total = ch.energy();

    EffectiveChannel out;
    out.tau = ch.tau;
    out.beta = ch.beta;
    out.precursor_len = 0;
    const std::size_t begin = std::min(ch.precursor_len, ch.taps.size());
    const std::size_t end = std::min(begin + max_len, ch.taps.size());
    out.taps.assign(ch.taps.begin() + static_cast<long>(begin),
                    ch.taps.begin() + static_cast<long>(end));
    out.discarded_energy = (total > 0.0) ? 1.0 - out.energy() / total : 0.0;
    return out;
}

EffectiveChannel working_channel(const pulse::PulseConfig& cfg,
                                 std::size_t max_taps,
                                 double energy_tail,
                                 double precursor_energy_floor) {
    const std::vector<double> g = pulse::symbol_rate_autocorrelation(cfg);
    EffectiveChannel full = to_super_minimum_phase(g, precursor_energy_floor, cfg.tau, cfg.beta);

    const double total = full.energy();
    double acc = 0.0;
    std::size_t len = 0;
    for (std::size_t i = full.precursor_len; i < full.taps.size() && len < max_taps; ++i) {
        acc += full.taps[i] * full.taps[i];
        ++len;
        if (acc >= (1.0 - energy_tail) * total) break;
    }
    return truncate_channel(full, std::max<std::size_t>(len, 1));
}

std::vector<double> magnitude_spectrum(const std::vector<double>& taps, std::size_t nfft) {
    std::vector<double> buf(nfft, 0.0);
    for (std::size_t i = 0; i < taps.size() && i < nfft; ++i) buf[i] = taps[i];
    Eigen::FFT<double> fft;
    std::vector<cplx> spec;
    fft.fwd(spec, buf);
    std::vector<double> mag(nfft);
    for (std::size_t i = 0; i < nfft; ++i) mag[i] = std::abs(spec[i]);
    return mag;
}

std::vector<double> target_magnitude_spectrum(const std::vector<double>& g_two_sided,
                                              std::size_t nfft) {
    std::vector<double> s = folded_spectrum(g_two_sided, nfft);
    std::vector<double> mag(nfft);
    for (std::size_t i = 0; i < nfft; ++i) mag[i] = std::sqrt(std::max(s[i], kSpectrumFloor));
    return mag;
}

}  // namespace ftn::channel
