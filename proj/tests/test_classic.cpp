#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ftn/classic/dfe.hpp"
#include "ftn/classic/med.hpp"
#include "ftn/classic/trellis.hpp"
#include "ftn/errors.hpp"
#include "ftn/rng.hpp"
#include "ftn/util.hpp"

using namespace ftn;
namespace mod = ftn::modulation;

namespace {

channel::EffectiveChannel make_channel(std::vector<double> taps) {
    channel::EffectiveChannel ch;
    ch.taps = std::move(taps);
    return ch;
}

transmit::ReceivedSequence make_rx(const std::vector<double>& y,
                                   const std::vector<double>& labels, std::size_t pilot_len,
                                   const channel::EffectiveChannel& ch) {
    transmit::ReceivedSequence rx;
    rx.observations = {y};
    rx.labels.scheme = mod::Scheme::bpsk;
    rx.labels.rails = {labels};
    rx.pilot_len = pilot_len;
    rx.tail_pilot_len = 0;
    rx.channel = ch;
    return rx;
}

// simulate BPSK through taps with +1 history, optional noise
std::vector<double> run_channel(const std::vector<double>& sym, const std::vector<double>& h,
                                double sigma, Rng* rng) {
    std::vector<double> y(sym.size());
    for (std::size_t k = 0; k < sym.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            acc += h[i] * (k >= i ? sym[k - i] : 1.0);
        }
        y[k] = acc + (rng ? sigma * rng->gaussian() : 0.0);
    }
    return y;
}

// exhaustive MLSE over the data region (pilots fixed to +1)
std::vector<double> brute_mlse(const std::vector<double>& y, std::size_t pilot_len,
                               const std::vector<double>& h) {
    const std::size_t n = y.size() - pilot_len;
    std::vector<double> best;
    double best_metric = std::numeric_limits<double>::infinity();
    std::vector<double> sym(y.size(), 1.0);
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) {
            sym[pilot_len + i] = (mask >> i) & 1 ? 1.0 : -1.0;
        }
        double metric = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                acc += h[i] * (k >= i ? sym[k - i] : 1.0);
            }
            metric += (y[k] - acc) * (y[k] - acc);
        }
        if (metric < best_metric) {
            best_metric = metric;
            best = sym;
        }
    }
    return best;
}

// exhaustive per-symbol marginals
std::vector<double> brute_marginals(const std::vector<double>& y, std::size_t pilot_len,
                                    const std::vector<double>& h, double sigma) {
    const std::size_t n = y.size() - pilot_len;
    std::vector<double> p_plus(y.size(), 0.0);
    double total = 0.0;
    std::vector<double> sym(y.size(), 1.0);
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) {
            sym[pilot_len + i] = (mask >> i) & 1 ? 1.0 : -1.0;
        }
        double loglik = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                acc += h[i] * (k >= i ? sym[k - i] : 1.0);
            }
            loglik += -(y[k] - acc) * (y[k] - acc) / (2.0 * sigma * sigma);
        }
        const double w = std::exp(loglik);
        total += w;
        for (std::size_t k = 0; k < y.size(); ++k) {
            if (sym[k] > 0) p_plus[k] += w;
        }
    }
    for (double& v : p_plus) v /= total;
    return p_plus;
}

}  // namespace

TEST_CASE("viterbi: memoryless slicing and zero-metric paths") {
    const auto ch = make_channel({1.0});
    Rng rng(3);
    std::vector<double> sym(64);
    for (double& v : sym) v = rng.coin() ? 1.0 : -1.0;
    const auto y = run_channel(sym, ch.taps, 0.0, nullptr);
    const auto rx = make_rx(y, sym, 0, ch);
    classic::TrellisConfig cfg{ch, mod::Scheme::bpsk};
    const auto dec = classic::viterbi_detect(rx, cfg);
    CHECK(dec.rails[0] == sym);

    // all-(+1) input, noiseless, any channel -> all-(+1) output
    const auto ch2 = make_channel({0.7, 0.5, -0.3});
    std::vector<double> ones(40, 1.0);
    const auto y2 = run_channel(ones, ch2.taps, 0.0, nullptr);
    const auto rx2 = make_rx(y2, ones, 3, ch2);
    const auto dec2 = classic::viterbi_detect(rx2, classic::TrellisConfig{ch2, mod::Scheme::bpsk});
    CHECK(dec2.rails[0] == ones);
}

TEST_CASE("viterbi equals exhaustive MLSE on 1000 noisy trials") {
    const auto ch = make_channel({0.8, 0.6});
    classic::TrellisConfig cfg{ch, mod::Scheme::bpsk};
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t pilot = 2;
        std::vector<double> sym(pilot + 12, 1.0);
        for (std::size_t i = pilot; i < sym.size(); ++i) sym[i] = rng.coin() ? 1.0 : -1.0;
        const auto y = run_channel(sym, ch.taps, 0.4, &rng);
        const auto rx = make_rx(y, sym, pilot, ch);
        const auto dec = classic::viterbi_detect(rx, cfg);
        const auto want = brute_mlse(y, pilot, ch.taps);
        CHECK(dec.rails[0] == want);
    }
}

TEST_CASE("bcjr equals exhaustive marginals and is normalised") {
    const auto ch = make_channel({0.8, 0.6});
    classic::TrellisConfig cfg{ch, mod::Scheme::bpsk};
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t pilot = 2;
        std::vector<double> sym(pilot + 10, 1.0);
        for (std::size_t i = pilot; i < sym.size(); ++i) sym[i] = rng.coin() ? 1.0 : -1.0;
        const double sigma = 0.5;
        const auto y = run_channel(sym, ch.taps, sigma, &rng);
        const auto rx = make_rx(y, sym, pilot, ch);
        const auto post = classic::bcjr_posteriors_rail(rx, cfg, sigma);
        const auto want = brute_marginals(y, pilot, ch.taps, sigma);
        for (std::size_t k = 0; k < y.size(); ++k) {
            CHECK(post(0, static_cast<Eigen::Index>(k)) +
                      post(1, static_cast<Eigen::Index>(k)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
            CHECK(post(1, static_cast<Eigen::Index>(k)) ==
                  doctest::Approx(want[k]).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(classic::bcjr_posteriors_rail(
                        make_rx({1.0, -1.0}, {1.0, -1.0}, 0, ch), cfg, 0.0),
                    ContractError);
}

TEST_CASE("bcjr antipodal symmetry without pilot constraints") {
    const auto ch = make_channel({0.9, 0.4, 0.2});
    classic::TrellisConfig cfg{ch, mod::Scheme::bpsk};
    Rng rng(21);
    std::vector<double> sym(16);
    for (double& v : sym) v = rng.coin() ? 1.0 : -1.0;
    auto y = run_channel(sym, ch.taps, 0.6, &rng);
    // neutralise the +1 pre-history used by run_channel
    for (std::size_t k = 0; k < 2; ++k) y[k] = 0.0;

    const auto rx_pos = make_rx(y, sym, 0, ch);
    std::vector<double> yneg(y);
    for (double& v : yneg) v = -v;
    std::vector<double> symneg(sym);
    for (double& v : symneg) v = -v;
    const auto rx_neg = make_rx(yneg, symneg, 0, ch);

    const auto p_pos = classic::bcjr_posteriors_rail(rx_pos, cfg, 0.6);
    const auto p_neg = classic::bcjr_posteriors_rail(rx_neg, cfg, 0.6);
    for (std::size_t k = 0; k < y.size(); ++k) {
        CHECK(p_pos(1, static_cast<Eigen::Index>(k)) ==
              doctest::Approx(p_neg(0, static_cast<Eigen::Index>(k))).epsilon(1e-12));
    }
}

TEST_CASE("randomised property: viterbi and bcjr match oracles, memory up to 3") {
    Rng rng(2024);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t mem = 1 + rng.below(3);
        std::vector<double> taps(mem + 1);
        double energy = 0.0;
        for (double& v : taps) {
            v = rng.gaussian();
            energy += v * v;
        }
        for (double& v : taps) v /= std::sqrt(energy);
        if (std::abs(taps[0]) < 0.05) taps[0] = 0.3;
        const auto ch = make_channel(taps);
        classic::TrellisConfig cfg{ch, mod::Scheme::bpsk};

        const std::size_t pilot = mem;
        const std::size_t n = pilot + 6 + rng.below(5);
        std::vector<double> sym(n, 1.0);
        for (std::size_t i = pilot; i < n; ++i) sym[i] = rng.coin() ? 1.0 : -1.0;
        const double sigma = 0.3 + 0.4 * rng.uniform();
        const auto y = run_channel(sym, ch.taps, sigma, &rng);
        const auto rx = make_rx(y, sym, pilot, ch);

        CHECK(classic::viterbi_detect(rx, cfg).rails[0] == brute_mlse(y, pilot, ch.taps));
        const auto post = classic::bcjr_posteriors_rail(rx, cfg, sigma);
        const auto want = brute_marginals(y, pilot, ch.taps, sigma);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(post(1, static_cast<Eigen::Index>(k)) ==
                  doctest::Approx(want[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("dfe: identity channel converges to the Wiener solution") {
    const auto ch = make_channel({1.0});
    const auto s = mod::random_symbols(mod::Scheme::bpsk, 4000, 5);
    transmit::NoiseModel quiet{0.0, true};
    auto rx = transmit::transmit_discrete(s, ch, quiet, 5, 64);

    classic::DFEConfig cfg;
    cfg.ff_taps = 8;
    cfg.fb_taps = 4;
    cfg.rls_len = 500;
    const auto res = classic::dfe_detect(rx, cfg);

    CHECK(res.ff_weights[0] == doctest::Approx(1.0).epsilon(1e-3));
    for (std::size_t i = 1; i < res.ff_weights.size(); ++i) {
        CHECK(std::abs(res.ff_weights[i]) < 1e-3);
    }
    for (double w : res.fb_weights) CHECK(std::abs(w) < 1e-3);

    std::size_t errors = 0;
    const std::size_t lo = rx.pilot_len + res.train_prefix;
    for (std::size_t k = lo; k < rx.total_len(); ++k) {
        errors += (res.decisions.rails[0][k] > 0) != (rx.labels.rails[0][k] > 0);
    }
    CHECK(errors == 0);
}

TEST_CASE("dfe: noiseless minimum-phase channel equalises perfectly") {
    pulse::PulseConfig pcfg;
    pcfg.tau = 0.5;
    pcfg.beta = 0.3;
    const auto w = channel::working_channel(pcfg, 8);
    const auto s = mod::random_symbols(mod::Scheme::bpsk, 6000, 6);
    transmit::NoiseModel quiet{0.0, true};
    auto rx = transmit::transmit_discrete(s, w, quiet, 6, 64);

    classic::DFEConfig cfg;
    cfg.ff_taps = 12;
    cfg.fb_taps = w.length() - 1;
    cfg.rls_len = 1500;
    const auto res = classic::dfe_detect(rx, cfg);

    std::size_t errors = 0;
    const std::size_t lo = rx.pilot_len + res.train_prefix;
    for (std::size_t k = lo; k < rx.total_len(); ++k) {
        errors += (res.decisions.rails[0][k] > 0) != (rx.labels.rails[0][k] > 0);
    }
    CHECK(errors == 0);

    CHECK_THROWS_AS(classic::dfe_detect(
                        make_rx({0.0, 0.0}, {1.0, 1.0}, 1, w), cfg),
                    ContractError);
}

TEST_CASE("dfe underperforms viterbi on the tau=0.5 channel at 10 dB") {
    pulse::PulseConfig pcfg;
    pcfg.tau = 0.5;
    pcfg.beta = 0.3;
    const auto w = channel::working_channel(pcfg, 8);
    const auto s = mod::random_symbols(mod::Scheme::bpsk, 60000, 17);
    const auto nm = transmit::noise_for_ebn0(10.0, mod::Scheme::bpsk, w.energy(), true);
    auto rx = transmit::transmit_discrete(s, w, nm, 17, 64);

    classic::DFEConfig dcfg;
    dcfg.ff_taps = 12;
    dcfg.fb_taps = w.length() - 1;
    dcfg.rls_len = 2000;
    const auto dfe = classic::dfe_detect(rx, dcfg);

    classic::TrellisConfig tcfg{w, mod::Scheme::bpsk};
    const auto vit = classic::viterbi_detect(rx, tcfg);

    std::size_t dfe_err = 0, vit_err = 0, bits = 0;
    const std::size_t lo = rx.pilot_len + dfe.train_prefix;
    for (std::size_t k = lo; k < rx.total_len(); ++k) {
        const bool truth = rx.labels.rails[0][k] > 0;
        dfe_err += (dfe.decisions.rails[0][k] > 0) != truth;
        vit_err += (vit.rails[0][k] > 0) != truth;
        ++bits;
    }
    INFO("dfe errors ", dfe_err, " viterbi errors ", vit_err, " of ", bits);
    CHECK(dfe_err > vit_err);
}

TEST_CASE("med: single tap gives the antipodal distance with witness") {
    const auto ch = make_channel({1.0});
    const auto bound = classic::med_search(ch, 10);
    CHECK(bound.dmin2_normalized == doctest::Approx(4.0).epsilon(1e-12));
    REQUIRE(bound.witness_event.size() == 1);
    CHECK(bound.witness_event[0] == 2);
    CHECK(bound.evaluate(ch) == doctest::Approx(bound.dmin2_normalized).epsilon(1e-12));
}

TEST_CASE("med: exhaustive oracle on a two-tap channel") {
    const auto ch = make_channel({0.9487, 0.3162});
    const auto bound = classic::med_search(ch, 10);

    // exhaustive search over all events of length <= 10 (3^10 with e[0]=+2)
    double best = std::numeric_limits<double>::infinity();
    const std::size_t len = 10;
    std::vector<int> e(len, 0);
    for (std::size_t code = 0; code < 19683 /* 3^9 */; ++code) {
        e[0] = 2;
        std::size_t c = code;
        for (std::size_t i = 1; i < len; ++i) {
            e[i] = (static_cast<int>(c % 3) - 1) * 2;
            c /= 3;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < len + ch.taps.size() - 1; ++j) {
            double v = 0.0;
            for (std::size_t i = 0; i < ch.taps.size(); ++i) {
                if (j >= i && j - i < len) v += ch.taps[i] * e[j - i];
            }
            acc += v * v;
        }
        best = std::min(best, acc);
    }
    CHECK(bound.dmin2_normalized == doctest::Approx(best / ch.energy()).epsilon(1e-12));
    CHECK(bound.evaluate(ch) == doctest::Approx(bound.dmin2_normalized).epsilon(1e-9));
}

TEST_CASE("med invariances and bound values") {
    pulse::PulseConfig pcfg;
    pcfg.tau = 0.5;
    pcfg.beta = 0.3;
    const auto w = channel::working_channel(pcfg, 16);
    const auto bound = classic::med_search(w, 12);
    CHECK(bound.dmin2_normalized > 0.0);
    CHECK(bound.dmin2_normalized <= 4.0 + 1e-12);

    auto flipped = w;
    for (double& v : flipped.taps) v = -v;
    CHECK(classic::med_search(flipped, 12).dmin2_normalized ==
          doctest::Approx(bound.dmin2_normalized).epsilon(1e-12));

    auto padded = w;
    padded.taps.push_back(0.0);
    padded.taps.push_back(0.0);
    CHECK(classic::med_search(padded, 12).dmin2_normalized ==
          doctest::Approx(bound.dmin2_normalized).epsilon(1e-12));

    classic::MEDBound free_bound;
    free_bound.dmin2_normalized = 4.0;
    CHECK(classic::med_ber_lower_bound(free_bound, 0.0) ==
          doctest::Approx(q_function(std::sqrt(2.0))).epsilon(1e-12));
    CHECK(classic::med_ber_lower_bound(free_bound, 0.0) == doctest::Approx(0.0786).epsilon(1e-2));
    CHECK(classic::med_ber_lower_bound(free_bound, 200.0) == doctest::Approx(0.0));

    // monotone in ebn0 and in dmin2
    double prev = 1.0;
    for (double db = 0.0; db <= 12.0; db += 1.0) {
        const double v = classic::med_ber_lower_bound(bound, db);
        CHECK(v <= prev);
        prev = v;
    }
    classic::MEDBound smaller;
    smaller.dmin2_normalized = bound.dmin2_normalized / 2.0;
    CHECK(classic::med_ber_lower_bound(smaller, 8.0) >=
          classic::med_ber_lower_bound(bound, 8.0));
}
