#include "ftn/classic/trellis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ftn/errors.hpp"

namespace ftn::classic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxSurvivorBytes = 512u << 20;

struct Trellis {
    std::size_t states;
    std::size_t alphabet;
    std::size_t memory;
    std::vector<double> levels;        // class id -> symbol level
    std::vector<double> state_isi;     // precomputed sum_i>=1 h[i] * level(digit_{i-1}(state))
    double h0;

    double branch_mean(std::size_t state, std::size_t cls) const {
        return h0 * levels[cls] + state_isi[state];
    }
    std::size_t next_state(std::size_t state, std::size_t cls) const {
        return (state * alphabet + cls) % state_isi_size_;
    }
    std::size_t state_isi_size_ = 0;
};

Trellis build_trellis(const TrellisConfig& cfg) {
    cfg.validate();
    Trellis t;
    t.alphabet = cfg.alphabet();
    t.memory = cfg.memory();
    t.states = cfg.state_count();
    t.state_isi_size_ = t.states;
    t.h0 = cfg.channel.taps[0];
    t.levels.resize(t.alphabet);
    for (std::size_t c = 0; c < t.alphabet; ++c) {
        t.levels[c] = modulation::level_for_class(cfg.scheme, static_cast<int>(c));
    }
    t.state_isi.assign(t.states, 0.0);
    for (std::size_t s = 0; s < t.states; ++s) {
        std::size_t digits = s;
        double acc = 0.0;
        for (std::size_t i = 1; i <= t.memory; ++i) {
            const std::size_t cls = digits % t.alphabet;
            digits /= t.alphabet;
            acc += cfg.channel.taps[i] * t.levels[cls];
        }
        t.state_isi[s] = acc;
    }
    return t;
}

// State whose entire history is the pilot class.
std::size_t pilot_state(const Trellis& t, int pilot_cls) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < t.memory; ++i) {
        s = s * t.alphabet + static_cast<std::size_t>(pilot_cls);
    }
    return s;
}

}  // namespace

std::size_t TrellisConfig::state_count() const {
    std::size_t s = 1;
    for (std::size_t i = 0; i < memory(); ++i) s *= alphabet();
    return s;
}

void TrellisConfig::validate() const {
    if (channel.taps.empty()) throw ContractError("trellis: empty channel");
    if (scheme == modulation::Scheme::pam4) {
        if (memory() > 8) throw SizeError("trellis: 4-PAM memory capped at 8");
    } else if (memory() > 16) {
        throw SizeError("trellis: memory capped at 16");
    }
}

modulation::SymbolSequence viterbi_detect(const transmit::ReceivedSequence& rx,
                                          const TrellisConfig& cfg) {
    const Trellis t = build_trellis(cfg);
    const std::size_t n = rx.total_len();

    if (t.memory == 0) {
        // memoryless MLSE = per-symbol slicing
        modulation::SymbolSequence out;
        out.scheme = rx.labels.scheme;
        out.rails.resize(rx.rail_count());
        for (std::size_t rail = 0; rail < rx.rail_count(); ++rail) {
            const auto& y = rx.observations[rail];
            auto& dec = out.rails[rail];
            dec.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                std::size_t best = 0;
                double best_d = std::abs(y[k] - t.h0 * t.levels[0]);
                for (std::size_t c = 1; c < t.alphabet; ++c) {
                    const double d = std::abs(y[k] - t.h0 * t.levels[c]);
                    if (d < best_d) {
                        best_d = d;
                        best = c;
                    }
                }
                dec[k] = t.levels[best];
            }
        }
        return out;
    }

    if (n * t.states > kMaxSurvivorBytes) {
        std::ostringstream msg;
        msg << "viterbi: survivor storage " << n * t.states << " bytes exceeds the cap; "
            << "reduce memory or block length";
        throw SizeError(msg.str());
    }
    const int pilot_cls = modulation::pilot_class(cfg.scheme);

    modulation::SymbolSequence out;
    out.scheme = rx.labels.scheme;
    out.rails.resize(rx.rail_count());

    std::vector<double> metric(t.states), next(t.states);
    std::vector<std::uint8_t> dropped(n * t.states);

    for (std::size_t rail = 0; rail < rx.rail_count(); ++rail) {
        const auto& y = rx.observations[rail];
        const auto labels = modulation::rail_labels(rx.labels, rail);

        metric.assign(t.states, kNegInf);
        if (rx.pilot_len >= t.memory) {
            metric[pilot_state(t, pilot_cls)] = 0.0;
        } else {
            metric.assign(t.states, 0.0);
        }
        // metrics kept as negative squared error so that bigger is better
        for (std::size_t k = 0; k < n; ++k) {
            next.assign(t.states, kNegInf);
            std::uint8_t* drop_k = dropped.data() + k * t.states;
            const bool pilot_pos = k < rx.pilot_len || k >= n - rx.tail_pilot_len;
            const std::size_t c_lo = pilot_pos ? static_cast<std::size_t>(labels[k]) : 0;
            const std::size_t c_hi = pilot_pos ? c_lo + 1 : t.alphabet;
            for (std::size_t s = 0; s < t.states; ++s) {
                if (metric[s] == kNegInf) continue;
                const std::size_t top = t.memory == 0
                                            ? 0
                                            : s / (t.states / t.alphabet);
                for (std::size_t c = c_lo; c < c_hi; ++c) {
                    const double d = y[k] - t.branch_mean(s, c);
                    const double m = metric[s] - d * d;
                    const std::size_t ns = t.next_state(s, c);
                    if (m > next[ns]) {
                        next[ns] = m;
                        drop_k[ns] = static_cast<std::uint8_t>(top);
                    }
                }
            }
            metric.swap(next);
        }

        std::size_t best = 0;
        for (std::size_t s = 1; s < t.states; ++s) {
            if (metric[s] > metric[best]) best = s;
        }

        auto& decided = out.rails[rail];
        decided.assign(n, 0.0);
        std::size_t s = best;
        for (std::size_t k = n; k-- > 0;) {
            const std::size_t cls = s % t.alphabet;
            decided[k] = t.levels[cls];
            const std::size_t top = dropped[k * t.states + s];
            s = (s + top * t.states) / t.alphabet;
        }
    }
    return out;
}

Eigen::MatrixXd bcjr_posteriors_rail(const transmit::ReceivedSequence& rx,
                                     const TrellisConfig& cfg, double sigma, std::size_t rail) {
    if (!(sigma > 0.0)) {
        throw ContractError("bcjr: sigma must be positive (degenerate likelihoods otherwise)");
    }
    const Trellis t = build_trellis(cfg);
    const std::size_t n = rx.total_len();
    const int pilot_cls = modulation::pilot_class(cfg.scheme);
    const auto& y = rx.observations.at(rail);
    const auto labels = modulation::rail_labels(rx.labels, rail);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

    auto allowed = [&](std::size_t k, std::size_t c) {
        const bool pilot_pos = k < rx.pilot_len || k >= n - rx.tail_pilot_len;
        return !pilot_pos || c == static_cast<std::size_t>(labels[k]);
    };

    // forward; without a pilot history the initial state is uniform
    Eigen::MatrixXd alpha(static_cast<Eigen::Index>(t.states), static_cast<Eigen::Index>(n + 1));
    alpha.setConstant(kNegInf);
    if (rx.pilot_len >= t.memory) {
        alpha(static_cast<Eigen::Index>(pilot_state(t, pilot_cls)), 0) = 0.0;
    } else {
        alpha.col(0).setZero();
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t s = 0; s < t.states; ++s) {
            const double a = alpha(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
            if (a == kNegInf) continue;
            for (std::size_t c = 0; c < t.alphabet; ++c) {
                if (!allowed(k, c)) continue;
                const double d = y[k] - t.branch_mean(s, c);
                const double g = a - d * d * inv2s2;
                const std::size_t ns = t.next_state(s, c);
                double& dst = alpha(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(k + 1));
                if (dst == kNegInf) {
                    dst = g;
                } else {
                    const double hi = std::max(dst, g);
                    dst = hi + std::log1p(std::exp(std::min(dst, g) - hi));
                }
            }
        }
    }

    // backward, fused with the posterior accumulation
    Eigen::MatrixXd post(static_cast<Eigen::Index>(t.alphabet), static_cast<Eigen::Index>(n));
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.states));
    Eigen::VectorXd beta_prev(static_cast<Eigen::Index>(t.states));
    for (std::size_t k = n; k-- > 0;) {
        std::vector<double> cls_acc(t.alphabet, kNegInf);
        beta_prev.setConstant(kNegInf);
        for (std::size_t s = 0; s < t.states; ++s) {
            const double a = alpha(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
            for (std::size_t c = 0; c < t.alphabet; ++c) {
                if (!allowed(k, c)) continue;
                const double d = y[k] - t.branch_mean(s, c);
                const double g = -d * d * inv2s2;
                const std::size_t ns = t.next_state(s, c);
                const double b = beta(static_cast<Eigen::Index>(ns));
                // beta recursion
                if (b > kNegInf) {
                    const double val = g + b;
                    double& dst = beta_prev(static_cast<Eigen::Index>(s));
                    if (dst == kNegInf) {
                        dst = val;
                    } else {
                        const double hi = std::max(dst, val);
                        dst = hi + std::log1p(std::exp(std::min(dst, val) - hi));
                    }
                    // posterior term alpha * gamma * beta
                    if (a > kNegInf) {
                        const double term = a + val;
                        double& acc = cls_acc[c];
                        if (acc == kNegInf) {
                            acc = term;
                        } else {
                            const double hi2 = std::max(acc, term);
                            acc = hi2 + std::log1p(std::exp(std::min(acc, term) - hi2));
                        }
                    }
                }
            }
        }
        beta = beta_prev;
        double hi = kNegInf;
        for (double v : cls_acc) hi = std::max(hi, v);
        double total = 0.0;
        for (std::size_t c = 0; c < t.alphabet; ++c) {
            const double p = (cls_acc[c] == kNegInf) ? 0.0 : std::exp(cls_acc[c] - hi);
            post(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = p;
            total += p;
        }
        post.col(static_cast<Eigen::Index>(k)) /= total;
    }
    return post;
}

modulation::SymbolSequence map_detect(const transmit::ReceivedSequence& rx,
                                      const TrellisConfig& cfg, double sigma) {
    modulation::SymbolSequence out;
    out.scheme = rx.labels.scheme;
    out.rails.resize(rx.rail_count());
    for (std::size_t rail = 0; rail < rx.rail_count(); ++rail) {
        const Eigen::MatrixXd post = bcjr_posteriors_rail(rx, cfg, sigma, rail);
        auto& decided = out.rails[rail];
        decided.resize(rx.total_len());
        for (std::size_t k = 0; k < rx.total_len(); ++k) {
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < post.rows(); ++c) {
                if (post(c, static_cast<Eigen::Index>(k)) >=
                    post(best, static_cast<Eigen::Index>(k))) {
                    best = c;
                }
            }
            decided[k] = modulation::level_for_class(out.scheme, static_cast<int>(best));
        }
    }
    return out;
}

}  // namespace ftn::classic
