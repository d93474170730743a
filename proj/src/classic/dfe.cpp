#include "ftn/classic/dfe.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ftn/errors.hpp"

namespace ftn::classic {

void DFEConfig::validate() const {
    if (ff_taps < 1 || fb_taps < 1) throw ContractError("dfe: tap counts must be >= 1");
    if (!(rls_lambda >= 0.9 && rls_lambda <= 1.0)) {
        throw ContractError("dfe: rls_lambda must lie in [0.9, 1]");
    }
    if (!(lms_mu > 0.0)) throw ContractError("dfe: lms_mu must be positive");
}

DFEResult dfe_detect(const transmit::ReceivedSequence& rx, const DFEConfig& cfg) {
    cfg.validate();
    const std::size_t n = rx.total_len();
    const std::size_t taps = cfg.ff_taps + cfg.fb_taps;
    if (rx.pilot_len < taps) {
        throw ContractError("dfe: pilot prefix shorter than ff_taps + fb_taps");
    }

    DFEResult res;
    res.decisions.scheme = rx.labels.scheme;
    res.decisions.rails.resize(rx.rail_count());
    res.train_prefix = std::min(cfg.rls_len, rx.data_len());

    const auto scheme = rx.labels.scheme;
    const std::size_t data_lo = rx.pilot_len;
    const std::size_t data_hi = n - rx.tail_pilot_len;
    const std::size_t train_hi = data_lo + res.train_prefix;

    for (std::size_t rail = 0; rail < rx.rail_count(); ++rail) {
        const auto& y = rx.observations[rail];
        const auto& truth = rx.labels.rails[rail];
        auto& dec = res.decisions.rails[rail];
        dec.assign(n, modulation::pilot_level(scheme));

        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(taps));
        Eigen::MatrixXd p = 100.0 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(taps),
                                                              static_cast<Eigen::Index>(taps));
        Eigen::VectorXd u(static_cast<Eigen::Index>(taps));

        for (std::size_t k = 0; k < data_hi; ++k) {
            // regressor: future-side received samples plus negated past decisions
            for (std::size_t i = 0; i < cfg.ff_taps; ++i) {
                const std::size_t idx = k + i;
                u(static_cast<Eigen::Index>(i)) = idx < n ? y[idx] : 0.0;
            }
            for (std::size_t j = 1; j <= cfg.fb_taps; ++j) {
                u(static_cast<Eigen::Index>(cfg.ff_taps + j - 1)) =
                    (k >= j) ? -dec[k - j] : -modulation::pilot_level(scheme);
            }

            const double z = w.dot(u);
            const bool training = k < train_hi;  // pilots + RLS block are known
            const double desired = training ? truth[k]
                                            : modulation::level_for_class(
                                                  scheme, modulation::slice_class(scheme, z));
            dec[k] = training ? truth[k]
                              : modulation::level_for_class(scheme,
                                                            modulation::slice_class(scheme, z));
            const double err = desired - z;

            if (training) {
                // RLS with forgetting factor
                const Eigen::VectorXd pu = p * u;
                const double denom = cfg.rls_lambda + u.dot(pu);
                const Eigen::VectorXd gain = pu / denom;
                w += gain * err;
                p = (p - gain * pu.transpose()) / cfg.rls_lambda;
            } else {
                w += cfg.lms_mu * err * u;
            }
        }
        for (std::size_t k = data_hi; k < n; ++k) dec[k] = truth[k];

        if (rail == 0) {
            res.ff_weights.assign(w.data(), w.data() + cfg.ff_taps);
            res.fb_weights.assign(w.data() + cfg.ff_taps, w.data() + taps);
        }
    }
    return res;
}

}  // namespace ftn::classic
