#include "ftn/detector/window.hpp"

#include "ftn/errors.hpp"

namespace ftn::detector {

void WindowConfig::validate() const {
    if (l1 < 0 || l2 < 0) throw ConfigError("window: l1 and l2 must be non-negative");
    if (length() < 1) throw ConfigError("window: empty window");
}

WindowConfig WindowConfig::for_length(int total, int past) {
    if (total < 1) throw ConfigError("window: total length must be >= 1");
    WindowConfig w;
    w.l1 = std::min(past, total - 1);
    w.l2 = total - w.l1 - 1;
    return w;
}

void WindowDataset::fill_window(std::size_t i, double* dst) const {
    const Entry& e = entries_[i];
    const auto& obs = sources_[e.source]->observations[e.rail];
    const long lo = static_cast<long>(e.center) - wcfg.l1;
    const long n = static_cast<long>(obs.size());
    const int len = wcfg.length();
    for (int t = 0; t < len; ++t) {
        const long idx = lo + t;
        dst[t] = (idx >= 0 && idx < n) ? obs[static_cast<std::size_t>(idx)] : 0.0;
    }
}

void WindowDataset::materialize(const std::vector<std::size_t>& idx, nn::Mat& x,
                                std::vector<std::uint8_t>& labels) const {
    const int len = wcfg.length();
    x.resize(len, static_cast<Eigen::Index>(idx.size()));
    labels.resize(idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
        fill_window(idx[c], x.col(static_cast<Eigen::Index>(c)).data());
        labels[c] = entries_[idx[c]].label;
    }
}

void WindowDataset::append(std::shared_ptr<const transmit::ReceivedSequence> rx) {
    append_range(std::move(rx), 0, static_cast<std::size_t>(-1));
}

void WindowDataset::append_range(std::shared_ptr<const transmit::ReceivedSequence> rx,
                                 std::size_t lo, std::size_t hi) {
    wcfg.validate();
    const auto& seq = *rx;
    if (seq.total_len() < static_cast<std::size_t>(wcfg.length())) {
        throw ContractError("windows: sequence shorter than the window length");
    }
    if (seq.pilot_len < static_cast<std::size_t>(wcfg.l1)) {
        throw ContractError("windows: pilot prefix does not cover l1 past samples");
    }
    const std::size_t data_lo = seq.pilot_len;
    const std::size_t data_hi = seq.total_len() - seq.tail_pilot_len;
    const std::size_t from = data_lo + lo;
    const std::size_t to = (hi == static_cast<std::size_t>(-1))
                               ? data_hi
                               : std::min(data_hi, data_lo + hi);
    const std::uint32_t source_id = static_cast<std::uint32_t>(sources_.size());
    sources_.push_back(rx);

    for (std::size_t rail = 0; rail < seq.rail_count(); ++rail) {
        const auto labels = modulation::rail_labels(seq.labels, rail);
        const std::size_t obs_len = seq.observations[rail].size();
        for (std::size_t k = from; k < to; ++k) {
            Entry e;
            e.source = source_id;
            e.rail = static_cast<std::uint16_t>(rail);
            e.center = k;
            e.label = labels[k];
            e.edge = (k + static_cast<std::size_t>(wcfg.l2) >= obs_len) ? 1 : 0;
            entries_.push_back(e);
        }
    }
}

std::vector<std::size_t> WindowDataset::all_indices() const {
    std::vector<std::size_t> idx(entries_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

WindowDataset build_windows(std::shared_ptr<const transmit::ReceivedSequence> rx,
                            const WindowConfig& wcfg) {
    WindowDataset ds;
    ds.wcfg = wcfg;
    ds.append(std::move(rx));
    return ds;
}

}  // namespace ftn::detector
