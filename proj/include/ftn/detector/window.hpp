#ifndef FTN_DETECTOR_WINDOW_HPP
#define FTN_DETECTOR_WINDOW_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "ftn/nn/core.hpp"
#include "ftn/transmit.hpp"

namespace ftn::detector {

// Window geometry: l1 past samples, the current sample, l2 future samples.
// The effective channel is causal after the minimum-phase conversion, so the
// default split keeps most of the context on the future side.
struct WindowConfig {
    int l1 = 5;
    int l2 = 22;

    int length() const { return l1 + l2 + 1; }
    void validate() const;
    static WindowConfig for_length(int total, int past = 5);
};

// Stride-1 window inventory over one or more received sequences. Windows are
// stored as (source, rail, center) references and materialised on demand;
// window i of a rail reads observations [center-l1, center+l2], zero-padded
// past the end of the stream (flagged as an edge window).
class WindowDataset {
  public:
    WindowConfig wcfg;

    struct Entry {
        std::uint32_t source;
        std::uint16_t rail;
        std::uint8_t label;
        std::uint8_t edge;
        std::uint64_t center;
    };

    std::size_t size() const { return entries_.size(); }
    const Entry& entry(std::size_t i) const { return entries_[i]; }
    const transmit::ReceivedSequence& source(std::size_t idx) const { return *sources_[idx]; }
    std::size_t source_count() const { return sources_.size(); }

    void fill_window(std::size_t i, double* dst) const;
    // materialise a batch: X is (L x idx.size()), labels per column
    void materialize(const std::vector<std::size_t>& idx, nn::Mat& x,
                     std::vector<std::uint8_t>& labels) const;

    void append(std::shared_ptr<const transmit::ReceivedSequence> rx);
    // restrict window centers to [lo, hi) within the data region (for frames)
    void append_range(std::shared_ptr<const transmit::ReceivedSequence> rx, std::size_t lo,
                      std::size_t hi);

    std::vector<std::size_t> all_indices() const;

  private:
    std::vector<std::shared_ptr<const transmit::ReceivedSequence>> sources_;
    std::vector<Entry> entries_;
};

// One window per detectable data symbol, stride 1.
WindowDataset build_windows(std::shared_ptr<const transmit::ReceivedSequence> rx,
                            const WindowConfig& wcfg);

}  // namespace ftn::detector

#endif
