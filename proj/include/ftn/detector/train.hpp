#ifndef FTN_DETECTOR_TRAIN_HPP
#define FTN_DETECTOR_TRAIN_HPP

#include <string>

#include "ftn/detector/window.hpp"
#include "ftn/nn/checkpoint.hpp"

namespace ftn::detector {

// Supervised training setup. Early stopping follows the per-family epoch
// budgets (20 unidirectional, 30 bidirectional, 400 transformer) or a
// val-loss plateau (no improvement above min_delta for patience epochs),
// whichever comes first.
struct TrainConfig {
    int max_epochs = 20;
    int early_stop_epoch = 20;
    double early_stop_min_delta = 1e-4;
    int early_stop_patience = 5;
    double validation_fraction = 0.1;
    int batch_size = 512;
    double learning_rate = 0.001;
    double snr_lo_db = 6.0;   // provenance of the training mixture
    double snr_hi_db = 12.0;
    std::uint64_t seed = 1;
    std::string log_csv;      // optional per-epoch loss log

    void validate() const;
    static TrainConfig for_family(nn::Family f);
};

nn::TrainedModel train_detector(const nn::ModelSpec& spec, const WindowDataset& data,
                                const TrainConfig& tcfg);

}  // namespace ftn::detector

#endif
