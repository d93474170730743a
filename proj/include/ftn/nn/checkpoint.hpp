#ifndef FTN_NN_CHECKPOINT_HPP
#define FTN_NN_CHECKPOINT_HPP

#include <string>

#include "ftn/nn/model.hpp"

namespace ftn::nn {

// A model plus its training provenance (epochs run, losses, SNR range, seed,
// dataset size). The metadata travels with the checkpoint file.
struct TrainedModel {
    ModelSpec spec;
    Model model;
    nlohmann::json metadata;
};

// Self-describing container: JSON header (spec, parameter table, metadata,
// format version) followed by little-endian float64 parameter payload and a
// CRC32 trailer. Round trips are bit-exact.
void save_model(TrainedModel& tm, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace ftn::nn

#endif
