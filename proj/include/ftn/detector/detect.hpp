#ifndef FTN_DETECTOR_DETECT_HPP
#define FTN_DETECTOR_DETECT_HPP

#include <string>

#include "ftn/detector/window.hpp"
#include "ftn/nn/checkpoint.hpp"

namespace ftn::detector {

// Sliding symbol-by-symbol detection: for each data symbol k the model sees
// observations [k-l1, k+l2] and emits a posterior; hard decisions threshold
// at 1/2 (ties to +1) or take the class argmax for 4-PAM.
struct DetectionResult {
    modulation::SymbolSequence decisions;               // data region, per rail
    std::vector<std::vector<double>> posteriors;        // p(bit=1) / winning-class prob
    std::vector<std::vector<std::uint8_t>> true_labels; // data region labels
    std::size_t bit_errors = 0;
    std::size_t bits_tested = 0;
};

DetectionResult detect_sliding(nn::TrainedModel& tm, const transmit::ReceivedSequence& rx,
                               const WindowConfig& wcfg, std::size_t batch_size = 4096);

// CSV: index, posterior, decision, label, correct (per rail blocks)
void write_detection_csv(const DetectionResult& res, const std::string& path);

}  // namespace ftn::detector

#endif
