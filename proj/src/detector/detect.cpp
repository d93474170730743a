#include "ftn/detector/detect.hpp"

#include <fstream>

#include "ftn/errors.hpp"

namespace ftn::detector {

DetectionResult detect_sliding(nn::TrainedModel& tm, const transmit::ReceivedSequence& rx,
                               const WindowConfig& wcfg, std::size_t batch_size) {
    if (tm.spec.input_len != wcfg.length()) {
        throw ContractError("detect: model input_len does not match the window length");
    }
    const auto scheme = rx.labels.scheme;
    const bool binary = tm.spec.output_classes == 2;
    if (!binary && scheme != modulation::Scheme::pam4) {
        throw ContractError("detect: 4-way model on a binary-rail sequence");
    }

    auto shared = std::make_shared<const transmit::ReceivedSequence>(rx);
    WindowDataset ds = build_windows(shared, wcfg);

    DetectionResult res;
    res.decisions.scheme = scheme;
    res.decisions.rails.resize(rx.rail_count());
    res.posteriors.resize(rx.rail_count());
    res.true_labels.resize(rx.rail_count());

    nn::Mat x;
    std::vector<std::uint8_t> labels;
    std::vector<std::size_t> batch;

    const std::size_t total = ds.size();
    std::size_t done = 0;
    while (done < total) {
        const std::size_t take = std::min(batch_size, total - done);
        batch.resize(take);
        for (std::size_t i = 0; i < take; ++i) batch[i] = done + i;
        ds.materialize(batch, x, labels);
        const nn::Mat probs = tm.model.forward(x, false, nullptr);

        for (std::size_t i = 0; i < take; ++i) {
            const auto& e = ds.entry(done + i);
            auto& rail_dec = res.decisions.rails[e.rail];
            auto& rail_post = res.posteriors[e.rail];
            auto& rail_truth = res.true_labels[e.rail];
            int cls;
            double post;
            if (binary) {
                post = probs(0, static_cast<Eigen::Index>(i));
                cls = post >= 0.5 ? 1 : 0;  // tie resolves to +1
            } else {
                Eigen::Index best = 0;
                for (Eigen::Index c = 1; c < probs.rows(); ++c) {
                    if (probs(c, static_cast<Eigen::Index>(i)) >=
                        probs(best, static_cast<Eigen::Index>(i))) {
                        best = c;
                    }
                }
                cls = static_cast<int>(best);
                post = probs(best, static_cast<Eigen::Index>(i));
            }
            rail_dec.push_back(modulation::level_for_class(scheme, cls));
            rail_post.push_back(post);
            rail_truth.push_back(e.label);
            res.bit_errors += static_cast<std::size_t>(
                modulation::bit_errors_between(scheme, cls, e.label));
            res.bits_tested += static_cast<std::size_t>(modulation::bits_per_symbol(scheme)) /
                               rx.rail_count();
        }
        done += take;
    }
    return res;
}

void write_detection_csv(const DetectionResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "rail,index,posterior,decision,label,correct\n";
    for (std::size_t rail = 0; rail < res.posteriors.size(); ++rail) {
        for (std::size_t i = 0; i < res.posteriors[rail].size(); ++i) {
            const int dec_cls = modulation::slice_class(res.decisions.scheme,
                                                        res.decisions.rails[rail][i]);
            const int truth = res.true_labels[rail][i];
            out << rail << "," << i << "," << res.posteriors[rail][i] << "," << dec_cls << ","
                << truth << "," << (dec_cls == truth ? 1 : 0) << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ftn::detector
