#include "ftn/detector/train.hpp"

#include <chrono>
#include <fstream>

#include "ftn/errors.hpp"

namespace ftn::detector {

void TrainConfig::validate() const {
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (early_stop_epoch > max_epochs) {
        throw ConfigError("train: early_stop_epoch must not exceed max_epochs");
    }
    if (!(validation_fraction > 0.0 && validation_fraction < 0.5)) {
        throw ConfigError("train: validation_fraction must lie in (0, 0.5)");
    }
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(snr_hi_db >= snr_lo_db)) throw ConfigError("train: empty SNR range");
}

TrainConfig TrainConfig::for_family(nn::Family f) {
    TrainConfig t;
    if (nn::family_is_bidirectional(f)) {
        t.max_epochs = 30;
        t.early_stop_epoch = 30;
    } else if (f == nn::Family::transformer) {
        t.max_epochs = 400;
        t.early_stop_epoch = 400;
    } else {
        t.max_epochs = 20;
        t.early_stop_epoch = 20;
    }
    return t;
}

nn::TrainedModel train_detector(const nn::ModelSpec& spec, const WindowDataset& data,
                                const TrainConfig& tcfg) {
    tcfg.validate();
    spec.validate();
    if (data.size() == 0) throw ContractError("train: empty dataset");
    if (spec.input_len != data.wcfg.length()) {
        throw ContractError("train: model input_len " + std::to_string(spec.input_len) +
                            " does not match window length " +
                            std::to_string(data.wcfg.length()));
    }

    nn::TrainedModel tm;
    tm.spec = spec;
    tm.model = nn::Model(spec, tcfg.seed);

    // fixed shuffle for the train/val split, then fresh epoch shuffles
    std::vector<std::size_t> order = data.all_indices();
    Rng split_rng(tcfg.seed, 0x5EED);
    split_rng.shuffle(order);
    const std::size_t val_count =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     static_cast<double>(order.size()) * tcfg.validation_fraction));
    const std::size_t train_count = order.size() - val_count;
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<long>(train_count));
    const std::vector<std::size_t> val_idx(order.begin() + static_cast<long>(train_count),
                                           order.end());

    nn::AdamState adam;
    adam.lr = tcfg.learning_rate;

    std::ofstream log;
    if (!tcfg.log_csv.empty()) {
        log.open(tcfg.log_csv);
        if (!log) throw IoError("cannot open training log: " + tcfg.log_csv);
        log << "epoch,train_loss,val_loss,wall_seconds\n";
    }

    const auto t0 = std::chrono::steady_clock::now();
    nn::Mat x;
    std::vector<std::uint8_t> labels;
    std::vector<std::size_t> batch;

    auto eval_loss = [&](const std::vector<std::size_t>& idx) {
        double acc = 0.0;
        std::size_t done = 0;
        while (done < idx.size()) {
            const std::size_t take = std::min<std::size_t>(4096, idx.size() - done);
            batch.assign(idx.begin() + static_cast<long>(done),
                         idx.begin() + static_cast<long>(done + take));
            data.materialize(batch, x, labels);
            tm.model.forward(x, false, nullptr);
            acc += tm.model.loss(labels) * static_cast<double>(take);
            done += take;
        }
        return acc / static_cast<double>(idx.size());
    };

    double best_val = std::numeric_limits<double>::infinity();
    int stall = 0;
    double train_loss = 0.0, val_loss = 0.0;
    int epochs_run = 0;

    for (int epoch = 0; epoch < tcfg.max_epochs; ++epoch) {
        Rng epoch_rng(tcfg.seed, 0xE70C + static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(train_idx);
        Rng dropout_rng(tcfg.seed, 0xD507 + static_cast<std::uint64_t>(epoch));

        double loss_acc = 0.0;
        std::size_t seen = 0;
        for (std::size_t off = 0; off < train_idx.size();
             off += static_cast<std::size_t>(tcfg.batch_size)) {
            const std::size_t take =
                std::min<std::size_t>(static_cast<std::size_t>(tcfg.batch_size),
                                      train_idx.size() - off);
            batch.assign(train_idx.begin() + static_cast<long>(off),
                         train_idx.begin() + static_cast<long>(off + take));
            data.materialize(batch, x, labels);
            tm.model.zero_grads();
            tm.model.forward(x, true, &dropout_rng);
            loss_acc += tm.model.loss(labels) * static_cast<double>(take);
            tm.model.backward(labels);
            auto params = tm.model.params();
            nn::adam_step(params, adam);
            seen += take;
        }
        train_loss = loss_acc / static_cast<double>(seen);
        val_loss = eval_loss(val_idx);
        epochs_run = epoch + 1;

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log) {
            log << epochs_run << "," << train_loss << "," << val_loss << "," << wall << "\n";
            log.flush();
        }

        if (val_loss < best_val - tcfg.early_stop_min_delta) {
            best_val = val_loss;
            stall = 0;
        } else {
            ++stall;
        }
        if (epochs_run >= tcfg.early_stop_epoch || stall >= tcfg.early_stop_patience) break;
    }

    tm.metadata = {{"family", nn::family_name(spec.family)},
                   {"epochs_run", epochs_run},
                   {"final_train_loss", train_loss},
                   {"final_val_loss", val_loss},
                   {"snr_lo_db", tcfg.snr_lo_db},
                   {"snr_hi_db", tcfg.snr_hi_db},
                   {"seed", tcfg.seed},
                   {"dataset_windows", data.size()},
                   {"param_count", tm.model.param_count()},
                   {"window_l1", data.wcfg.l1},
                   {"window_l2", data.wcfg.l2}};
    return tm;
}

}  // namespace ftn::detector
