#include "ftn/nn/model.hpp"

#include <cmath>

#include "ftn/errors.hpp"

namespace ftn::nn {

Family family_from_string(const std::string& name) {
    if (name == "fcnn") return Family::fcnn;
    if (name == "srnn") return Family::srnn;
    if (name == "gru") return Family::gru;
    if (name == "lstm") return Family::lstm;
    if (name == "bi-srnn") return Family::bi_srnn;
    if (name == "bi-gru") return Family::bi_gru;
    if (name == "bi-lstm") return Family::bi_lstm;
    if (name == "transformer") return Family::transformer;
    throw ConfigError("unknown model family: " + name);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::fcnn: return "fcnn";
        case Family::srnn: return "srnn";
        case Family::gru: return "gru";
        case Family::lstm: return "lstm";
        case Family::bi_srnn: return "bi-srnn";
        case Family::bi_gru: return "bi-gru";
        case Family::bi_lstm: return "bi-lstm";
        case Family::transformer: return "transformer";
    }
    return "?";
}

bool family_is_bidirectional(Family f) {
    return f == Family::bi_srnn || f == Family::bi_gru || f == Family::bi_lstm;
}

namespace {
CellKind cell_for(Family f) {
    switch (f) {
        case Family::srnn:
        case Family::bi_srnn: return CellKind::srnn;
        case Family::gru:
        case Family::bi_gru: return CellKind::gru;
        default: return CellKind::lstm;
    }
}
}  // namespace

void ModelSpec::validate() const {
    if (input_len < 1) throw ConfigError("model: input_len must be >= 1");
    if (hidden < 1) throw ConfigError("model: hidden width must be >= 1");
    if (output_classes != 2 && output_classes != 4) {
        throw ConfigError("model: output_classes must be 2 or 4");
    }
    if (family == Family::transformer) {
        if (heads < 1 || hidden % heads != 0) {
            throw ConfigError("model: transformer width must be divisible by heads (4)");
        }
        if (encoder_blocks < 1 || decoder_blocks < 0) {
            throw ConfigError("model: transformer needs at least one encoder block");
        }
        if (!(dropout >= 0.0 && dropout < 1.0)) {
            throw ConfigError("model: dropout must lie in [0, 1)");
        }
    }
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j;
    j["family"] = family_name(family);
    j["input_len"] = input_len;
    j["hidden"] = hidden;
    j["output_classes"] = output_classes;
    if (family == Family::transformer) {
        j["heads"] = heads;
        j["encoder_blocks"] = encoder_blocks;
        j["decoder_blocks"] = decoder_blocks;
        j["ffn_dim"] = ffn_dim;
        j["dropout"] = dropout;
    }
    return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    ModelSpec s;
    s.family = family_from_string(j.at("family").get<std::string>());
    s.input_len = j.at("input_len").get<int>();
    s.hidden = j.at("hidden").get<int>();
    s.output_classes = j.value("output_classes", 2);
    s.heads = j.value("heads", 4);
    s.encoder_blocks = j.value("encoder_blocks", 2);
    s.decoder_blocks = j.value("decoder_blocks", 2);
    s.ffn_dim = j.value("ffn_dim", 0);
    s.dropout = j.value("dropout", 0.4);
    s.validate();
    return s;
}

ModelSpec ModelSpec::defaults(Family f, int input_len, int output_classes) {
    ModelSpec s;
    s.family = f;
    s.input_len = input_len;
    s.output_classes = output_classes;
    s.hidden = (f == Family::transformer) ? 128 : 64;
    s.ffn_dim = 0;
    return s;
}

Model::Model(const ModelSpec& spec, std::uint64_t init_seed) : spec_(spec) {
    spec_.validate();
    build(init_seed);
}

void Model::build(std::uint64_t seed) {
    Rng rng(seed, 0xF17);
    const int out = spec_.output_classes == 2 ? 1 : spec_.output_classes;
    const int n = spec_.hidden;
    switch (spec_.family) {
        case Family::fcnn:
            fc1_.init(n, spec_.input_len, Activation::relu, rng);
            fc2_.init(n, n, Activation::relu, rng);
            head_.init(out, n, Activation::linear, rng);
            break;
        case Family::srnn:
        case Family::gru:
        case Family::lstm:
            rec1_.init(cell_for(spec_.family), 1, n, true, rng);
            rec2_.init(cell_for(spec_.family), n, n, false, rng);
            head_.init(out, n, Activation::linear, rng);
            break;
        case Family::bi_srnn:
        case Family::bi_gru:
        case Family::bi_lstm:
            bi1_.init(cell_for(spec_.family), 1, n, true, rng);
            bi2_.init(cell_for(spec_.family), 2 * n, n, false, rng);
            head_.init(out, 2 * n, Activation::linear, rng);
            break;
        case Family::transformer: {
            const int ffn = spec_.ffn_dim > 0 ? spec_.ffn_dim : n;
            embed_.init(n, 1, Activation::linear, rng);
            blocks_.resize(static_cast<std::size_t>(spec_.encoder_blocks + spec_.decoder_blocks));
            for (auto& blk : blocks_) {
                blk.init(n, spec_.heads, ffn, spec_.dropout, rng);
            }
            head_.init(out, n * spec_.input_len, Activation::linear, rng);
            break;
        }
    }
}

Mat Model::forward(const Mat& x, bool training, Rng* dropout_rng) {
    if (x.rows() != spec_.input_len) {
        throw ContractError("model: window length " + std::to_string(x.rows()) +
                            " does not match spec input_len " + std::to_string(spec_.input_len));
    }
    batch_ = x.cols();
    const std::size_t len = static_cast<std::size_t>(spec_.input_len);

    Mat z;
    switch (spec_.family) {
        case Family::fcnn:
            z = head_.forward(fc2_.forward(fc1_.forward(x)));
            break;
        case Family::srnn:
        case Family::gru:
        case Family::lstm: {
            seq_in_.resize(len);
            for (std::size_t t = 0; t < len; ++t) {
                seq_in_[t] = x.row(static_cast<Eigen::Index>(t));
            }
            rec1_.forward(seq_in_, seq_mid_);
            rec2_.forward(seq_mid_, seq_out_);
            z = head_.forward(seq_out_[0]);
            break;
        }
        case Family::bi_srnn:
        case Family::bi_gru:
        case Family::bi_lstm: {
            seq_in_.resize(len);
            for (std::size_t t = 0; t < len; ++t) {
                seq_in_[t] = x.row(static_cast<Eigen::Index>(t));
            }
            bi1_.forward(seq_in_, seq_mid_);
            bi2_.forward(seq_mid_, seq_out_);
            z = head_.forward(seq_out_[0]);
            break;
        }
        case Family::transformer: {
            Rng fallback(0);
            Rng& rng = dropout_rng ? *dropout_rng : fallback;
            const Eigen::Map<const Mat> flat(x.data(), 1, x.size());
            const Mat* cur = &embed_.forward(flat);
            for (auto& blk : blocks_) {
                cur = &blk.forward(*cur, static_cast<Eigen::Index>(len), training, rng);
            }
            // flatten (d x L*B) -> (d*L x B); column-major memory makes this a view
            head_input_ = Eigen::Map<const Mat>(cur->data(),
                                                static_cast<Eigen::Index>(spec_.hidden * len),
                                                batch_);
            z = head_.forward(head_input_);
            break;
        }
    }

    if (spec_.output_classes == 2) {
        probs_ = 1.0 / (1.0 + (-z.array()).exp());
    } else {
        probs_.resize(z.rows(), z.cols());
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            const double hi = z.col(c).maxCoeff();
            probs_.col(c) = (z.col(c).array() - hi).exp();
            probs_.col(c) /= probs_.col(c).sum();
        }
    }
    return probs_;
}

double Model::loss(const std::vector<std::uint8_t>& labels) const {
    if (spec_.output_classes == 2) return bce_loss(probs_, labels);
    return categorical_ce_loss(probs_, labels);
}

void Model::backward(const std::vector<std::uint8_t>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != batch_) {
        throw ContractError("model: label count does not match the cached batch");
    }
    // fused CE/BCE + sigmoid/softmax gradient at the head pre-activation
    Mat dz;
    const double inv_b = 1.0 / static_cast<double>(batch_);
    if (spec_.output_classes == 2) {
        dz = probs_;
        for (Eigen::Index i = 0; i < batch_; ++i) {
            dz(0, i) -= labels[static_cast<std::size_t>(i)];
        }
    } else {
        dz = probs_;
        for (Eigen::Index i = 0; i < batch_; ++i) {
            dz(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]), i) -= 1.0;
        }
    }
    dz *= inv_b;

    Mat dhead = head_.backward_pre(dz);
    const std::size_t len = static_cast<std::size_t>(spec_.input_len);

    switch (spec_.family) {
        case Family::fcnn:
            fc1_.backward(fc2_.backward(dhead));
            break;
        case Family::srnn:
        case Family::gru:
        case Family::lstm: {
            std::vector<Mat> dmid, din;
            rec2_.backward({dhead}, dmid);
            rec1_.backward(dmid, din);
            break;
        }
        case Family::bi_srnn:
        case Family::bi_gru:
        case Family::bi_lstm: {
            std::vector<Mat> dmid, din;
            bi2_.backward({dhead}, dmid);
            bi1_.backward(dmid, din);
            break;
        }
        case Family::transformer: {
            // unflatten (d*L x B) -> (d x L*B)
            Mat dcur = Eigen::Map<const Mat>(dhead.data(), static_cast<Eigen::Index>(spec_.hidden),
                                             static_cast<Eigen::Index>(len) * batch_);
            for (std::size_t i = blocks_.size(); i-- > 0;) {
                dcur = blocks_[i].backward(dcur);
            }
            embed_.backward_pre(dcur);
            break;
        }
    }
}

std::vector<ParamRef> Model::params() {
    std::vector<ParamRef> out;
    switch (spec_.family) {
        case Family::fcnn:
            fc1_.collect("fc1", out);
            fc2_.collect("fc2", out);
            break;
        case Family::srnn:
        case Family::gru:
        case Family::lstm:
            rec1_.collect("rec1", out);
            rec2_.collect("rec2", out);
            break;
        case Family::bi_srnn:
        case Family::bi_gru:
        case Family::bi_lstm:
            bi1_.collect("bi1", out);
            bi2_.collect("bi2", out);
            break;
        case Family::transformer:
            embed_.collect("embed", out);
            for (std::size_t i = 0; i < blocks_.size(); ++i) {
                blocks_[i].collect("block" + std::to_string(i), out);
            }
            break;
    }
    head_.collect("head", out);
    return out;
}

void Model::zero_grads() {
    for (auto& p : params()) p.grad->setZero();
}

std::size_t Model::param_count() {
    std::size_t n = 0;
    for (auto& p : params()) n += static_cast<std::size_t>(p.value->size());
    return n;
}

std::vector<double> Model::flatten() {
    std::vector<double> flat;
    for (auto& p : params()) {
        flat.insert(flat.end(), p.value->data(), p.value->data() + p.value->size());
    }
    return flat;
}

void Model::unflatten(const std::vector<double>& flat) {
    std::size_t off = 0;
    for (auto& p : params()) {
        const std::size_t n = static_cast<std::size_t>(p.value->size());
        if (off + n > flat.size()) throw ContractError("model: flat parameter vector too short");
        std::copy(flat.begin() + static_cast<long>(off), flat.begin() + static_cast<long>(off + n),
                  p.value->data());
        off += n;
    }
    if (off != flat.size()) throw ContractError("model: flat parameter vector too long");
}

void AdamState::ensure_shapes(const std::vector<ParamRef>& params) {
    if (m.size() == params.size()) return;
    m.clear();
    v.clear();
    for (const auto& p : params) {
        m.push_back(Mat::Zero(p.value->rows(), p.value->cols()));
        v.push_back(Mat::Zero(p.value->rows(), p.value->cols()));
    }
}

void adam_step(std::vector<ParamRef>& params, AdamState& st) {
    st.ensure_shapes(params);
    st.step += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Mat& g = *params[i].grad;
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g.cwiseProduct(g);
        const Mat mhat = st.m[i] / bc1;
        const Mat vhat = st.v[i] / bc2;
        params[i].value->array() -= st.lr * mhat.array() / (vhat.array().sqrt() + st.eps);
    }
}

}  // namespace ftn::nn
