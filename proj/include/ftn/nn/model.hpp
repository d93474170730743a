#ifndef FTN_NN_MODEL_HPP
#define FTN_NN_MODEL_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftn/nn/attention.hpp"
#include "ftn/nn/layers.hpp"

namespace ftn::nn {

enum class Family { fcnn, srnn, gru, lstm, bi_srnn, bi_gru, bi_lstm, transformer };

Family family_from_string(const std::string& name);
std::string family_name(Family f);
bool family_is_bidirectional(Family f);

// Architecture description. All families share the shallow plan: input of
// width L, two hidden layers, one output head (sigmoid for binary labels,
// softmax for 4-PAM classes). `hidden` is the layer width N; the transformer
// reads it as the model width with heads/blocks/ffn from the extra fields.
struct ModelSpec {
    Family family = Family::lstm;
    int input_len = 28;
    int hidden = 64;
    int output_classes = 2;

    // transformer only
    int heads = 4;
    int encoder_blocks = 2;
    int decoder_blocks = 2;
    int ffn_dim = 0;  // 0 -> hidden
    double dropout = 0.4;

    void validate() const;
    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);

    static ModelSpec defaults(Family f, int input_len, int output_classes = 2);
};

// A built network with its parameter storage. Forward/backward run on
// batches shaped (input_len x B); labels are per-item class ids.
class Model {
  public:
    Model() = default;
    Model(const ModelSpec& spec, std::uint64_t init_seed);

    const ModelSpec& spec() const { return spec_; }

    // class posteriors: (1 x B) sigmoid output or (classes x B) softmax
    Mat forward(const Mat& x, bool training = false, Rng* dropout_rng = nullptr);

    // mean loss (BCE or categorical CE) for the cached forward pass
    double loss(const std::vector<std::uint8_t>& labels) const;

    // fused loss gradient through the whole network; accumulates into grads
    void backward(const std::vector<std::uint8_t>& labels);

    std::vector<ParamRef> params();
    void zero_grads();
    std::size_t param_count();

    // flat parameter round trip used by the checkpoint code and grad check
    std::vector<double> flatten() ;
    void unflatten(const std::vector<double>& flat);

  private:
    ModelSpec spec_;

    // fcnn
    DenseLayer fc1_, fc2_;
    // recurrent families
    RecurrentLayer rec1_, rec2_;
    BidirectionalLayer bi1_, bi2_;
    // transformer
    DenseLayer embed_;
    std::vector<AttentionBlock> blocks_;
    // shared output head
    DenseLayer head_;

    // caches
    std::vector<Mat> seq_in_, seq_mid_, seq_out_;
    Mat probs_;
    Eigen::Index batch_ = 0;

    Mat head_input_;  // flattened input to the head
    void build(std::uint64_t seed);
};

// Standard bias-corrected Adam over a parameter list.
struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Mat> m, v;

    void ensure_shapes(const std::vector<ParamRef>& params);
};

void adam_step(std::vector<ParamRef>& params, AdamState& state);

}  // namespace ftn::nn

#endif
