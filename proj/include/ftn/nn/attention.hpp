#ifndef FTN_NN_ATTENTION_HPP
#define FTN_NN_ATTENTION_HPP

#include <vector>

#include "ftn/nn/layers.hpp"

namespace ftn::nn {

// One transformer block: multi-head scaled-dot-product self-attention with a
// residual add, then a per-position feed-forward with a second residual.
// Dropout (inverted) acts on both sublayer outputs in training mode only.
// Sequences are carried as (d_model x L*B) matrices, batch-major blocks of L
// columns.
struct AttentionBlock {
    Eigen::Index d_model = 0, heads = 4, ffn_dim = 0, head_dim = 0;
    double dropout = 0.0;

    DenseLayer wq, wk, wv, wo;  // linear d -> d
    DenseLayer ff1, ff2;        // d -> ffn (relu) -> d

    // caches
    Mat x_, ctx_, y1_, out_;
    std::vector<Mat> attn_;  // softmax weights per (batch, head), L x L
    Mat mask1_, mask2_;
    Eigen::Index len_ = 0, batch_ = 0;
    bool dropped_ = false;

    void init(Eigen::Index d, Eigen::Index n_heads, Eigen::Index ffn, double drop, Rng& rng);
    const Mat& forward(const Mat& x, Eigen::Index len, bool training, Rng& rng);
    Mat backward(const Mat& dout);
    void collect(const std::string& prefix, std::vector<ParamRef>& out);

    // exposed for tests: attention weight rows sum to one
    const std::vector<Mat>& attention_weights() const { return attn_; }
};

}  // namespace ftn::nn

#endif
