#include "ftn/nn/attention.hpp"

#include <cmath>

#include "ftn/errors.hpp"

namespace ftn::nn {

void AttentionBlock::init(Eigen::Index d, Eigen::Index n_heads, Eigen::Index ffn, double drop,
                          Rng& rng) {
    if (d % n_heads != 0) {
        throw ContractError("attention: model width " + std::to_string(d) +
                            " not divisible by head count " + std::to_string(n_heads));
    }
    d_model = d;
    heads = n_heads;
    ffn_dim = ffn;
    head_dim = d / n_heads;
    dropout = drop;
    wq.init(d, d, Activation::linear, rng);
    wk.init(d, d, Activation::linear, rng);
    wv.init(d, d, Activation::linear, rng);
    wo.init(d, d, Activation::linear, rng);
    ff1.init(ffn, d, Activation::relu, rng);
    ff2.init(d, ffn, Activation::linear, rng);
}

const Mat& AttentionBlock::forward(const Mat& x, Eigen::Index len, bool training, Rng& rng) {
    if (x.rows() != d_model || x.cols() % len != 0) {
        throw ContractError("attention: bad input shape");
    }
    len_ = len;
    batch_ = x.cols() / len;
    x_ = x;

    const Mat& q = wq.forward(x);
    const Mat& k = wk.forward(x);
    const Mat& v = wv.forward(x);

    ctx_.resize(d_model, x.cols());
    attn_.assign(static_cast<std::size_t>(batch_ * heads), Mat());
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

    for (Eigen::Index b = 0; b < batch_; ++b) {
        for (Eigen::Index h = 0; h < heads; ++h) {
            const auto qb = q.block(h * head_dim, b * len_, head_dim, len_);
            const auto kb = k.block(h * head_dim, b * len_, head_dim, len_);
            const auto vb = v.block(h * head_dim, b * len_, head_dim, len_);
            Mat scores = (qb.transpose() * kb) * scale;  // (query, key)
            // row-wise softmax
            for (Eigen::Index i = 0; i < len_; ++i) {
                const double hi = scores.row(i).maxCoeff();
                scores.row(i) = (scores.row(i).array() - hi).exp();
                scores.row(i) /= scores.row(i).sum();
            }
            attn_[static_cast<std::size_t>(b * heads + h)] = scores;
            ctx_.block(h * head_dim, b * len_, head_dim, len_).noalias() =
                vb * scores.transpose();
        }
    }

    const Mat& mha = wo.forward(ctx_);

    dropped_ = training && dropout > 0.0;
    if (dropped_) {
        const double keep = 1.0 - dropout;
        mask1_.resize(mha.rows(), mha.cols());
        for (Eigen::Index c = 0; c < mask1_.cols(); ++c) {
            for (Eigen::Index r = 0; r < mask1_.rows(); ++r) {
                mask1_(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
        y1_ = x + mha.cwiseProduct(mask1_);
    } else {
        y1_ = x + mha;
    }

    const Mat& ffn = ff2.forward(ff1.forward(y1_));
    if (dropped_) {
        const double keep = 1.0 - dropout;
        mask2_.resize(ffn.rows(), ffn.cols());
        for (Eigen::Index c = 0; c < mask2_.cols(); ++c) {
            for (Eigen::Index r = 0; r < mask2_.rows(); ++r) {
                mask2_(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
        out_ = y1_ + ffn.cwiseProduct(mask2_);
    } else {
        out_ = y1_ + ffn;
    }
    return out_;
}

Mat AttentionBlock::backward(const Mat& dout) {
    Mat dffn = dropped_ ? dout.cwiseProduct(mask2_) : dout;
    Mat dy1 = dout + ff1.backward(ff2.backward(dffn));

    Mat dmha = dropped_ ? dy1.cwiseProduct(mask1_) : dy1;
    Mat dctx = wo.backward(dmha);
    Mat dx = dy1;  // residual path

    Mat dq(d_model, x_.cols()), dk(d_model, x_.cols()), dv(d_model, x_.cols());
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    const Mat& q = wq.y_cache;
    const Mat& k = wk.y_cache;
    const Mat& v = wv.y_cache;

    for (Eigen::Index b = 0; b < batch_; ++b) {
        for (Eigen::Index h = 0; h < heads; ++h) {
            const Mat& a = attn_[static_cast<std::size_t>(b * heads + h)];
            const auto qb = q.block(h * head_dim, b * len_, head_dim, len_);
            const auto kb = k.block(h * head_dim, b * len_, head_dim, len_);
            const auto vb = v.block(h * head_dim, b * len_, head_dim, len_);
            const auto dctxb = dctx.block(h * head_dim, b * len_, head_dim, len_);

            dv.block(h * head_dim, b * len_, head_dim, len_).noalias() = dctxb * a;
            Mat da = dctxb.transpose() * vb;  // (query, key)... transposed care below
            // ctx = vb * a^T => d a = dctxb^T * vb gives (query, head->key)?
            // ctx(:, i) = vb * a.row(i)^T, so da.row(i) = dctx(:, i)^T * vb.
            // da as computed: da(i, j) = dctx(:, i) . vb(:, j)  -- correct.
            Mat ds(len_, len_);
            for (Eigen::Index i = 0; i < len_; ++i) {
                const double dot = da.row(i).dot(a.row(i));
                ds.row(i) = (da.row(i).array() - dot) * a.row(i).array();
            }
            ds *= scale;
            dq.block(h * head_dim, b * len_, head_dim, len_).noalias() = kb * ds.transpose();
            dk.block(h * head_dim, b * len_, head_dim, len_).noalias() = qb * ds;
        }
    }

    dx += wq.backward_pre(dq);
    dx += wk.backward_pre(dk);
    dx += wv.backward_pre(dv);
    return dx;
}

void AttentionBlock::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    wq.collect(prefix + ".wq", out);
    wk.collect(prefix + ".wk", out);
    wv.collect(prefix + ".wv", out);
    wo.collect(prefix + ".wo", out);
    ff1.collect(prefix + ".ff1", out);
    ff2.collect(prefix + ".ff2", out);
}

}  // namespace ftn::nn
