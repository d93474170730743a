#ifndef FTN_NN_LAYERS_HPP
#define FTN_NN_LAYERS_HPP

#include <vector>

#include "ftn/nn/core.hpp"

namespace ftn::nn {

struct DenseLayer {
    Mat w, b;        // (out x in), (out x 1)
    Mat dw, db;
    Activation act = Activation::linear;

    Mat x_cache, y_cache;  // y after activation

    void init(Eigen::Index out, Eigen::Index in, Activation a, Rng& rng);
    const Mat& forward(const Mat& x);
    // dy is the gradient w.r.t. the activated output
    Mat backward(const Mat& dy);
    // dz is the gradient w.r.t. the pre-activation (fused loss heads)
    Mat backward_pre(const Mat& dz);
    void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

enum class CellKind { srnn, gru, lstm };

int gate_count(CellKind kind);

// One recurrent layer unrolled over the window; standard cell equations
// (tanh SRNN, sigmoid gates with tanh candidates for GRU/LSTM). The first
// stacked layer returns the full state sequence, the second only the final
// state.
struct RecurrentLayer {
    CellKind kind = CellKind::lstm;
    Eigen::Index in = 0, hidden = 0;
    bool return_sequences = false;

    Mat wx, wh, b;   // (G*N x in), (G*N x N), (G*N x 1)
    Mat dwx, dwh, db;

    // caches
    std::vector<Mat> xs_, hs_, cs_, gates_, rh_;

    void init(CellKind k, Eigen::Index in_sz, Eigen::Index hidden_sz, bool return_seq, Rng& rng);
    // xs: length-L sequence of (in x B); out gets L entries (return_sequences)
    // or 1 entry (final state). h0/c0 default to zeros.
    void forward(const std::vector<Mat>& xs, std::vector<Mat>& out, const Mat* h0 = nullptr,
                 const Mat* c0 = nullptr);
    // dout mirrors the forward output shape; dxs receives L gradients
    void backward(const std::vector<Mat>& dout, std::vector<Mat>& dxs);
    void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

// Forward pass over the sequence as given plus a second cell over the
// reversed sequence; per-step outputs are concatenated [forward; backward].
struct BidirectionalLayer {
    RecurrentLayer fwd, bwd;
    bool return_sequences = false;

    std::vector<Mat> fwd_out_, bwd_out_;

    void init(CellKind k, Eigen::Index in_sz, Eigen::Index hidden_sz, bool return_seq, Rng& rng);
    void forward(const std::vector<Mat>& xs, std::vector<Mat>& out);
    void backward(const std::vector<Mat>& dout, std::vector<Mat>& dxs);
    void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

}  // namespace ftn::nn

#endif
