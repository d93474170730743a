#include <Eigen/QR>

#include "ftn/errors.hpp"
#include "ftn/nn/layers.hpp"

namespace ftn::nn {

Mat orthogonal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const Eigen::Index n = std::max(rows, cols);
    Mat a(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) a(r, c) = rng.gaussian();
    }
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < n; ++c) {
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    }
    return q.topLeftCorner(rows, cols);
}

double bce_loss(const Mat& p_hat, const std::vector<std::uint8_t>& labels) {
    if (p_hat.rows() != 1 || p_hat.cols() != static_cast<Eigen::Index>(labels.size())) {
        throw ContractError("bce_loss: expected a 1 x batch probability row");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p_hat.cols(); ++i) {
        const double p = std::min(1.0 - 1e-12, std::max(1e-12, p_hat(0, i)));
        acc -= labels[static_cast<std::size_t>(i)] ? std::log(p) : std::log1p(-p);
    }
    return acc / static_cast<double>(p_hat.cols());
}

double categorical_ce_loss(const Mat& probs, const std::vector<std::uint8_t>& labels) {
    if (probs.cols() != static_cast<Eigen::Index>(labels.size())) {
        throw ContractError("categorical_ce_loss: batch size mismatch");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.cols(); ++i) {
        const double p =
            std::max(1e-12, probs(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]), i));
        acc -= std::log(p);
    }
    return acc / static_cast<double>(probs.cols());
}

void DenseLayer::init(Eigen::Index out, Eigen::Index in, Activation a, Rng& rng) {
    act = a;
    w = glorot_uniform(out, in, rng);
    b = Mat::Zero(out, 1);
    dw = Mat::Zero(out, in);
    db = Mat::Zero(out, 1);
}

const Mat& DenseLayer::forward(const Mat& x) {
    if (x.rows() != w.cols()) {
        throw ContractError("dense: input rows " + std::to_string(x.rows()) +
                            " do not match weight cols " + std::to_string(w.cols()));
    }
    x_cache = x;
    y_cache.noalias() = w * x;
    y_cache.colwise() += Eigen::VectorXd(b.col(0));
    apply_activation(act, y_cache);
    return y_cache;
}

Mat DenseLayer::backward(const Mat& dy) {
    Mat dz = dy;
    switch (act) {
        case Activation::linear: break;
        case Activation::relu:
            dz = (y_cache.array() > 0.0).select(dz, 0.0);
            break;
        case Activation::sigmoid:
            dz.array() *= y_cache.array() * (1.0 - y_cache.array());
            break;
    }
    return backward_pre(dz);
}

Mat DenseLayer::backward_pre(const Mat& dz) {
    dw.noalias() += dz * x_cache.transpose();
    db += dz.rowwise().sum();
    Mat dx;
    dx.noalias() = w.transpose() * dz;
    return dx;
}

void DenseLayer::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + ".w", &w, &dw});
    out.push_back({prefix + ".b", &b, &db});
}

}  // namespace ftn::nn
