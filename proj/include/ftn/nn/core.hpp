#ifndef FTN_NN_CORE_HPP
#define FTN_NN_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ftn/rng.hpp"

namespace ftn::nn {

using Mat = Eigen::MatrixXd;

// Named view of one parameter tensor and its gradient accumulator.
struct ParamRef {
    std::string name;
    Mat* value = nullptr;
    Mat* grad = nullptr;
};

enum class Activation { linear, relu, sigmoid };

inline void apply_activation(Activation act, Mat& z) {
    switch (act) {
        case Activation::linear: break;
        case Activation::relu: z = z.cwiseMax(0.0); break;
        case Activation::sigmoid:
            z = 1.0 / (1.0 + (-z.array()).exp());
            break;
    }
}

// Glorot-uniform for feed-forward kernels.
inline Mat glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            m(r, c) = limit * (2.0 * rng.uniform() - 1.0);
        }
    }
    return m;
}

// Orthogonal init for recurrent kernels (QR of a gaussian matrix, sign-fixed).
Mat orthogonal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Stable binary cross-entropy from probabilities, clamped to
// [1e-12, 1 - 1e-12]; returns the batch mean. labels are 0/1.
double bce_loss(const Mat& p_hat, const std::vector<std::uint8_t>& labels);

// Mean categorical cross-entropy of softmax probabilities (classes x B).
double categorical_ce_loss(const Mat& probs, const std::vector<std::uint8_t>& labels);

}  // namespace ftn::nn

#endif
