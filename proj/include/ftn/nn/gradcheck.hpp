#ifndef FTN_NN_GRADCHECK_HPP
#define FTN_NN_GRADCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ftn/nn/model.hpp"

namespace ftn::nn {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t coords_checked = 0;
};

// Central finite differences on a random coordinate subset of every
// parameter tensor, against one analytic backward pass. Dropout is disabled
// (forward runs in inference mode); everything is 64-bit.
GradCheckReport grad_check(Model& model, const Mat& x, const std::vector<std::uint8_t>& labels,
                           double eps = 1e-5, std::size_t coords_per_param = 200,
                           std::uint64_t seed = 0);

}  // namespace ftn::nn

#endif
