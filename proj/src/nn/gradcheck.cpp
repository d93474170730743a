#include "ftn/nn/gradcheck.hpp"

#include <cmath>

namespace ftn::nn {

GradCheckReport grad_check(Model& model, const Mat& x, const std::vector<std::uint8_t>& labels,
                           double eps, std::size_t coords_per_param, std::uint64_t seed) {
    auto params = model.params();
    model.zero_grads();
    model.forward(x, false, nullptr);
    model.backward(labels);

    // copy the analytic gradients before the probes overwrite caches
    std::vector<Mat> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) analytic.push_back(*p.grad);

    GradCheckReport report;
    Rng rng(seed, 0x96AD);
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Mat& value = *params[pi].value;
        const std::size_t n = static_cast<std::size_t>(value.size());
        const std::size_t probes = std::min(coords_per_param, n);
        for (std::size_t k = 0; k < probes; ++k) {
            const std::size_t idx = (probes == n) ? k : rng.below(n);
            double* coord = value.data() + idx;
            const double saved = *coord;

            *coord = saved + eps;
            model.forward(x, false, nullptr);
            const double lp = model.loss(labels);
            *coord = saved - eps;
            model.forward(x, false, nullptr);
            const double lm = model.loss(labels);
            *coord = saved;

            const double numeric = (lp - lm) / (2.0 * eps);
            const double a = analytic[pi](static_cast<Eigen::Index>(idx));
            // The denominator floor keeps cancellation noise on exactly-zero
            // gradient coordinates (dead ReLUs, per-query-constant attention
            // shifts) from registering as disagreement: the difference
            // quotient carries ~|L|*2^-52/eps of absolute noise.
            const double rel =
                std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-5});
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = params[pi].name;
            }
            ++report.coords_checked;
        }
    }
    // restore a clean forward cache
    model.forward(x, false, nullptr);
    return report;
}

}  // namespace ftn::nn
