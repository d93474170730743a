#ifndef FTN_CLASSIC_DFE_HPP
#define FTN_CLASSIC_DFE_HPP

#include <cstddef>
#include <vector>

#include "ftn/modulation.hpp"
#include "ftn/transmit.hpp"

namespace ftn::classic {

// Decision-feedback equaliser: feed-forward taps over y[k .. k+T_f-1],
// feedback taps over past hard decisions. The first rls_len data symbols
// are a known training block adapted with RLS; decision-directed LMS runs
// thereafter.
struct DFEConfig {
    std::size_t ff_taps = 12;
    std::size_t fb_taps = 8;
    std::size_t rls_len = 2000;
    double rls_lambda = 0.995;
    double lms_mu = 0.01;

    void validate() const;
};

struct DFEResult {
    modulation::SymbolSequence decisions;  // full length; training region = labels
    std::size_t train_prefix = 0;          // data symbols consumed by RLS training
    std::vector<double> ff_weights;        // converged taps after the run (rail 0)
    std::vector<double> fb_weights;
};

DFEResult dfe_detect(const transmit::ReceivedSequence& rx, const DFEConfig& cfg);

}  // namespace ftn::classic

#endif
