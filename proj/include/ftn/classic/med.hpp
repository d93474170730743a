#ifndef FTN_CLASSIC_MED_HPP
#define FTN_CLASSIC_MED_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "ftn/channel.hpp"

namespace ftn::classic {

// Minimum Euclidean distance over binary error difference events, used as a
// BER lower bound. Normalised so the ISI-free single-symbol event scores 4.
struct MEDBound {
    double dmin2_normalized = 4.0;
    std::vector<int> witness_event;  // entries in {-2, 0, +2}, leading entry +2

    double evaluate(const channel::EffectiveChannel& ch) const;  // recompute from witness
};

// Branch-and-bound minimisation of ||h * e||^2 / ||h||^2 over nonzero
// difference sequences e in {-2,0,+2}^len with e[0] != 0 and len <= max_event_len.
MEDBound med_search(const channel::EffectiveChannel& ch, std::size_t max_event_len);

// Q(sqrt((dmin2/4) * 2 * 10^(ebn0/10))); the matched-filter bound when dmin2 = 4.
double med_ber_lower_bound(const MEDBound& bound, double ebn0_db);

void write_bound_csv(const MEDBound& bound, const std::vector<double>& ebn0_grid,
                     const std::string& path);

}  // namespace ftn::classic

#endif
