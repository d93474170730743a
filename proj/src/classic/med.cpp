#include "ftn/classic/med.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ftn/errors.hpp"
#include "ftn/util.hpp"

namespace ftn::classic {

namespace {

struct Search {
    const std::vector<double>* h;
    std::size_t max_len;
    double best;                // un-normalised incumbent ||h*e||^2
    std::vector<int> best_event;
    std::vector<int> event;
    std::vector<double> out;    // running convolution outputs 0..depth-1

    // tail contribution once the event ends at `len` entries
    double tail_energy(std::size_t len) const {
        const auto& taps = *h;
        double acc = 0.0;
        for (std::size_t j = len; j + 1 < len + taps.size(); ++j) {
            double v = 0.0;
            for (std::size_t i = 1; i < taps.size(); ++i) {
                if (j >= i && j - i < len) v += taps[i] * event[j - i];
            }
            acc += v * v;
        }
        return acc;
    }

    void extend(std::size_t depth, double partial) {
        if (partial >= best) return;  // completed outputs only grow
        if (depth > 0 && event[depth - 1] != 0) {
            const double total = partial + tail_energy(depth);
            if (total < best) {
                best = total;
                best_event.assign(event.begin(), event.begin() + static_cast<long>(depth));
            }
        }
        if (depth == max_len) return;
        const auto& taps = *h;
        for (int e : {-2, 0, 2}) {
            if (depth == 0 && e != 2) continue;  // sign symmetry: fix e[0] = +2
            event[depth] = e;
            double v = 0.0;
            for (std::size_t i = 0; i < taps.size(); ++i) {
                if (depth >= i) v += taps[i] * event[depth - i];
            }
            out[depth] = v;
            extend(depth + 1, partial + v * v);
        }
        event[depth] = 0;
    }
};

}  // namespace

double MEDBound::evaluate(const channel::EffectiveChannel& ch) const {
    const auto& h = ch.taps;
    const std::size_t n = witness_event.size() + h.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (j >= i && j - i < witness_event.size()) v += h[i] * witness_event[j - i];
        }
        acc += v * v;
    }
    return acc / ch.energy();
}

MEDBound med_search(const channel::EffectiveChannel& ch, std::size_t max_event_len) {
    if (ch.taps.empty()) throw ContractError("med_search: empty channel");
    if (max_event_len < 1 || max_event_len > 24) {
        throw ContractError("med_search: max_event_len must lie in [1, 24]");
    }

    Search s;
    s.h = &ch.taps;
    s.max_len = max_event_len;
    s.best = std::numeric_limits<double>::infinity();
    s.event.assign(max_event_len, 0);
    s.out.assign(max_event_len, 0.0);
    s.extend(0, 0.0);

    MEDBound bound;
    bound.dmin2_normalized = s.best / ch.energy();
    bound.witness_event = s.best_event;
    return bound;
}

double med_ber_lower_bound(const MEDBound& bound, double ebn0_db) {
    const double gamma = db_to_linear(ebn0_db);
    return q_function(std::sqrt(bound.dmin2_normalized / 4.0 * 2.0 * gamma));
}

void write_bound_csv(const MEDBound& bound, const std::vector<double>& ebn0_grid,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "ebn0_db,ber_lower_bound,dmin2\n";
    for (double db : ebn0_grid) {
        out << db << "," << med_ber_lower_bound(bound, db) << "," << bound.dmin2_normalized
            << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ftn::classic
