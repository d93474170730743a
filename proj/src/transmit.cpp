#include "ftn/transmit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "ftn/errors.hpp"
#include "ftn/rng.hpp"
#include "ftn/util.hpp"

namespace ftn::transmit {

namespace {

using modulation::Scheme;
using modulation::SymbolSequence;

// Ridge added to the Gram diagonal before the banded Cholesky; the Gram
// matrix is singular once the folded spectrum has nulls. The whitening
// transform is anticausal with a slowly decaying transient for near-null
// spectra, so the data block is followed by a long stretch of tail pilots
// that absorbs the block-boundary error.
constexpr double kWhitenRidge = 1e-9;
constexpr std::size_t kWhitenTailGuard = 3000;
constexpr std::size_t kMaxWhitenDoubles = 50'000'000;

SymbolSequence with_pilots(const SymbolSequence& s, std::size_t prefix, std::size_t suffix) {
    SymbolSequence out;
    out.scheme = s.scheme;
    out.rails.resize(s.rail_count());
    const double pilot = modulation::pilot_level(s.scheme);
    for (std::size_t r = 0; r < s.rail_count(); ++r) {
        out.rails[r].reserve(prefix + s.rails[r].size() + suffix);
        out.rails[r].assign(prefix, pilot);
        out.rails[r].insert(out.rails[r].end(), s.rails[r].begin(), s.rails[r].end());
        out.rails[r].insert(out.rails[r].end(), suffix, pilot);
    }
    return out;
}

// Lower-banded Cholesky of the symmetric Toeplitz matrix with first column
// `col0` (col0[0] already includes the ridge). L(i,j) for i-j in [0, band]
// is stored at store[j*(band+1) + (i-j)].
struct BandedCholesky {
    std::size_t n = 0;
    std::size_t band = 0;
    std::vector<double> store;

    double l(std::size_t i, std::size_t j) const { return store[j * (band + 1) + (i - j)]; }
    double& l(std::size_t i, std::size_t j) { return store[j * (band + 1) + (i - j)]; }
};

BandedCholesky banded_cholesky_toeplitz(const std::vector<double>& col0, std::size_t n) {
    BandedCholesky ch;
    ch.n = n;
    ch.band = col0.size() - 1;
    if (n * (ch.band + 1) > kMaxWhitenDoubles) {
        throw SizeError("transmit_waveform: block too long for the whitening factor; "
                        "split the sequence into shorter blocks");
    }
    ch.store.assign(n * (ch.band + 1), 0.0);
    const std::size_t b = ch.band;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k0 = (j > b) ? j - b : 0;
        double diag = col0[0];
        for (std::size_t k = k0; k < j; ++k) diag -= ch.l(j, k) * ch.l(j, k);
        if (diag <= 0.0) {
            std::ostringstream msg;
            msg << "whitening factorization lost positive definiteness at column " << j;
            throw NumericError(msg.str());
        }
        const double dsqrt = std::sqrt(diag);
        ch.l(j, j) = dsqrt;
        const std::size_t imax = std::min(j + b, n - 1);
        for (std::size_t i = j + 1; i <= imax; ++i) {
            double acc = col0[i - j];
            const std::size_t kk0 = (i > b) ? i - b : 0;
            for (std::size_t k = std::max(kk0, k0); k < j; ++k) {
                acc -= ch.l(i, k) * ch.l(j, k);
            }
            ch.l(i, j) = acc / dsqrt;
        }
    }
    return ch;
}

void forward_solve(const BandedCholesky& ch, std::vector<double>& x) {
    const std::size_t b = ch.band;
    for (std::size_t i = 0; i < ch.n; ++i) {
        double acc = x[i];
        const std::size_t j0 = (i > b) ? i - b : 0;
        for (std::size_t j = j0; j < i; ++j) acc -= ch.l(i, j) * x[j];
        x[i] = acc / ch.l(i, i);
    }
}

}  // namespace

double ebn0_to_sigma(double ebn0_db, Scheme scheme, double channel_energy) {
    if (std::isinf(ebn0_db) && ebn0_db > 0) return 0.0;
    const double gamma = db_to_linear(ebn0_db);
    const double bps = modulation::bits_per_symbol(scheme);
    return std::sqrt(channel_energy / (2.0 * bps * gamma));
}

NoiseModel noise_for_ebn0(double ebn0_db, Scheme scheme, double channel_energy, bool whitened) {
    const double sigma = ebn0_to_sigma(ebn0_db, scheme, channel_energy);
    NoiseModel nm;
    nm.whitened = whitened;
    nm.n0 = whitened ? 2.0 * sigma * sigma : sigma * sigma;
    return nm;
}

ReceivedSequence transmit_discrete(const SymbolSequence& s, const channel::EffectiveChannel& ch,
                                   const NoiseModel& noise, std::uint64_t seed,
                                   std::size_t pilot_len) {
    if (!noise.whitened) {
        throw ContractError("transmit_discrete: requires a whitened NoiseModel");
    }
    if (ch.taps.empty()) throw ContractError("transmit_discrete: empty channel");
    if (pilot_len == 0) pilot_len = std::max(ch.length(), kDefaultPilotLen);

    const double sigma = std::sqrt(noise.n0 / 2.0);
    const double pilot = modulation::pilot_level(s.scheme);
    const std::size_t lh = ch.length();

    ReceivedSequence rx;
    rx.labels = with_pilots(s, pilot_len, 0);
    rx.noise_sigma = sigma;
    rx.seed = seed;
    rx.pilot_len = pilot_len;
    rx.tail_pilot_len = 0;
    rx.channel = ch;
    rx.tau = ch.tau;
    rx.beta = ch.beta;

    const std::size_t m = rx.labels.size();
    rx.observations.resize(rx.labels.rail_count());
    for (std::size_t r = 0; r < rx.labels.rail_count(); ++r) {
        Rng rng(seed, 1000 + r);
        const auto& sym = rx.labels.rails[r];
        auto& y = rx.observations[r];
        y.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < lh; ++i) {
                const double sk = (k >= i) ? sym[k - i] : pilot;
                acc += ch.taps[i] * sk;
            }
            y[k] = acc + sigma * rng.gaussian();
        }
    }
    return rx;
}

ReceivedSequence transmit_waveform(const SymbolSequence& s, const pulse::PulseConfig& cfg,
                                   const NoiseModel& noise, double offset_fraction,
                                   std::uint64_t seed, std::size_t pilot_len) {
    cfg.validate();
    if (!(offset_fraction >= 0.0 && offset_fraction < 1.0)) {
        throw ContractError("transmit_waveform: offset_fraction must lie in [0, 1)");
    }

    const pulse::SampledPulse q = pulse::rrc_taps(cfg);
    const std::size_t step = static_cast<std::size_t>(cfg.samples_per_ftn_symbol());
    const std::size_t qlen = q.taps.size();
    const long offset_samples = std::lround(offset_fraction * static_cast<double>(step));

    // symbol-rate autocorrelation column for the whitening factor; its
    // support also sets the whitening boundary that the tail pilots cover
    const std::vector<double> g2 = pulse::symbol_rate_autocorrelation(cfg);
    const std::size_t g_center = (g2.size() - 1) / 2;

    if (pilot_len == 0) pilot_len = kDefaultPilotLen;
    const std::size_t suffix =
        noise.whitened ? std::max({pilot_len, g_center + 1, kWhitenTailGuard}) : pilot_len;

    ReceivedSequence rx;
    rx.labels = with_pilots(s, pilot_len, suffix);
    rx.offset_fraction = offset_fraction;
    rx.seed = seed;
    rx.pilot_len = pilot_len;
    rx.tail_pilot_len = suffix;
    rx.tau = cfg.tau;
    rx.beta = cfg.beta;

    // The whitened variant delivers the modified-channel observations, so
    // downstream consumers see the working channel; the matched variant is
    // the raw G s + eta model and keeps an identity placeholder channel.
    const double matched_scale = noise.whitened ? noise.n0 / 2.0 : noise.n0;  // target n0*G scale
    rx.noise_sigma = std::sqrt(matched_scale);

    const std::size_t m = rx.labels.size();
    const std::size_t n_wave = (m - 1) * step + qlen;
    const double wave_sigma =
        (matched_scale > 0.0) ? std::sqrt(matched_scale / q.dt) : 0.0;

    rx.observations.resize(rx.labels.rail_count());
    for (std::size_t r = 0; r < rx.labels.rail_count(); ++r) {
        const auto& sym = rx.labels.rails[r];
        Rng rng(seed, 1000 + r);

        std::vector<double> wave(n_wave, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double sk = sym[k];
            double* dst = wave.data() + k * step;
            for (std::size_t u = 0; u < qlen; ++u) dst[u] += sk * q.taps[u];
        }
        if (wave_sigma > 0.0) {
            for (double& v : wave) v += wave_sigma * rng.gaussian();
        }

        auto& y = rx.observations[r];
        y.assign(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const long base = static_cast<long>(k * step) + offset_samples;
            double acc = 0.0;
            for (std::size_t u = 0; u < qlen; ++u) {
                const long j = base + static_cast<long>(u);
                if (j >= 0 && j < static_cast<long>(n_wave)) acc += wave[j] * q.taps[u];
            }
            y[k] = acc * q.dt;
        }

        if (noise.whitened) {
            // Finite-block whitening: G + ridge = L L^T, y_w = J L^{-1} J y,
            // plus a compensation draw that restores exactly white noise.
            std::vector<double> col0(g_center + 1);
            for (std::size_t i = 0; i <= g_center; ++i) col0[i] = g2[g_center + i];
            col0[0] += kWhitenRidge;
            const BandedCholesky chol = banded_cholesky_toeplitz(col0, m);

            std::reverse(y.begin(), y.end());
            forward_solve(chol, y);
            std::reverse(y.begin(), y.end());

            if (matched_scale > 0.0) {
                Rng comp_rng(seed, 2000 + r);
                std::vector<double> u(m);
                for (double& v : u) v = comp_rng.gaussian();
                forward_solve(chol, u);
                const double scale = std::sqrt(matched_scale * kWhitenRidge);
                for (std::size_t k = 0; k < m; ++k) y[k] += scale * u[m - 1 - k];
            }
        }
    }

    if (noise.whitened) {
        rx.channel = channel::working_channel(cfg);
    } else {
        rx.channel.taps = {1.0};
        rx.channel.tau = cfg.tau;
        rx.channel.beta = cfg.beta;
    }
    return rx;
}

Eigen::VectorXd sample_matched_noise(const Eigen::MatrixXd& gram, double n0, Rng& rng) {
    const Eigen::Index n = gram.rows();
    Eigen::MatrixXd a = gram;
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) += kWhitenRidge;
    static thread_local Eigen::LLT<Eigen::MatrixXd> llt;
    static thread_local Eigen::MatrixXd cached;
    if (cached.rows() != n || cached != a) {
        llt.compute(a);
        if (llt.info() != Eigen::Success) {
            throw NumericError("sample_matched_noise: Gram matrix not positive definite");
        }
        cached = a;
    }
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.gaussian();
    Eigen::VectorXd colored = llt.matrixL() * z;
    colored *= std::sqrt(n0);
    return colored;
}

// ---------------------------------------------------------------------------
// dataset container

namespace {
constexpr char kDatasetMagic[8] = {'F', 'T', 'N', 'D', 'S', '1', '\n', '\0'};

void write_exact(std::ofstream& out, const void* data, std::size_t len, const std::string& path) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out) throw IoError("write failed: " + path);
}

void read_exact(std::ifstream& in, void* data, std::size_t len, const std::string& path) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (in.gcount() != static_cast<std::streamsize>(len)) {
        throw TruncatedFileError("truncated dataset file: " + path);
    }
}
}  // namespace

void save_dataset(const ReceivedSequence& rx, const std::string& path) {
    nlohmann::json hdr;
    hdr["format"] = "ftn-dataset";
    hdr["version"] = 1;
    hdr["tau"] = rx.tau;
    hdr["beta"] = rx.beta;
    hdr["scheme"] = modulation::scheme_name(rx.labels.scheme);
    hdr["ebn0_db"] = rx.ebn0_db;
    hdr["noise_sigma"] = rx.noise_sigma;
    hdr["offset_fraction"] = rx.offset_fraction;
    hdr["seed"] = rx.seed;
    hdr["pilot_len"] = rx.pilot_len;
    hdr["tail_pilot_len"] = rx.tail_pilot_len;
    hdr["rails"] = rx.rail_count();
    hdr["length"] = rx.total_len();
    hdr["channel"] = {{"taps", rx.channel.taps},
                      {"precursor_len", rx.channel.precursor_len},
                      {"tau", rx.channel.tau},
                      {"beta", rx.channel.beta}};
    const std::string htext = hdr.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_exact(out, kDatasetMagic, sizeof(kDatasetMagic), path);
    const std::uint32_t hlen = static_cast<std::uint32_t>(htext.size());
    write_exact(out, &hlen, sizeof(hlen), path);
    write_exact(out, htext.data(), htext.size(), path);

    std::uint32_t crc = 0;
    const std::size_t n = rx.total_len();
    for (std::size_t r = 0; r < rx.rail_count(); ++r) {
        const auto& obs = rx.observations[r];
        write_exact(out, obs.data(), n * sizeof(double), path);
        crc = crc32(obs.data(), n * sizeof(double), crc);
        const auto labels = modulation::rail_labels(rx.labels, r);
        write_exact(out, labels.data(), n, path);
        crc = crc32(labels.data(), n, crc);
    }
    write_exact(out, &crc, sizeof(crc), path);
}

ReceivedSequence load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    char magic[sizeof(kDatasetMagic)];
    read_exact(in, magic, sizeof(magic), path);
    if (std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) {
        throw FormatError("not an ftn dataset file: " + path);
    }
    std::uint32_t hlen = 0;
    read_exact(in, &hlen, sizeof(hlen), path);
    if (hlen > (1u << 24)) throw FormatError("implausible dataset header length: " + path);
    std::string htext(hlen, '\0');
    read_exact(in, htext.data(), hlen, path);

    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(htext);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad dataset header: ") + e.what());
    }
    if (hdr.value("format", "") != "ftn-dataset") {
        throw FormatError("bad dataset header format tag: " + path);
    }
    if (hdr.value("version", -1) != 1) {
        std::ostringstream msg;
        msg << "unsupported dataset version " << hdr.value("version", -1) << " in " << path;
        throw VersionError(msg.str());
    }

    ReceivedSequence rx;
    rx.tau = hdr.at("tau").get<double>();
    rx.beta = hdr.at("beta").get<double>();
    rx.ebn0_db = hdr.at("ebn0_db").get<double>();
    rx.noise_sigma = hdr.at("noise_sigma").get<double>();
    rx.offset_fraction = hdr.at("offset_fraction").get<double>();
    rx.seed = hdr.at("seed").get<std::uint64_t>();
    rx.pilot_len = hdr.at("pilot_len").get<std::size_t>();
    rx.tail_pilot_len = hdr.at("tail_pilot_len").get<std::size_t>();
    rx.channel.taps = hdr.at("channel").at("taps").get<std::vector<double>>();
    rx.channel.precursor_len = hdr.at("channel").at("precursor_len").get<std::size_t>();
    rx.channel.tau = hdr.at("channel").at("tau").get<double>();
    rx.channel.beta = hdr.at("channel").at("beta").get<double>();

    const auto scheme = modulation::scheme_from_string(hdr.at("scheme").get<std::string>());
    const std::size_t rails = hdr.at("rails").get<std::size_t>();
    const std::size_t n = hdr.at("length").get<std::size_t>();

    rx.labels.scheme = scheme;
    rx.labels.rails.resize(rails);
    rx.observations.resize(rails);

    std::uint32_t crc = 0;
    for (std::size_t r = 0; r < rails; ++r) {
        rx.observations[r].resize(n);
        read_exact(in, rx.observations[r].data(), n * sizeof(double), path);
        crc = crc32(rx.observations[r].data(), n * sizeof(double), crc);
        std::vector<std::uint8_t> labels(n);
        read_exact(in, labels.data(), n, path);
        crc = crc32(labels.data(), n, crc);
        rx.labels.rails[r].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            rx.labels.rails[r][i] = modulation::level_for_class(scheme, labels[i]);
        }
    }
    std::uint32_t stored = 0;
    read_exact(in, &stored, sizeof(stored), path);
    if (stored != crc) {
        throw ChecksumError("dataset payload checksum mismatch: " + path);
    }
    return rx;
}

void export_dataset_csv(const ReceivedSequence& rx, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "rail,index,observation,label,is_pilot\n";
    for (std::size_t r = 0; r < rx.rail_count(); ++r) {
        const auto labels = modulation::rail_labels(rx.labels, r);
        for (std::size_t i = 0; i < rx.total_len(); ++i) {
            const bool pilot = i < rx.pilot_len || i >= rx.total_len() - rx.tail_pilot_len;
            out << r << "," << i << "," << rx.observations[r][i] << ","
                << static_cast<int>(labels[i]) << "," << (pilot ? 1 : 0) << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ftn::transmit
