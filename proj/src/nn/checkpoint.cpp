#include "ftn/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "ftn/errors.hpp"
#include "ftn/util.hpp"

namespace ftn::nn {

namespace {
constexpr char kModelMagic[8] = {'F', 'T', 'N', 'M', 'D', 'L', '1', '\n'};

void write_exact(std::ofstream& out, const void* data, std::size_t len, const std::string& path) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!out) throw IoError("write failed: " + path);
}

void read_exact(std::ifstream& in, void* data, std::size_t len, const std::string& path) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (in.gcount() != static_cast<std::streamsize>(len)) {
        throw TruncatedFileError("truncated model file: " + path);
    }
}
}  // namespace

void save_model(TrainedModel& tm, const std::string& path) {
    const auto params = tm.model.params();
    nlohmann::json hdr;
    hdr["format"] = "ftn-model";
    hdr["version"] = 1;
    hdr["spec"] = tm.spec.to_json();
    hdr["metadata"] = tm.metadata;
    auto& table = hdr["params"] = nlohmann::json::array();
    for (const auto& p : params) {
        table.push_back({{"name", p.name}, {"rows", p.value->rows()}, {"cols", p.value->cols()}});
    }

    const std::string htext = hdr.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_exact(out, kModelMagic, sizeof(kModelMagic), path);
    const std::uint32_t hlen = static_cast<std::uint32_t>(htext.size());
    write_exact(out, &hlen, sizeof(hlen), path);
    write_exact(out, htext.data(), htext.size(), path);

    std::uint32_t crc = 0;
    for (const auto& p : params) {
        const std::size_t bytes = static_cast<std::size_t>(p.value->size()) * sizeof(double);
        write_exact(out, p.value->data(), bytes, path);
        crc = crc32(p.value->data(), bytes, crc);
    }
    write_exact(out, &crc, sizeof(crc), path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    char magic[sizeof(kModelMagic)];
    read_exact(in, magic, sizeof(magic), path);
    if (std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw FormatError("not an ftn model file: " + path);
    }
    std::uint32_t hlen = 0;
    read_exact(in, &hlen, sizeof(hlen), path);
    if (hlen > (1u << 24)) throw FormatError("implausible model header length: " + path);
    std::string htext(hlen, '\0');
    read_exact(in, htext.data(), hlen, path);

    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(htext);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad model header: ") + e.what());
    }
    if (hdr.value("format", "") != "ftn-model") {
        throw FormatError("bad model header format tag: " + path);
    }
    if (hdr.value("version", -1) != 1) {
        throw VersionError("unsupported model version " +
                           std::to_string(hdr.value("version", -1)) + " in " + path);
    }

    TrainedModel tm;
    tm.spec = ModelSpec::from_json(hdr.at("spec"));
    tm.model = Model(tm.spec, 0);
    tm.metadata = hdr.value("metadata", nlohmann::json::object());

    auto params = tm.model.params();
    const auto& table = hdr.at("params");
    if (table.size() != params.size()) {
        throw FormatError("model parameter table size mismatch: " + path);
    }
    std::uint32_t crc = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& entry = table[i];
        if (entry.at("name").get<std::string>() != params[i].name ||
            entry.at("rows").get<Eigen::Index>() != params[i].value->rows() ||
            entry.at("cols").get<Eigen::Index>() != params[i].value->cols()) {
            throw FormatError("model parameter table entry mismatch at index " +
                              std::to_string(i) + ": " + path);
        }
        const std::size_t bytes = static_cast<std::size_t>(params[i].value->size()) * sizeof(double);
        read_exact(in, params[i].value->data(), bytes, path);
        crc = crc32(params[i].value->data(), bytes, crc);
    }
    std::uint32_t stored = 0;
    read_exact(in, &stored, sizeof(stored), path);
    if (stored != crc) throw ChecksumError("model payload checksum mismatch: " + path);
    return tm;
}

}  // namespace ftn::nn
