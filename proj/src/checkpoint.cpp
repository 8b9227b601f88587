#include "ragat/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace ragat {

namespace {

constexpr char kMagic[8] = {'R', 'G', 'A', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError(std::string("checkpoint truncated reading ") + what);
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const char* what, std::uint32_t max_len = 1u << 24) {
    const auto len = read_pod<std::uint32_t>(in, what);
    if (len > max_len) throw ParseError(std::string("checkpoint: implausible length for ") + what);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw ParseError(std::string("checkpoint truncated reading ") + what);
    return s;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint file: " + path);

    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(out, kVersion);

    const std::string config_json = config.to_json();
    write_pod<std::uint64_t>(out, config_json.size());
    out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));

    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.size()));
    for (int id = 0; id < vocab.size(); ++id) write_string(out, vocab.token_of(id));

    const auto entries = params.named_entries();
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
    for (const auto& [name, t] : entries) {
        write_string(out, name);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.ndim()));
        for (int e : t.shape()) write_pod<std::int32_t>(out, e);
        out.write(reinterpret_cast<const char*>(t.values().data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!out) throw DataError("write failed for checkpoint file: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint file: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("not a checkpoint file (bad magic): " + path);
    }
    const auto version = read_pod<std::uint32_t>(in, "version");
    if (version != kVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }

    const auto config_len = read_pod<std::uint64_t>(in, "config length");
    if (config_len > (1u << 24)) throw ParseError("checkpoint: implausible config length");
    std::string config_json(config_len, '\0');
    in.read(config_json.data(), static_cast<std::streamsize>(config_len));
    if (!in) throw ParseError("checkpoint truncated reading config");

    Checkpoint ckpt;
    ckpt.config = RunConfig::from_json(config_json);

    const auto vocab_size = read_pod<std::uint32_t>(in, "vocab size");
    if (vocab_size < 2) throw ParseError("checkpoint: vocabulary smaller than reserved ids");
    for (std::uint32_t id = 0; id < vocab_size; ++id) {
        const std::string token = read_string(in, "vocab token");
        if (id <= Vocabulary::kUnkId) {
            if (token != ckpt.vocab.token_of(static_cast<int>(id))) {
                throw ParseError("checkpoint: reserved vocabulary id mismatch");
            }
            continue;
        }
        ckpt.vocab.add_token(token);
    }

    // Rebuild the parameter structure from the config, then overwrite values.
    ckpt.params = init_params(ckpt.config, ckpt.vocab.size(), /*seed=*/0);
    auto entries = ckpt.params.named_entries();

    const auto param_count = read_pod<std::uint32_t>(in, "param count");
    if (param_count != entries.size()) {
        throw ConfigError("checkpoint parameter count " + std::to_string(param_count) +
                          " does not match config-implied count " + std::to_string(entries.size()));
    }
    for (auto& [name, tensor] : entries) {
        const std::string stored_name = read_string(in, "param name");
        if (stored_name != name) {
            throw ConfigError("checkpoint parameter order mismatch: expected " + name + ", found " + stored_name);
        }
        const auto ndim = read_pod<std::uint32_t>(in, "param ndim");
        std::vector<int> shape(ndim);
        for (auto& e : shape) e = read_pod<std::int32_t>(in, "param extent");
        Tensor t = tensor;
        if (shape != t.shape()) {
            throw ConfigError("checkpoint shape mismatch for " + name);
        }
        in.read(reinterpret_cast<char*>(t.values().data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) throw ParseError("checkpoint truncated reading values of " + name);
    }
    return ckpt;
}

}  // namespace ragat
