#include "ragat/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ragat/errors.hpp"

namespace ragat {

using nlohmann::json;

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(max_len >= 1, "max_len must be >= 1");
    require(embed_dim >= 1, "embed_dim must be >= 1");
    require(!kernel_sizes.empty(), "kernel_sizes must be non-empty");
    for (int k : kernel_sizes) require(k >= 1, "kernel sizes must be >= 1");
    require(filters_per_kernel >= 1, "filters_per_kernel must be >= 1");
    require(gru_hidden >= 1, "gru_hidden must be >= 1");
    require(heads >= 1, "heads must be >= 1");
    require(gru_hidden % heads == 0,
            "gru_hidden (" + std::to_string(gru_hidden) + ") must be divisible by heads (" +
                std::to_string(heads) + ")");
    require(gcn_hidden >= 1, "gcn_hidden must be >= 1");
    require(window >= 2, "window must be >= 2");
    require(adjacency_mode == "raw" || adjacency_mode == "row_norm",
            "adjacency_mode must be 'raw' or 'row_norm'");
    require(tokenizer == "whitespace" || tokenizer == "char", "tokenizer must be 'whitespace' or 'char'");
    require(min_freq >= 1, "min_freq must be >= 1");
    require(max_vocab >= 2, "max_vocab must be >= 2");
    require(train_ratio > 0.0 && train_ratio < 1.0, "train_ratio must be in (0,1)");
    require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0,1)");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(epochs >= 1, "epochs must be >= 1");
    require(lr > 0.0, "lr must be positive");
    require(lr_decay > 0.0 && lr_decay <= 1.0, "lr_decay must be in (0,1]");
    require(patience >= 1, "patience must be >= 1");
}

std::string RunConfig::to_json() const {
    json j;
    j["max_len"] = max_len;
    j["embed_dim"] = embed_dim;
    j["kernel_sizes"] = kernel_sizes;
    j["filters_per_kernel"] = filters_per_kernel;
    j["gru_hidden"] = gru_hidden;
    j["heads"] = heads;
    j["gcn_hidden"] = gcn_hidden;
    j["window"] = window;
    j["adjacency_mode"] = adjacency_mode;
    j["tokenizer"] = tokenizer;
    j["min_freq"] = min_freq;
    j["max_vocab"] = max_vocab;
    j["train_ratio"] = train_ratio;
    j["bidirectional_gru"] = bidirectional_gru;
    j["gru_bias"] = gru_bias;
    j["gcn_bias"] = gcn_bias;
    j["shared_embedding"] = shared_embedding;
    j["dropout"] = dropout;
    j["batch_size"] = batch_size;
    j["epochs"] = epochs;
    j["lr"] = lr;
    j["lr_decay"] = lr_decay;
    j["patience"] = patience;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    static const std::set<std::string> known = {
        "max_len",    "embed_dim", "kernel_sizes", "filters_per_kernel",
        "gru_hidden", "heads",     "gcn_hidden",   "window",
        "adjacency_mode", "tokenizer", "min_freq", "max_vocab",
        "train_ratio", "bidirectional_gru", "gru_bias", "gcn_bias",
        "shared_embedding", "dropout", "batch_size", "epochs",
        "lr", "lr_decay", "patience", "seed"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);
    }

    RunConfig c;
    try {
        if (j.contains("max_len")) c.max_len = j["max_len"].get<int>();
        if (j.contains("embed_dim")) c.embed_dim = j["embed_dim"].get<int>();
        if (j.contains("kernel_sizes")) c.kernel_sizes = j["kernel_sizes"].get<std::vector<int>>();
        if (j.contains("filters_per_kernel")) c.filters_per_kernel = j["filters_per_kernel"].get<int>();
        if (j.contains("gru_hidden")) c.gru_hidden = j["gru_hidden"].get<int>();
        if (j.contains("heads")) c.heads = j["heads"].get<int>();
        if (j.contains("gcn_hidden")) c.gcn_hidden = j["gcn_hidden"].get<int>();
        if (j.contains("window")) c.window = j["window"].get<int>();
        if (j.contains("adjacency_mode")) c.adjacency_mode = j["adjacency_mode"].get<std::string>();
        if (j.contains("tokenizer")) c.tokenizer = j["tokenizer"].get<std::string>();
        if (j.contains("min_freq")) c.min_freq = j["min_freq"].get<int>();
        if (j.contains("max_vocab")) c.max_vocab = j["max_vocab"].get<int>();
        if (j.contains("train_ratio")) c.train_ratio = j["train_ratio"].get<double>();
        if (j.contains("bidirectional_gru")) c.bidirectional_gru = j["bidirectional_gru"].get<bool>();
        if (j.contains("gru_bias")) c.gru_bias = j["gru_bias"].get<bool>();
        if (j.contains("gcn_bias")) c.gcn_bias = j["gcn_bias"].get<bool>();
        if (j.contains("shared_embedding")) c.shared_embedding = j["shared_embedding"].get<bool>();
        if (j.contains("dropout")) c.dropout = j["dropout"].get<double>();
        if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
        if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
        if (j.contains("lr")) c.lr = j["lr"].get<double>();
        if (j.contains("lr_decay")) c.lr_decay = j["lr_decay"].get<double>();
        if (j.contains("patience")) c.patience = j["patience"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has wrong type: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write config file: " + path);
    out << to_json();
}

}  // namespace ragat
