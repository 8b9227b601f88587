#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ragat {

// Full run configuration. Loaded from a flat JSON object; unknown keys are
// rejected so typos fail loudly.
struct RunConfig {
    // sequence / model widths
    int max_len = 128;
    int embed_dim = 128;
    std::vector<int> kernel_sizes = {3, 4, 5};
    int filters_per_kernel = 64;
    int gru_hidden = 128;
    int heads = 4;
    int gcn_hidden = 64;

    // graph construction
    int window = 3;
    std::string adjacency_mode = "raw";

    // data handling
    std::string tokenizer = "whitespace";
    int min_freq = 1;
    int max_vocab = 50000;
    double train_ratio = 0.8;

    // architecture toggles
    bool bidirectional_gru = false;
    bool gru_bias = true;
    bool gcn_bias = false;
    bool shared_embedding = true;

    // optimization
    double dropout = 0.5;
    int batch_size = 32;
    int epochs = 3;
    double lr = 0.001;
    double lr_decay = 0.9;
    int patience = 3;
    std::uint64_t seed = 42;

    int conv_channels() const { return filters_per_kernel * static_cast<int>(kernel_sizes.size()); }
    int fusion_width() const { return gru_hidden + 2 * gcn_hidden; }

    void validate() const;  // throws ConfigError on inconsistent values

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace ragat
