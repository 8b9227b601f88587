#include "ragat/classifier.hpp"

#include <cmath>

namespace ragat {

namespace {

void append_gru(std::vector<std::pair<std::string, Tensor>>& out, const std::string& prefix,
                const GruParams& g) {
    out.emplace_back(prefix + ".w_z", g.W_z);
    out.emplace_back(prefix + ".u_z", g.U_z);
    if (g.use_bias) out.emplace_back(prefix + ".b_z", g.b_z);
    out.emplace_back(prefix + ".w_r", g.W_r);
    out.emplace_back(prefix + ".u_r", g.U_r);
    if (g.use_bias) out.emplace_back(prefix + ".b_r", g.b_r);
    out.emplace_back(prefix + ".w_h", g.W_h);
    out.emplace_back(prefix + ".u_h", g.U_h);
    if (g.use_bias) out.emplace_back(prefix + ".b_h", g.b_h);
}

Tensor glorot(Rng& rng, std::vector<int> shape, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::size_t n = 1;
    for (int e : shape) n *= static_cast<std::size_t>(e);
    std::vector<double> vals(n);
    for (double& v : vals) v = rng.uniform(-bound, bound);
    return Tensor(std::move(shape), std::move(vals));
}

GruParams init_gru(Rng& rng, int input_dim, int hidden, bool use_bias) {
    GruParams g;
    g.use_bias = use_bias;
    auto gate = [&](Tensor& W, Tensor& U, Tensor& b) {
        W = glorot(rng, {input_dim, hidden}, input_dim, hidden);
        U = glorot(rng, {hidden, hidden}, hidden, hidden);
        if (use_bias) b = Tensor::zeros({hidden});
    };
    gate(g.W_z, g.U_z, g.b_z);
    gate(g.W_r, g.U_r, g.b_r);
    gate(g.W_h, g.U_h, g.b_h);
    return g;
}

}  // namespace

std::vector<std::pair<std::string, Tensor>> ModelParams::named_entries() const {
    std::vector<std::pair<std::string, Tensor>> out;
    out.emplace_back("embedding", embedding);
    if (embedding_gcn) out.emplace_back("embedding_gcn", *embedding_gcn);
    for (std::size_t i = 0; i < conv.kernel_sizes.size(); ++i) {
        const std::string prefix = "conv.k" + std::to_string(conv.kernel_sizes[i]);
        out.emplace_back(prefix + ".weight", conv.weights[i]);
        out.emplace_back(prefix + ".bias", conv.biases[i]);
    }
    append_gru(out, "gru", gru);
    if (gru_back) append_gru(out, "gru_back", *gru_back);
    if (gru_proj) out.emplace_back("gru.proj", *gru_proj);
    out.emplace_back("mha.w_q", mha.W_q);
    out.emplace_back("mha.w_k", mha.W_k);
    out.emplace_back("mha.w_v", mha.W_v);
    out.emplace_back("mha.w_o", mha.W_o);
    out.emplace_back("gcn.w_f", gcn.W_f);
    out.emplace_back("gcn.w_b", gcn.W_b);
    if (gcn.use_bias) {
        out.emplace_back("gcn.b_f", gcn.b_f);
        out.emplace_back("gcn.b_b", gcn.b_b);
    }
    out.emplace_back("head.weight", head_w);
    out.emplace_back("head.bias", head_b);
    return out;
}

void ModelParams::set_requires_grad(bool rq) {
    for (auto& [name, t] : named_entries()) {
        Tensor tensor = t;
        tensor.set_requires_grad(rq);
    }
}

void ModelParams::zero_grads() {
    for (auto& [name, t] : named_entries()) {
        Tensor tensor = t;
        tensor.zero_grad();
    }
}

ModelParams ModelParams::clone() const {
    ModelParams copy = *this;
    auto deep = [](Tensor& t) {
        Tensor fresh(t.shape(), t.values(), t.requires_grad());
        t = fresh;
    };
    deep(copy.embedding);
    if (copy.embedding_gcn) deep(*copy.embedding_gcn);
    for (auto& w : copy.conv.weights) deep(w);
    for (auto& b : copy.conv.biases) deep(b);
    auto deep_gru = [&](GruParams& g) {
        deep(g.W_z);
        deep(g.U_z);
        deep(g.W_r);
        deep(g.U_r);
        deep(g.W_h);
        deep(g.U_h);
        if (g.use_bias) {
            deep(g.b_z);
            deep(g.b_r);
            deep(g.b_h);
        }
    };
    deep_gru(copy.gru);
    if (copy.gru_back) deep_gru(*copy.gru_back);
    if (copy.gru_proj) deep(*copy.gru_proj);
    deep(copy.mha.W_q);
    deep(copy.mha.W_k);
    deep(copy.mha.W_v);
    deep(copy.mha.W_o);
    deep(copy.gcn.W_f);
    deep(copy.gcn.W_b);
    if (copy.gcn.use_bias) {
        deep(copy.gcn.b_f);
        deep(copy.gcn.b_b);
    }
    deep(copy.head_w);
    deep(copy.head_b);
    return copy;
}

ModelParams init_params(const RunConfig& config, int vocab_size, std::uint64_t seed) {
    config.validate();
    if (vocab_size < 2) throw ConfigError("init_params: vocabulary size must be >= 2");

    Rng rng(seed);
    ModelParams p;

    auto init_embedding = [&]() {
        std::vector<double> vals(static_cast<std::size_t>(vocab_size) * config.embed_dim);
        for (double& v : vals) v = rng.uniform(-0.05, 0.05);
        // PAD row pinned to zero; the optimizer also skips it.
        for (int c = 0; c < config.embed_dim; ++c) vals[static_cast<std::size_t>(c)] = 0.0;
        return Tensor({vocab_size, config.embed_dim}, std::move(vals));
    };
    p.embedding = init_embedding();
    if (!config.shared_embedding) p.embedding_gcn = init_embedding();

    p.conv.kernel_sizes = config.kernel_sizes;
    for (int k : config.kernel_sizes) {
        const int fan_in = k * config.embed_dim;
        p.conv.weights.push_back(
            glorot(rng, {config.filters_per_kernel, fan_in}, fan_in, config.filters_per_kernel));
        p.conv.biases.push_back(Tensor::zeros({config.filters_per_kernel}));
    }

    const int conv_channels = config.conv_channels();
    p.gru = init_gru(rng, conv_channels, config.gru_hidden, config.gru_bias);
    if (config.bidirectional_gru) {
        p.gru_back = init_gru(rng, conv_channels, config.gru_hidden, config.gru_bias);
        p.gru_proj = glorot(rng, {2 * config.gru_hidden, config.gru_hidden}, 2 * config.gru_hidden,
                            config.gru_hidden);
    }

    const int h = config.gru_hidden;
    p.mha.heads = config.heads;
    p.mha.W_q = glorot(rng, {h, h}, h, h);
    p.mha.W_k = glorot(rng, {h, h}, h, h);
    p.mha.W_v = glorot(rng, {h, h}, h, h);
    p.mha.W_o = glorot(rng, {h, h}, h, h);

    p.gcn.use_bias = config.gcn_bias;
    p.gcn.W_f = glorot(rng, {config.embed_dim, config.gcn_hidden}, config.embed_dim, config.gcn_hidden);
    p.gcn.W_b = glorot(rng, {config.embed_dim, config.gcn_hidden}, config.embed_dim, config.gcn_hidden);
    if (config.gcn_bias) {
        p.gcn.b_f = Tensor::zeros({config.gcn_hidden});
        p.gcn.b_b = Tensor::zeros({config.gcn_hidden});
    }

    const int fusion = config.fusion_width();
    p.head_w = glorot(rng, {fusion, 2}, fusion, 2);
    p.head_b = Tensor::zeros({2});

    p.set_requires_grad(true);
    return p;
}

Tensor fuse(Tape& tape, const Tensor& h_attn, const Tensor& h_gcn) {
    return concat_vec(tape, {h_attn, h_gcn});
}

ForwardResult forward(Tape& tape, const EncodedExample& example, const Adjacency& adj,
                      const ModelParams& params, const RunConfig& config, bool training, Rng& rng) {
    if (example.true_len < 1) throw ContractError("forward: example has no valid positions");
    if (adj.matrix.rows() != static_cast<int>(example.ids.size())) {
        throw DimensionError("forward: adjacency " + adj.matrix.shape_str() + " does not match sequence length " +
                             std::to_string(example.ids.size()));
    }

    // Valid positions are always the prefix [0, true_len), and PAD rows of
    // every operand are zero, so computing on the prefix is exact and the
    // per-example cost scales with the true length rather than max_len.
    const int n = example.true_len;
    const int L = static_cast<int>(example.ids.size());
    std::vector<int> ids(example.ids.begin(), example.ids.begin() + n);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 1);

    std::vector<double> block(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            block[static_cast<std::size_t>(i) * n + j] = adj.matrix.at(static_cast<std::size_t>(i) * L + j);
    Adjacency sub{Tensor({n, n}, std::move(block)), mask, adj.window, adj.mode};

    Tensor embedded = embedding_lookup(tape, params.embedding, ids);

    // semantic path
    Tensor conv_out = conv_bank(tape, embedded, params.conv);
    Tensor gru_out = gru_forward(tape, conv_out, mask, params.gru,
                                 params.gru_back ? &*params.gru_back : nullptr);
    if (params.gru_proj) gru_out = matmul(tape, gru_out, *params.gru_proj);
    Tensor attn = multi_head_attention(tape, gru_out, mask, params.mha);
    Tensor h_attn = masked_mean_pool(tape, attn, mask);

    // structural path
    Tensor node_embeddings =
        params.embedding_gcn ? embedding_lookup(tape, *params.embedding_gcn, ids) : embedded;
    Tensor gcn_out = bigcn_forward(tape, node_embeddings, sub, params.gcn);
    Tensor h_gcn = graph_mean_pool(tape, gcn_out, mask);

    Tensor h_final = fuse(tape, h_attn, h_gcn);
    Tensor h_drop = dropout(tape, h_final, config.dropout, training, rng);

    Tensor logits = add(tape, matmul(tape, stack_rows(tape, {h_drop}), params.head_w), params.head_b);
    Tensor probs = softmax_rows(tape, logits);

    ForwardResult result;
    result.probs = probs;
    result.loss = pick_neg_log(tape, probs, example.label);
    result.pred = probs.at(1) > probs.at(0) ? 1 : 0;
    return result;
}

}  // namespace ragat
