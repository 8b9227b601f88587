#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ragat/cograph.hpp"
#include "ragat/config.hpp"
#include "ragat/rng.hpp"
#include "ragat/semantic.hpp"
#include "ragat/structural.hpp"
#include "ragat/textdata.hpp"

namespace ragat {

// Every learnable tensor of the model, addressable by a stable string path.
struct ModelParams {
    Tensor embedding;                       // V x d, row 0 (PAD) pinned to zero
    std::optional<Tensor> embedding_gcn;    // separate table when not shared
    ConvBankParams conv;
    GruParams gru;
    std::optional<GruParams> gru_back;      // bidirectional only
    std::optional<Tensor> gru_proj;         // 2h x h, bidirectional only
    MhaParams mha;
    BigcnParams gcn;
    Tensor head_w;                          // fusion x 2
    Tensor head_b;                          // 2

    // (name, tensor) pairs in a fixed, documented order. The order defines
    // both the initialization draw sequence and the checkpoint layout.
    std::vector<std::pair<std::string, Tensor>> named_entries() const;

    void set_requires_grad(bool rq);
    void zero_grads();

    // Deep copy with fresh storage (named_entries of the copy do not alias).
    ModelParams clone() const;
};

// Glorot-uniform weights, zero biases, uniform(-0.05, 0.05) embeddings with
// the PAD row fixed at zero. Fully determined by the seed; draws happen in
// named_entries order.
ModelParams init_params(const RunConfig& config, int vocab_size, std::uint64_t seed);

// Concatenation, semantic part first.
Tensor fuse(Tape& tape, const Tensor& h_attn, const Tensor& h_gcn);

struct ForwardResult {
    Tensor probs;  // length 2
    Tensor loss;   // scalar, -log(probs[label]) with 1e-12 clamp
    int pred = 0;  // argmax, ties toward class 0
};

// Full dual-path forward pass for one example. `rng` drives dropout and is
// only consumed in training mode.
ForwardResult forward(Tape& tape, const EncodedExample& example, const Adjacency& adj,
                      const ModelParams& params, const RunConfig& config, bool training, Rng& rng);

}  // namespace ragat
