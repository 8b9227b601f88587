#pragma once

#include <cstdint>
#include <vector>

#include "ragat/ops.hpp"
#include "ragat/tensor.hpp"

namespace ragat {

// Parallel convolution filters over the embedding sequence, one weight/bias
// pair per kernel size. Weights are F x (k*d), flattened window-major.
struct ConvBankParams {
    std::vector<int> kernel_sizes;
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
};

struct GruParams {
    Tensor W_z, W_r, W_h;  // input -> hidden, C x h
    Tensor U_z, U_r, U_h;  // hidden -> hidden, h x h
    Tensor b_z, b_r, b_h;  // length h, unused when use_bias is false
    bool use_bias = true;
};

struct MhaParams {
    Tensor W_q, W_k, W_v;  // d x d, column-partitioned into heads
    Tensor W_o;            // d x d output projection
    int heads = 1;
};

// ReLU(conv + bias) per kernel size with same padding, channel-concatenated.
// E is L x d; output is L x (F * |kernel_sizes|).
Tensor conv_bank(Tape& tape, const Tensor& embeddings, const ConvBankParams& params);

// Per-channel max over valid positions; the standalone TextCNN head.
Tensor global_max_pool(Tape& tape, const Tensor& feature_maps, const std::vector<std::uint8_t>& mask);

// One GRU step: x_t is 1 x C, h_prev is 1 x h.
Tensor gru_cell(Tape& tape, const Tensor& x_t, const Tensor& h_prev, const GruParams& params);

// Left-to-right recurrence from h0 = 0. Masked positions carry h_prev
// forward and emit zero rows. When `backward_params` is given, a
// right-to-left pass runs with those parameters and the per-position
// outputs are concatenated (L x 2h).
Tensor gru_forward(Tape& tape, const Tensor& seq, const std::vector<std::uint8_t>& mask,
                   const GruParams& params, const GruParams* backward_params = nullptr);

// Scaled dot-product attention per head with additive -1e9 key masking;
// masked query rows are zeroed in the output.
Tensor multi_head_attention(Tape& tape, const Tensor& hidden, const std::vector<std::uint8_t>& mask,
                            const MhaParams& params);

// Mean over valid rows; produces the pooled semantic vector.
Tensor masked_mean_pool(Tape& tape, const Tensor& hidden, const std::vector<std::uint8_t>& mask);

}  // namespace ragat
