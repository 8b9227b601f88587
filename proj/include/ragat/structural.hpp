#pragma once

#include <cstdint>
#include <vector>

#include "ragat/cograph.hpp"
#include "ragat/ops.hpp"
#include "ragat/tensor.hpp"

namespace ragat {

struct BigcnParams {
    Tensor W_f, W_b;  // d x g, forward / backward propagation
    Tensor b_f, b_b;  // length g, unused when use_bias is false
    bool use_bias = false;
};

// H^f = ReLU(A X W^f), H^b = ReLU(A^T X W^b), output [H^f ; H^b] (L x 2g).
// Row i of A selects node i's out-neighbors.
Tensor bigcn_forward(Tape& tape, const Tensor& node_embeddings, const Adjacency& adj,
                     const BigcnParams& params);

// Mean of rows at valid positions; produces the pooled structural vector.
Tensor graph_mean_pool(Tape& tape, const Tensor& hidden, const std::vector<std::uint8_t>& mask);

}  // namespace ragat
