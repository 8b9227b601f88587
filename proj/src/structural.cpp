#include "ragat/structural.hpp"

namespace ragat {

Tensor bigcn_forward(Tape& tape, const Tensor& node_embeddings, const Adjacency& adj,
                     const BigcnParams& params) {
    if (node_embeddings.ndim() != 2) throw DimensionError("bigcn_forward requires 2-d node embeddings");
    if (adj.matrix.rows() != node_embeddings.rows()) {
        throw DimensionError("bigcn_forward: adjacency " + adj.matrix.shape_str() +
                             " does not match node count " + std::to_string(node_embeddings.rows()));
    }

    auto branch = [&](const Tensor& a, const Tensor& w, const Tensor& b) {
        Tensor propagated = matmul(tape, matmul(tape, a, node_embeddings), w);
        if (params.use_bias) propagated = add(tape, propagated, b);
        return relu(tape, propagated);
    };
    Tensor h_fwd = branch(adj.matrix, params.W_f, params.b_f);
    Tensor h_bwd = branch(transpose(tape, adj.matrix), params.W_b, params.b_b);
    return concat_cols(tape, {h_fwd, h_bwd});
}

Tensor graph_mean_pool(Tape& tape, const Tensor& hidden, const std::vector<std::uint8_t>& mask) {
    return masked_mean_rows(tape, hidden, mask);
}

}  // namespace ragat
