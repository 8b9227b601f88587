#include "ragat/semantic.hpp"

#include <cmath>

namespace ragat {

Tensor conv_bank(Tape& tape, const Tensor& embeddings, const ConvBankParams& params) {
    if (params.kernel_sizes.empty()) throw ContractError("conv_bank: no kernel sizes configured");
    if (params.weights.size() != params.kernel_sizes.size() ||
        params.biases.size() != params.kernel_sizes.size()) {
        throw ContractError("conv_bank: parameter count does not match kernel sizes");
    }
    std::vector<Tensor> maps;
    maps.reserve(params.kernel_sizes.size());
    for (std::size_t i = 0; i < params.kernel_sizes.size(); ++i) {
        Tensor lin = conv1d_same(tape, embeddings, params.weights[i], params.biases[i],
                                 params.kernel_sizes[i]);
        maps.push_back(relu(tape, lin));
    }
    return maps.size() == 1 ? maps.front() : concat_cols(tape, maps);
}

Tensor global_max_pool(Tape& tape, const Tensor& feature_maps, const std::vector<std::uint8_t>& mask) {
    return masked_max_pool(tape, feature_maps, mask);
}

Tensor gru_cell(Tape& tape, const Tensor& x_t, const Tensor& h_prev, const GruParams& params) {
    auto gate_input = [&](const Tensor& W, const Tensor& U, const Tensor& b) {
        Tensor s = add(tape, matmul(tape, x_t, W), matmul(tape, h_prev, U));
        return params.use_bias ? add(tape, s, b) : s;
    };
    Tensor z = sigmoid(tape, gate_input(params.W_z, params.U_z, params.b_z));
    Tensor r = sigmoid(tape, gate_input(params.W_r, params.U_r, params.b_r));

    Tensor gated_prev = mul(tape, r, h_prev);
    Tensor cand_in = add(tape, matmul(tape, x_t, params.W_h), matmul(tape, gated_prev, params.U_h));
    if (params.use_bias) cand_in = add(tape, cand_in, params.b_h);
    Tensor h_cand = tanh_act(tape, cand_in);

    Tensor one_minus_z = sub(tape, Tensor(z.shape(), std::vector<double>(z.size(), 1.0)), z);
    return add(tape, mul(tape, one_minus_z, h_prev), mul(tape, z, h_cand));
}

namespace {

Tensor gru_direction(Tape& tape, const Tensor& seq, const std::vector<std::uint8_t>& mask,
                     const GruParams& params, bool reversed) {
    const int L = seq.rows();
    const int h = params.U_z.cols();
    Tensor zero_row = Tensor::zeros({1, h});
    Tensor hidden = zero_row;
    std::vector<Tensor> out_rows(static_cast<std::size_t>(L), zero_row);
    for (int step = 0; step < L; ++step) {
        const int t = reversed ? L - 1 - step : step;
        if (!mask[static_cast<std::size_t>(t)]) continue;  // emit zeros, carry hidden
        hidden = gru_cell(tape, row(tape, seq, t), hidden, params);
        out_rows[static_cast<std::size_t>(t)] = hidden;
    }
    return stack_rows(tape, out_rows);
}

}  // namespace

Tensor gru_forward(Tape& tape, const Tensor& seq, const std::vector<std::uint8_t>& mask,
                   const GruParams& params, const GruParams* backward_params) {
    if (seq.ndim() != 2) throw DimensionError("gru_forward requires a 2-d sequence, got " + seq.shape_str());
    if (mask.size() != static_cast<std::size_t>(seq.rows())) {
        throw DimensionError("gru_forward: mask length does not match sequence length");
    }
    Tensor fwd = gru_direction(tape, seq, mask, params, /*reversed=*/false);
    if (!backward_params) return fwd;
    Tensor bwd = gru_direction(tape, seq, mask, *backward_params, /*reversed=*/true);
    return concat_cols(tape, {fwd, bwd});
}

Tensor multi_head_attention(Tape& tape, const Tensor& hidden, const std::vector<std::uint8_t>& mask,
                            const MhaParams& params) {
    if (hidden.ndim() != 2) throw DimensionError("multi_head_attention requires 2-d input");
    const int L = hidden.rows(), d = hidden.cols();
    if (params.heads < 1 || d % params.heads != 0) {
        throw ConfigError("attention width " + std::to_string(d) + " not divisible by heads " +
                          std::to_string(params.heads));
    }
    if (mask.size() != static_cast<std::size_t>(L)) {
        throw DimensionError("multi_head_attention: mask length does not match L");
    }
    const int dk = d / params.heads;
    const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

    // Additive mask: -1e9 on every masked key column.
    std::vector<double> km(static_cast<std::size_t>(L) * L, 0.0);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            if (!mask[static_cast<std::size_t>(j)]) km[static_cast<std::size_t>(i) * L + j] = -1e9;
    Tensor key_mask({L, L}, std::move(km));

    std::vector<Tensor> head_outputs;
    head_outputs.reserve(static_cast<std::size_t>(params.heads));
    for (int head = 0; head < params.heads; ++head) {
        const int c0 = head * dk, c1 = c0 + dk;
        Tensor q = matmul(tape, hidden, slice_cols(tape, params.W_q, c0, c1));
        Tensor k = matmul(tape, hidden, slice_cols(tape, params.W_k, c0, c1));
        Tensor v = matmul(tape, hidden, slice_cols(tape, params.W_v, c0, c1));
        Tensor scores = scale(tape, matmul(tape, q, transpose(tape, k)), inv_sqrt_dk);
        Tensor weights = softmax_rows(tape, add(tape, scores, key_mask));
        head_outputs.push_back(matmul(tape, weights, v));
    }
    Tensor concat = head_outputs.size() == 1 ? head_outputs.front() : concat_cols(tape, head_outputs);
    Tensor projected = matmul(tape, concat, params.W_o);
    return zero_masked_rows(tape, projected, mask);
}

Tensor masked_mean_pool(Tape& tape, const Tensor& hidden, const std::vector<std::uint8_t>& mask) {
    return masked_mean_rows(tape, hidden, mask);
}

}  // namespace ragat
