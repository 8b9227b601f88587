#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ragat/rng.hpp"
#include "ragat/tensor.hpp"

namespace ragat {

// Tape-recorded primitives. Every op returns a fresh tensor and, when any
// input requires grad, pushes a backward rule onto the tape. Binary
// elementwise ops accept identical shapes or a trailing-vector right operand
// (bias-style broadcast over the last axis).

enum class EwOp { Relu, Sigmoid, Tanh, Add, Mul, Sub };
enum class ReduceOp { Max, Mean, Sum };

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor relu(Tape& tape, const Tensor& x);
Tensor sigmoid(Tape& tape, const Tensor& x);
Tensor tanh_act(Tape& tape, const Tensor& x);

// Enum-dispatch façade over the named elementwise ops.
Tensor elementwise(Tape& tape, EwOp op, const Tensor& a,
                   const std::optional<Tensor>& b = std::nullopt);

Tensor softmax_rows(Tape& tape, const Tensor& x);

// Reduction along an axis of a 1-d or 2-d tensor. For 2-d input, axis 0
// collapses rows (output length = cols), axis 1 collapses columns. Max
// routes its gradient to the first maximal element per slice.
Tensor reduce(Tape& tape, ReduceOp op, const Tensor& x, int axis);

Tensor transpose(Tape& tape, const Tensor& x);
Tensor scale(Tape& tape, const Tensor& x, double s);

// Row i of a 2-d tensor as a 1 x n tensor.
Tensor row(Tape& tape, const Tensor& x, int i);
// Columns [c0, c1) of a 2-d tensor.
Tensor slice_cols(Tape& tape, const Tensor& x, int c0, int c1);
// Horizontal concatenation of 2-d tensors with equal row counts.
Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts);
// Stack 1 x n (or length-n) tensors into an m x n matrix.
Tensor stack_rows(Tape& tape, const std::vector<Tensor>& rows);
// Concatenate 1-d tensors into one vector.
Tensor concat_vec(Tape& tape, const std::vector<Tensor>& parts);

// Same-padded 1-d convolution over a token-embedding matrix. E is L x d,
// weights are F x (k*d) (filter f's window flattened row-major), bias is
// length F. Output is L x F; the window for output position i starts at
// i - (k-1)/2 with zero padding outside [0, L).
Tensor conv1d_same(Tape& tape, const Tensor& embeddings, const Tensor& weights,
                   const Tensor& bias, int kernel_size);

// Gather rows of a V x d table by id; backward scatters into the table grad.
Tensor embedding_lookup(Tape& tape, const Tensor& table, const std::vector<int>& ids);

// Per-channel max over rows where mask[i] == 1. Errors if no row is valid.
Tensor masked_max_pool(Tape& tape, const Tensor& features, const std::vector<std::uint8_t>& mask);
// Mean of rows where mask[i] == 1. Errors if no row is valid.
Tensor masked_mean_rows(Tape& tape, const Tensor& features, const std::vector<std::uint8_t>& mask);
// Zero out rows where mask[i] == 0.
Tensor zero_masked_rows(Tape& tape, const Tensor& features, const std::vector<std::uint8_t>& mask);

// -log(probs[idx]) with probs clamped to >= 1e-12 before the log.
Tensor pick_neg_log(Tape& tape, const Tensor& probs, int idx);

// Inverted dropout: training mode zeroes entries with probability p and
// scales survivors by 1/(1-p); inference mode is the identity.
Tensor dropout(Tape& tape, const Tensor& x, double p, bool training, Rng& rng);

}  // namespace ragat
