#pragma once

#include <string>

#include "ragat/tensor.hpp"
#include "ragat/textdata.hpp"

namespace ragat {

enum class AdjacencyMode { Raw, RowNorm };

AdjacencyMode adjacency_mode_from_string(const std::string& s);
std::string to_string(AdjacencyMode mode);

// Per-sentence directed co-occurrence adjacency over token positions.
// Rows and columns at masked positions are identically zero.
struct Adjacency {
    Tensor matrix;                    // L x L, non-negative
    std::vector<std::uint8_t> valid;  // copy of the example mask
    int window = 0;
    AdjacencyMode mode = AdjacencyMode::Raw;
};

// Directed edge i -> j for valid positions i < j with j - i < window.
// Edges follow word order, so the transpose carries the reverse relation.
Adjacency build_cooccurrence(const EncodedExample& example, int window);

// Raw mode returns the input unchanged. Row-norm adds self-loops on valid
// positions then divides each row by its sum (zero rows stay zero).
Adjacency normalize(const Adjacency& adj, AdjacencyMode mode);

}  // namespace ragat
