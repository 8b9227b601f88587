#include "ragat/cograph.hpp"

namespace ragat {

AdjacencyMode adjacency_mode_from_string(const std::string& s) {
    if (s == "raw") return AdjacencyMode::Raw;
    if (s == "row_norm") return AdjacencyMode::RowNorm;
    throw ConfigError("unknown adjacency mode: " + s);
}

std::string to_string(AdjacencyMode mode) { return mode == AdjacencyMode::Raw ? "raw" : "row_norm"; }

Adjacency build_cooccurrence(const EncodedExample& example, int window) {
    if (window < 2) throw ValueError("co-occurrence window must be >= 2, got " + std::to_string(window));
    const int L = static_cast<int>(example.ids.size());

    std::vector<double> m(static_cast<std::size_t>(L) * L, 0.0);
    for (int i = 0; i < L; ++i) {
        if (!example.mask[static_cast<std::size_t>(i)]) continue;
        for (int j = i + 1; j < L && j - i < window; ++j) {
            if (!example.mask[static_cast<std::size_t>(j)]) continue;
            m[static_cast<std::size_t>(i) * L + j] = 1.0;
        }
    }
    Adjacency adj;
    adj.matrix = Tensor({L, L}, std::move(m));
    adj.valid = example.mask;
    adj.window = window;
    adj.mode = AdjacencyMode::Raw;
    return adj;
}

Adjacency normalize(const Adjacency& adj, AdjacencyMode mode) {
    if (mode == AdjacencyMode::Raw) return adj;

    const int L = adj.matrix.rows();
    std::vector<double> m = adj.matrix.values();
    for (int i = 0; i < L; ++i) {
        if (!adj.valid[static_cast<std::size_t>(i)]) continue;
        m[static_cast<std::size_t>(i) * L + i] += 1.0;  // self-loop
        double sum = 0.0;
        for (int j = 0; j < L; ++j) sum += m[static_cast<std::size_t>(i) * L + j];
        if (sum > 0.0) {
            for (int j = 0; j < L; ++j) m[static_cast<std::size_t>(i) * L + j] /= sum;
        }
    }
    Adjacency out;
    out.matrix = Tensor({L, L}, std::move(m));
    out.valid = adj.valid;
    out.window = adj.window;
    out.mode = AdjacencyMode::RowNorm;
    return out;
}

}  // namespace ragat
