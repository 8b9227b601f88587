#include <doctest.h>

#include <set>
#include <utility>

#include "ragat/cograph.hpp"
#include "ragat/rng.hpp"

using namespace ragat;

namespace {

EncodedExample make_example(int true_len, int max_len) {
    EncodedExample e;
    e.true_len = true_len;
    e.ids.assign(static_cast<std::size_t>(max_len), Vocabulary::kPadId);
    e.mask.assign(static_cast<std::size_t>(max_len), 0);
    for (int i = 0; i < true_len; ++i) {
        e.ids[static_cast<std::size_t>(i)] = Vocabulary::kUnkId;
        e.mask[static_cast<std::size_t>(i)] = 1;
    }
    return e;
}

std::set<std::pair<int, int>> edge_set(const Adjacency& adj) {
    std::set<std::pair<int, int>> edges;
    const int L = adj.matrix.rows();
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            if (adj.matrix.at(i, j) != 0.0) edges.insert({i, j});
    return edges;
}

}  // namespace

TEST_CASE("window-2 and window-3 edges by pair enumeration") {
    EncodedExample e = make_example(4, 6);
    CHECK(edge_set(build_cooccurrence(e, 2)) ==
          std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
    CHECK(edge_set(build_cooccurrence(e, 3)) ==
          std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {0, 2}, {1, 3}});
}

TEST_CASE("single valid token yields zero matrix") {
    EncodedExample e = make_example(1, 4);
    Adjacency adj = build_cooccurrence(e, 3);
    for (double v : adj.matrix.values()) CHECK(v == 0.0);
}

TEST_CASE("window below 2 rejected") {
    EncodedExample e = make_example(3, 4);
    CHECK_THROWS_AS(build_cooccurrence(e, 1), ValueError);
}

TEST_CASE("adjacency predicate holds for random sentences (exhaustive pairs)") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const int max_len = 1 + static_cast<int>(rng.next_below(16));
        const int true_len = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_len)));
        const int window = 2 + static_cast<int>(rng.next_below(4));
        EncodedExample e = make_example(true_len, max_len);
        Adjacency adj = build_cooccurrence(e, window);
        for (int i = 0; i < max_len; ++i) {
            for (int j = 0; j < max_len; ++j) {
                const bool expected = e.mask[static_cast<std::size_t>(i)] &&
                                      e.mask[static_cast<std::size_t>(j)] && j > i && j - i < window;
                CHECK(adj.matrix.at(i, j) == (expected ? 1.0 : 0.0));
            }
        }
    }
}

TEST_CASE("masked rows and columns are identically zero") {
    EncodedExample e = make_example(3, 8);
    for (auto mode : {AdjacencyMode::Raw, AdjacencyMode::RowNorm}) {
        Adjacency adj = normalize(build_cooccurrence(e, 3), mode);
        for (int i = 3; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                CHECK(adj.matrix.at(i, j) == 0.0);
                CHECK(adj.matrix.at(j, i) == 0.0);
            }
        }
    }
}

TEST_CASE("transpose carries the backward-edge relation") {
    EncodedExample e = make_example(5, 5);
    Adjacency adj = build_cooccurrence(e, 3);
    const int L = 5;
    int diff = 0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            // transposed entry is 1 exactly when j precedes i within the window
            const bool backward = i > j && i - j < 3;
            CHECK(adj.matrix.at(j, i) == (backward ? 1.0 : 0.0));
            if (adj.matrix.at(i, j) != adj.matrix.at(j, i)) ++diff;
        }
    CHECK(diff > 0);  // A != A^T for true_len >= 2
}

TEST_CASE("normalize raw is identity, row_norm rows sum to 1") {
    EncodedExample e = make_example(4, 4);
    Adjacency raw = build_cooccurrence(e, 2);
    Adjacency same = normalize(raw, AdjacencyMode::Raw);
    CHECK(same.matrix.values() == raw.matrix.values());

    Adjacency rn = normalize(raw, AdjacencyMode::RowNorm);
    // hand computation: rows 0..2 have self-loop + one forward edge, row 3 self-loop only
    for (int i = 0; i < 4; ++i) {
        double sum = 0.0;
        for (int j = 0; j < 4; ++j) sum += rn.matrix.at(i, j);
        CHECK(sum == doctest::Approx(1.0));
    }
    CHECK(rn.matrix.at(0, 0) == doctest::Approx(0.5));
    CHECK(rn.matrix.at(0, 1) == doctest::Approx(0.5));
    CHECK(rn.matrix.at(3, 3) == doctest::Approx(1.0));
}

TEST_CASE("row_norm of single valid node is a pure self-loop") {
    EncodedExample e = make_example(1, 3);
    Adjacency rn = normalize(build_cooccurrence(e, 2), AdjacencyMode::RowNorm);
    CHECK(rn.matrix.at(0, 0) == 1.0);
    for (std::size_t i = 1; i < rn.matrix.size(); ++i) CHECK(rn.matrix.at(i) == 0.0);
}
