#include <doctest.h>

#include <cmath>

#include "ragat/gradcheck.hpp"
#include "ragat/ops.hpp"

#include "test_util.hpp"

using namespace ragat;
using testutil::random_tensor;

namespace {

// Independent triple-loop matmul oracle.
std::vector<double> matmul_oracle(const Tensor& a, const Tensor& b) {
    const int m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int p = 0; p < k; ++p) out[static_cast<std::size_t>(i) * n + j] += a.at(i, p) * b.at(p, j);
    return out;
}

}  // namespace

TEST_CASE("matmul identity and hand cases") {
    Tape tape;
    Tensor eye({2, 2}, {1, 0, 0, 1});
    Tensor b({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor out = matmul(tape, eye, b);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(out.at(i) == b.at(i));

    Tensor a({2, 2}, {1, 2, 3, 4});
    Tensor c({2, 1}, {5, 6});
    Tensor prod = matmul(tape, a, c);
    CHECK(prod.at(0) == doctest::Approx(17.0));
    CHECK(prod.at(1) == doctest::Approx(39.0));
}

TEST_CASE("matmul matches triple-loop oracle on random inputs") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 1 + static_cast<int>(rng.next_below(8));
        const int k = 1 + static_cast<int>(rng.next_below(8));
        const int n = 1 + static_cast<int>(rng.next_below(8));
        Tensor a = random_tensor(rng, {m, k});
        Tensor b = random_tensor(rng, {k, n});
        Tape tape;
        Tensor out = matmul(tape, a, b);
        CHECK(testutil::max_abs_diff(out, matmul_oracle(a, b)) < 1e-12);
    }
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tape tape;
    Tensor a({2, 3}, std::vector<double>(6, 0.0));
    Tensor b({2, 2}, std::vector<double>(4, 0.0));
    CHECK_THROWS_WITH_AS(matmul(tape, a, b), doctest::Contains("(2x3)"), DimensionError);
}

TEST_CASE("elementwise basics") {
    Tape tape;
    Tensor x({3}, {-1, 0, 2});
    Tensor r = relu(tape, x);
    CHECK(r.at(0) == 0.0);
    CHECK(r.at(1) == 0.0);
    CHECK(r.at(2) == 2.0);

    CHECK(sigmoid(tape, Tensor::scalar(0.0)).at(0) == doctest::Approx(0.5));

    // high-precision tanh reference values
    const double xs[5] = {-2, -1, 0, 1, 2};
    const double refs[5] = {-0.96402758007581688, -0.76159415595576488, 0.0, 0.76159415595576488,
                            0.96402758007581688};
    Tensor t = tanh_act(tape, Tensor({5}, std::vector<double>(xs, xs + 5)));
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(t.at(static_cast<std::size_t>(i)) - refs[i]) < 1e-12);
}

TEST_CASE("elementwise broadcast and dispatch") {
    Tape tape;
    Tensor a({2, 2}, {1, 2, 3, 4});
    Tensor bias({2}, {10, 20});
    Tensor out = elementwise(tape, EwOp::Add, a, bias);
    CHECK(out.at(0, 0) == 11);
    CHECK(out.at(0, 1) == 22);
    CHECK(out.at(1, 0) == 13);
    CHECK(out.at(1, 1) == 24);

    Tensor bad({3}, {1, 2, 3});
    CHECK_THROWS_AS(add(tape, a, bad), DimensionError);
    CHECK_THROWS_AS(elementwise(tape, EwOp::Relu, a, bias), ContractError);
    CHECK_THROWS_AS(elementwise(tape, EwOp::Mul, a), ContractError);
}

TEST_CASE("softmax_rows stability and oracle") {
    Tape tape;
    Tensor uniform = softmax_rows(tape, Tensor({3}, {0, 0, 0}));
    for (int i = 0; i < 3; ++i) CHECK(uniform.at(static_cast<std::size_t>(i)) == doctest::Approx(1.0 / 3));

    Tensor big = softmax_rows(tape, Tensor({2}, {1000, 1000}));
    CHECK(big.at(0) == doctest::Approx(0.5));
    CHECK(testutil::all_finite(big));

    // brute-force exp/sum oracle computed with long double
    Tensor probs = softmax_rows(tape, Tensor({3}, {1, 2, 3}));
    long double denom = expl(1.0L) + expl(2.0L) + expl(3.0L);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(probs.at(static_cast<std::size_t>(i)) -
                        static_cast<double>(expl(1.0L + i) / denom)) < 1e-12);
    }
}

TEST_CASE("softmax rows sum to one for large-magnitude inputs") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor x = random_tensor(rng, {4, 5}, -1e3, 1e3);
        Tape tape;
        Tensor y = softmax_rows(tape, x);
        REQUIRE(testutil::all_finite(y));
        for (int i = 0; i < 4; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 5; ++j) sum += y.at(i, j);
            CHECK(std::fabs(sum - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("reduce max/mean/sum") {
    Tape tape;
    Tensor v({3}, {-1, 3, 2});
    CHECK(reduce(tape, ReduceOp::Max, v, 0).at(0) == 3.0);

    Tensor m({2, 2}, {1, 3, 3, 5});
    Tensor col_means = reduce(tape, ReduceOp::Mean, m, 0);
    CHECK(col_means.at(0) == doctest::Approx(2.0));
    CHECK(col_means.at(1) == doctest::Approx(4.0));

    CHECK_THROWS_AS(reduce(tape, ReduceOp::Sum, m, 2), DimensionError);
}

TEST_CASE("sum backward is all ones (finite-difference verified)") {
    Rng rng(3);
    Tensor x = random_tensor(rng, {2, 3}, -1, 1, /*requires_grad=*/true);
    auto f = [&](Tape& tape) { return reduce(tape, ReduceOp::Sum, reduce(tape, ReduceOp::Sum, x, 0), 0); };
    CHECK(grad_check(f, {x}, 1e-5) < 1e-8);

    x.zero_grad();
    Tape tape;
    tape.backward(f(tape));
    for (double g : x.grad()) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("reduce max backward routes to first maximal element") {
    Tensor x({3}, {2, 5, 5}, /*requires_grad=*/true);
    Tape tape;
    tape.backward(reduce(tape, ReduceOp::Max, x, 0));
    CHECK(x.grad()[0] == 0.0);
    CHECK(x.grad()[1] == 1.0);  // first of the tied maxima
    CHECK(x.grad()[2] == 0.0);
}

TEST_CASE("backward linear and quadratic cases") {
    {
        Tensor w({3}, {1, 2, 3}, true);
        Tape tape;
        tape.backward(reduce(tape, ReduceOp::Sum, w, 0));
        for (double g : w.grad()) CHECK(g == 1.0);
    }
    {
        Tensor w({2}, {1, 2}, true);
        Tape tape;
        tape.backward(reduce(tape, ReduceOp::Sum, mul(tape, w, w), 0));
        CHECK(w.grad()[0] == doctest::Approx(2.0));
        CHECK(w.grad()[1] == doctest::Approx(4.0));
    }
}

TEST_CASE("backward accumulates across fan-out") {
    Tensor x({2}, {1.5, -0.5}, true);
    Tape tape;
    // y = sum(x) + sum(x*x): grad = 1 + 2x
    Tensor y = add(tape, reduce(tape, ReduceOp::Sum, x, 0), reduce(tape, ReduceOp::Sum, mul(tape, x, x), 0));
    tape.backward(y);
    CHECK(x.grad()[0] == doctest::Approx(1.0 + 2.0 * 1.5));
    CHECK(x.grad()[1] == doctest::Approx(1.0 + 2.0 * -0.5));
}

TEST_CASE("backward contract errors") {
    Tensor x({2}, {1, 2}, true);
    Tape tape;
    Tensor y = mul(tape, x, x);
    CHECK_THROWS_AS(tape.backward(y), ContractError);  // non-scalar loss

    Tape tape2;
    Tensor loss = reduce(tape2, ReduceOp::Sum, mul(tape2, x, x), 0);
    tape2.backward(loss);
    CHECK_THROWS_AS(tape2.backward(loss), StateError);  // consumed tape
}

TEST_CASE("grad_check exact linear case") {
    Tensor w({4}, {1, -2, 3, 0.5}, true);
    auto f = [&](Tape& tape) { return reduce(tape, ReduceOp::Sum, w, 0); };
    CHECK(grad_check(f, {w}, 1e-5) <= 1e-10);
}

TEST_CASE("grad_check one-layer softmax cross-entropy") {
    Rng rng(17);
    Tensor w = random_tensor(rng, {3, 4}, -0.5, 0.5, true);
    Tensor x = random_tensor(rng, {1, 3});
    auto f = [&](Tape& tape) {
        Tensor probs = softmax_rows(tape, matmul(tape, x, w));
        return pick_neg_log(tape, probs, 2);
    };
    CHECK(grad_check(f, {w}, 1e-5) < 1e-6);
}

TEST_CASE("grad_check over mixed op composition at small extents") {
    Rng rng(23);
    Tensor a = random_tensor(rng, {4, 5}, -1, 1, true);
    Tensor b = random_tensor(rng, {5, 3}, -1, 1, true);
    Tensor bias = random_tensor(rng, {3}, -1, 1, true);
    std::vector<std::uint8_t> mask = {1, 1, 0, 1};
    auto f = [&](Tape& tape) {
        Tensor h = tanh_act(tape, add(tape, matmul(tape, a, b), bias));
        Tensor s = softmax_rows(tape, h);
        Tensor pooled = masked_mean_rows(tape, s, mask);
        Tensor mx = masked_max_pool(tape, relu(tape, h), mask);
        return reduce(tape, ReduceOp::Sum, mul(tape, pooled, mx), 0);
    };
    CHECK(grad_check(f, {a, b, bias}, 1e-5) < 1e-4);
}

TEST_CASE("no public op emits NaN or Inf for large finite inputs") {
    Rng rng(29);
    Tensor x = random_tensor(rng, {3, 3}, -1e6, 1e6);
    Tape tape;
    CHECK(testutil::all_finite(sigmoid(tape, x)));
    CHECK(testutil::all_finite(tanh_act(tape, x)));
    CHECK(testutil::all_finite(relu(tape, x)));
    CHECK(testutil::all_finite(softmax_rows(tape, x)));
    CHECK(testutil::all_finite(matmul(tape, x, x)));
}

TEST_CASE("masked pooling ops") {
    Tape tape;
    Tensor h({2, 1}, {5, 9});
    std::vector<std::uint8_t> mask = {1, 0};
    CHECK(masked_max_pool(tape, h, mask).at(0) == 5.0);

    std::vector<std::uint8_t> none = {0, 0};
    CHECK_THROWS_AS(masked_max_pool(tape, h, none), ContractError);
    CHECK_THROWS_AS(masked_mean_rows(tape, h, none), ContractError);
}

TEST_CASE("dropout contract") {
    Rng rng(31);
    Tensor x({4}, {1, 2, 3, 4});
    Tape tape;
    // p = 0 and inference mode are identities
    CHECK(dropout(tape, x, 0.0, true, rng).same_storage(x));
    CHECK(dropout(tape, x, 0.5, false, rng).same_storage(x));
    CHECK_THROWS_AS(dropout(tape, x, 1.0, true, rng), ValueError);

    // Monte-Carlo expectation: mean of dropped scalar stays near the input
    double sum = 0.0;
    const int trials = 100000;
    Tensor unit = Tensor::scalar(1.0);
    for (int i = 0; i < trials; ++i) {
        Tape t;
        sum += dropout(t, unit, 0.5, true, rng).at(0);
    }
    CHECK(std::fabs(sum / trials - 1.0) < 0.02);
}
