#include "ragat/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ragat {

namespace {

bool is_vec_like(const Tensor& t) {
    return t.ndim() == 1 || (t.ndim() == 2 && t.shape()[0] == 1);
}

// Resolves binary-op shapes: identical, or one side a trailing vector
// broadcast over the other's last axis.
void resolve_binary(const Tensor& a, const Tensor& b, bool& bcast_a, bool& bcast_b) {
    bcast_a = bcast_b = false;
    if (a.shape() == b.shape()) return;
    if (is_vec_like(b) && !a.shape().empty() &&
        b.size() == static_cast<std::size_t>(a.shape().back())) {
        bcast_b = true;
        return;
    }
    if (is_vec_like(a) && !b.shape().empty() &&
        a.size() == static_cast<std::size_t>(b.shape().back())) {
        bcast_a = true;
        return;
    }
    throw DimensionError("elementwise shapes not broadcastable: " + a.shape_str() + " vs " + b.shape_str());
}

double sigmoid_stable(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// fv: value; dav/dbv: partials wrt a and b at (av, bv).
template <typename F, typename DA, typename DB>
Tensor binary_op(Tape& tape, const Tensor& a, const Tensor& b, F fv, DA dav, DB dbv) {
    bool bcast_a = false, bcast_b = false;
    resolve_binary(a, b, bcast_a, bcast_b);
    const Tensor& big = bcast_a ? b : a;
    std::size_t n = big.size();
    std::size_t last = static_cast<std::size_t>(big.shape().back());

    std::vector<double> out_vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        double av = bcast_a ? a.at(i % last) : a.at(i);
        double bv = bcast_b ? b.at(i % last) : b.at(i);
        out_vals[i] = fv(av, bv);
    }
    Tensor out(big.shape(), std::move(out_vals));

    if (a.requires_grad() || b.requires_grad()) {
        out.set_requires_grad(true);
        Tensor a_cap = a, b_cap = b, out_cap = out;
        if (a.requires_grad()) a_cap.ensure_grad();
        if (b.requires_grad()) b_cap.ensure_grad();
        tape.record([a_cap, b_cap, out_cap, bcast_a, bcast_b, last, n, dav, dbv]() mutable {
            const auto& g = out_cap.grad();
            for (std::size_t i = 0; i < n; ++i) {
                double av = bcast_a ? a_cap.at(i % last) : a_cap.at(i);
                double bv = bcast_b ? b_cap.at(i % last) : b_cap.at(i);
                if (a_cap.requires_grad()) a_cap.grad()[bcast_a ? i % last : i] += dav(av, bv) * g[i];
                if (b_cap.requires_grad()) b_cap.grad()[bcast_b ? i % last : i] += dbv(av, bv) * g[i];
            }
        });
    }
    return out;
}

// fv: value; dv: derivative expressed in terms of (x, y).
template <typename F, typename D>
Tensor unary_op(Tape& tape, const Tensor& x, F fv, D dv) {
    std::vector<double> out_vals(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out_vals[i] = fv(x.at(i));
    Tensor out(x.shape(), std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, dv]() mutable {
            const auto& g = out_cap.grad();
            for (std::size_t i = 0; i < x_cap.size(); ++i) {
                x_cap.grad()[i] += dv(x_cap.at(i), out_cap.at(i)) * g[i];
            }
        });
    }
    return out;
}

void require_2d(const Tensor& t, const char* who) {
    if (t.ndim() != 2) throw DimensionError(std::string(who) + " requires a 2-d tensor, got " + t.shape_str());
}

void check_mask(const Tensor& features, const std::vector<std::uint8_t>& mask, const char* who) {
    require_2d(features, who);
    if (mask.size() != static_cast<std::size_t>(features.rows())) {
        throw DimensionError(std::string(who) + ": mask length " + std::to_string(mask.size()) +
                             " vs rows " + std::to_string(features.rows()));
    }
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul");
    require_2d(b, "matmul");
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul inner dimension mismatch: " + a.shape_str() + " x " + b.shape_str());
    }
    const int m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out_vals(static_cast<std::size_t>(m) * n, 0.0);
    const auto& av = a.values();
    const auto& bv = b.values();
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            const double aip = av[static_cast<std::size_t>(i) * k + p];
            const double* brow = &bv[static_cast<std::size_t>(p) * n];
            double* orow = &out_vals[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) orow[j] += aip * brow[j];
        }
    }
    Tensor out({m, n}, std::move(out_vals));
    if (a.requires_grad() || b.requires_grad()) {
        out.set_requires_grad(true);
        Tensor a_cap = a, b_cap = b, out_cap = out;
        if (a.requires_grad()) a_cap.ensure_grad();
        if (b.requires_grad()) b_cap.ensure_grad();
        tape.record([a_cap, b_cap, out_cap, m, k, n]() mutable {
            const auto& g = out_cap.grad();
            if (a_cap.requires_grad()) {
                // dA = G * B^T
                auto& ga = a_cap.grad();
                const auto& bv2 = b_cap.values();
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const double gij = g[static_cast<std::size_t>(i) * n + j];
                        for (int p = 0; p < k; ++p) {
                            ga[static_cast<std::size_t>(i) * k + p] += gij * bv2[static_cast<std::size_t>(p) * n + j];
                        }
                    }
                }
            }
            if (b_cap.requires_grad()) {
                // dB = A^T * G
                auto& gb = b_cap.grad();
                const auto& av2 = a_cap.values();
                for (int i = 0; i < m; ++i) {
                    for (int p = 0; p < k; ++p) {
                        const double aip = av2[static_cast<std::size_t>(i) * k + p];
                        const double* grow = &g[static_cast<std::size_t>(i) * n];
                        double* gbrow = &gb[static_cast<std::size_t>(p) * n];
                        for (int j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
                    }
                }
            }
        });
    }
    return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    return binary_op(
        tape, a, b, [](double x, double y) { return x + y; },
        [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
    return binary_op(
        tape, a, b, [](double x, double y) { return x - y; },
        [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
    return binary_op(
        tape, a, b, [](double x, double y) { return x * y; },
        [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor relu(Tape& tape, const Tensor& x) {
    return unary_op(
        tape, x, [](double v) { return v > 0.0 ? v : 0.0; },
        [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
    return unary_op(
        tape, x, [](double v) { return sigmoid_stable(v); },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh_act(Tape& tape, const Tensor& x) {
    return unary_op(
        tape, x, [](double v) { return std::tanh(v); },
        [](double, double y) { return 1.0 - y * y; });
}

Tensor elementwise(Tape& tape, EwOp op, const Tensor& a, const std::optional<Tensor>& b) {
    switch (op) {
        case EwOp::Relu:
        case EwOp::Sigmoid:
        case EwOp::Tanh:
            if (b.has_value()) throw ContractError("unary elementwise op given two operands");
            if (op == EwOp::Relu) return relu(tape, a);
            if (op == EwOp::Sigmoid) return sigmoid(tape, a);
            return tanh_act(tape, a);
        case EwOp::Add:
        case EwOp::Mul:
        case EwOp::Sub:
            if (!b.has_value()) throw ContractError("binary elementwise op missing second operand");
            if (op == EwOp::Add) return add(tape, a, *b);
            if (op == EwOp::Mul) return mul(tape, a, *b);
            return sub(tape, a, *b);
    }
    throw ContractError("unknown elementwise op");
}

Tensor softmax_rows(Tape& tape, const Tensor& x) {
    int m, n;
    if (x.ndim() == 1) {
        m = 1;
        n = x.shape()[0];
    } else if (x.ndim() == 2) {
        m = x.rows();
        n = x.cols();
    } else {
        throw DimensionError("softmax_rows requires a 1-d or 2-d tensor, got " + x.shape_str());
    }
    std::vector<double> out_vals(x.size());
    for (int i = 0; i < m; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * n;
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) mx = std::max(mx, x.at(base + j));
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            out_vals[base + j] = std::exp(x.at(base + j) - mx);
            sum += out_vals[base + j];
        }
        for (int j = 0; j < n; ++j) out_vals[base + j] /= sum;
    }
    Tensor out(x.shape(), std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, m, n]() mutable {
            const auto& g = out_cap.grad();
            for (int i = 0; i < m; ++i) {
                const std::size_t base = static_cast<std::size_t>(i) * n;
                double dot = 0.0;
                for (int j = 0; j < n; ++j) dot += g[base + j] * out_cap.at(base + j);
                for (int j = 0; j < n; ++j) {
                    x_cap.grad()[base + j] += out_cap.at(base + j) * (g[base + j] - dot);
                }
            }
        });
    }
    return out;
}

Tensor reduce(Tape& tape, ReduceOp op, const Tensor& x, int axis) {
    int m, n;
    if (x.ndim() == 1) {
        if (axis != 0) throw DimensionError("reduce: axis " + std::to_string(axis) + " invalid for 1-d tensor");
        m = 1;
        n = x.shape()[0];
        axis = 1;  // treat as a single row reduced over its columns
    } else if (x.ndim() == 2) {
        if (axis != 0 && axis != 1) throw DimensionError("reduce: axis " + std::to_string(axis) + " invalid for 2-d tensor");
        m = x.rows();
        n = x.cols();
    } else {
        throw DimensionError("reduce requires a 1-d or 2-d tensor, got " + x.shape_str());
    }

    // Collapse to `slices` independent reductions of length `len`.
    const int slices = (axis == 1) ? m : n;
    const int len = (axis == 1) ? n : m;
    auto idx = [axis, n](int s, int e) -> std::size_t {
        return (axis == 1) ? static_cast<std::size_t>(s) * n + e : static_cast<std::size_t>(e) * n + s;
    };

    std::vector<double> out_vals(slices);
    std::vector<int> argmax(op == ReduceOp::Max ? slices : 0);
    for (int s = 0; s < slices; ++s) {
        if (op == ReduceOp::Max) {
            double best = x.at(idx(s, 0));
            int best_e = 0;
            for (int e = 1; e < len; ++e) {
                double v = x.at(idx(s, e));
                if (v > best) {  // first maximum wins ties
                    best = v;
                    best_e = e;
                }
            }
            out_vals[s] = best;
            argmax[s] = best_e;
        } else {
            double acc = 0.0;
            for (int e = 0; e < len; ++e) acc += x.at(idx(s, e));
            out_vals[s] = (op == ReduceOp::Mean) ? acc / len : acc;
        }
    }
    Tensor out({slices}, std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, op, slices, len, idx, argmax]() mutable {
            const auto& g = out_cap.grad();
            for (int s = 0; s < slices; ++s) {
                if (op == ReduceOp::Max) {
                    x_cap.grad()[idx(s, argmax[s])] += g[s];
                } else {
                    const double share = (op == ReduceOp::Mean) ? g[s] / len : g[s];
                    for (int e = 0; e < len; ++e) x_cap.grad()[idx(s, e)] += share;
                }
            }
        });
    }
    return out;
}

Tensor transpose(Tape& tape, const Tensor& x) {
    require_2d(x, "transpose");
    const int m = x.rows(), n = x.cols();
    std::vector<double> out_vals(x.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out_vals[static_cast<std::size_t>(j) * m + i] = x.at(i, j);
    Tensor out({n, m}, std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, m, n]() mutable {
            const auto& g = out_cap.grad();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    x_cap.grad()[static_cast<std::size_t>(i) * n + j] += g[static_cast<std::size_t>(j) * m + i];
        });
    }
    return out;
}

Tensor scale(Tape& tape, const Tensor& x, double s) {
    return unary_op(
        tape, x, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Tensor row(Tape& tape, const Tensor& x, int i) {
    require_2d(x, "row");
    if (i < 0 || i >= x.rows()) throw DimensionError("row index " + std::to_string(i) + " out of range");
    const int n = x.cols();
    std::vector<double> out_vals(n);
    for (int j = 0; j < n; ++j) out_vals[j] = x.at(i, j);
    Tensor out({1, n}, std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, i, n]() mutable {
            for (int j = 0; j < n; ++j) x_cap.grad()[static_cast<std::size_t>(i) * n + j] += out_cap.grad()[j];
        });
    }
    return out;
}

Tensor slice_cols(Tape& tape, const Tensor& x, int c0, int c1) {
    require_2d(x, "slice_cols");
    if (c0 < 0 || c1 > x.cols() || c0 >= c1) {
        throw DimensionError("slice_cols range [" + std::to_string(c0) + "," + std::to_string(c1) +
                             ") invalid for " + x.shape_str());
    }
    const int m = x.rows(), w = c1 - c0, n = x.cols();
    std::vector<double> out_vals(static_cast<std::size_t>(m) * w);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < w; ++j) out_vals[static_cast<std::size_t>(i) * w + j] = x.at(i, c0 + j);
    Tensor out({m, w}, std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, m, w, n, c0]() mutable {
            const auto& g = out_cap.grad();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < w; ++j)
                    x_cap.grad()[static_cast<std::size_t>(i) * n + c0 + j] += g[static_cast<std::size_t>(i) * w + j];
        });
    }
    return out;
}

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ContractError("concat_cols: no parts");
    const int m = parts.front().rows();
    int total = 0;
    bool any_grad = false;
    for (const auto& p : parts) {
        require_2d(p, "concat_cols");
        if (p.rows() != m) throw DimensionError("concat_cols row mismatch: " + p.shape_str());
        total += p.cols();
        any_grad = any_grad || p.requires_grad();
    }
    std::vector<double> out_vals(static_cast<std::size_t>(m) * total);
    int off = 0;
    for (const auto& p : parts) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < p.cols(); ++j)
                out_vals[static_cast<std::size_t>(i) * total + off + j] = p.at(i, j);
        off += p.cols();
    }
    Tensor out({m, total}, std::move(out_vals));
    if (any_grad) {
        out.set_requires_grad(true);
        std::vector<Tensor> caps = parts;
        for (auto& p : caps)
            if (p.requires_grad()) p.ensure_grad();
        Tensor out_cap = out;
        tape.record([caps, out_cap, m, total]() mutable {
            const auto& g = out_cap.grad();
            int off2 = 0;
            for (auto& p : caps) {
                if (p.requires_grad()) {
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < p.cols(); ++j)
                            p.grad()[static_cast<std::size_t>(i) * p.cols() + j] +=
                                g[static_cast<std::size_t>(i) * total + off2 + j];
                }
                off2 += p.cols();
            }
        });
    }
    return out;
}

Tensor stack_rows(Tape& tape, const std::vector<Tensor>& rows_in) {
    if (rows_in.empty()) throw ContractError("stack_rows: no rows");
    const std::size_t n = rows_in.front().size();
    bool any_grad = false;
    for (const auto& r : rows_in) {
        if (!is_vec_like(r) || r.size() != n) {
            throw DimensionError("stack_rows: row shape " + r.shape_str() + " incompatible");
        }
        any_grad = any_grad || r.requires_grad();
    }
    const int m = static_cast<int>(rows_in.size());
    std::vector<double> out_vals(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out_vals[static_cast<std::size_t>(i) * n + j] = rows_in[i].at(j);
    Tensor out({m, static_cast<int>(n)}, std::move(out_vals));
    if (any_grad) {
        out.set_requires_grad(true);
        std::vector<Tensor> caps = rows_in;
        for (auto& r : caps)
            if (r.requires_grad()) r.ensure_grad();
        Tensor out_cap = out;
        tape.record([caps, out_cap, n]() mutable {
            const auto& g = out_cap.grad();
            for (std::size_t i = 0; i < caps.size(); ++i) {
                if (!caps[i].requires_grad()) continue;
                for (std::size_t j = 0; j < n; ++j) caps[i].grad()[j] += g[i * n + j];
            }
        });
    }
    return out;
}

Tensor concat_vec(Tape& tape, const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ContractError("concat_vec: no parts");
    std::size_t total = 0;
    bool any_grad = false;
    for (const auto& p : parts) {
        if (!is_vec_like(p)) throw DimensionError("concat_vec: part shape " + p.shape_str() + " is not a vector");
        total += p.size();
        any_grad = any_grad || p.requires_grad();
    }
    std::vector<double> out_vals;
    out_vals.reserve(total);
    for (const auto& p : parts) out_vals.insert(out_vals.end(), p.values().begin(), p.values().end());
    Tensor out({static_cast<int>(total)}, std::move(out_vals));
    if (any_grad) {
        out.set_requires_grad(true);
        std::vector<Tensor> caps = parts;
        for (auto& p : caps)
            if (p.requires_grad()) p.ensure_grad();
        Tensor out_cap = out;
        tape.record([caps, out_cap]() mutable {
            const auto& g = out_cap.grad();
            std::size_t off = 0;
            for (auto& p : caps) {
                if (p.requires_grad())
                    for (std::size_t j = 0; j < p.size(); ++j) p.grad()[j] += g[off + j];
                off += p.size();
            }
        });
    }
    return out;
}

Tensor conv1d_same(Tape& tape, const Tensor& embeddings, const Tensor& weights, const Tensor& bias,
                   int kernel_size) {
    require_2d(embeddings, "conv1d_same");
    require_2d(weights, "conv1d_same");
    const int L = embeddings.rows(), d = embeddings.cols();
    const int F = weights.rows();
    if (weights.cols() != kernel_size * d) {
        throw DimensionError("conv1d_same: weight cols " + std::to_string(weights.cols()) + " != k*d " +
                             std::to_string(kernel_size * d));
    }
    if (static_cast<int>(bias.size()) != F) {
        throw DimensionError("conv1d_same: bias length " + std::to_string(bias.size()) + " != filters " +
                             std::to_string(F));
    }
    const int off = (kernel_size - 1) / 2;

    std::vector<double> out_vals(static_cast<std::size_t>(L) * F);
    for (int i = 0; i < L; ++i) {
        for (int f = 0; f < F; ++f) out_vals[static_cast<std::size_t>(i) * F + f] = bias.at(f);
        for (int o = 0; o < kernel_size; ++o) {
            const int r = i + o - off;
            if (r < 0 || r >= L) continue;  // zero padding
            for (int f = 0; f < F; ++f) {
                double acc = 0.0;
                const std::size_t wbase = static_cast<std::size_t>(f) * kernel_size * d + static_cast<std::size_t>(o) * d;
                const std::size_t ebase = static_cast<std::size_t>(r) * d;
                for (int c = 0; c < d; ++c) acc += weights.at(wbase + c) * embeddings.at(ebase + c);
                out_vals[static_cast<std::size_t>(i) * F + f] += acc;
            }
        }
    }
    Tensor out({L, F}, std::move(out_vals));
    if (embeddings.requires_grad() || weights.requires_grad() || bias.requires_grad()) {
        out.set_requires_grad(true);
        Tensor e_cap = embeddings, w_cap = weights, b_cap = bias, out_cap = out;
        if (embeddings.requires_grad()) e_cap.ensure_grad();
        if (weights.requires_grad()) w_cap.ensure_grad();
        if (bias.requires_grad()) b_cap.ensure_grad();
        tape.record([e_cap, w_cap, b_cap, out_cap, L, d, F, kernel_size, off]() mutable {
            const auto& g = out_cap.grad();
            for (int i = 0; i < L; ++i) {
                for (int f = 0; f < F; ++f) {
                    const double gif = g[static_cast<std::size_t>(i) * F + f];
                    if (gif == 0.0) continue;
                    if (b_cap.requires_grad()) b_cap.grad()[f] += gif;
                    for (int o = 0; o < kernel_size; ++o) {
                        const int r = i + o - off;
                        if (r < 0 || r >= L) continue;
                        const std::size_t wbase =
                            static_cast<std::size_t>(f) * kernel_size * d + static_cast<std::size_t>(o) * d;
                        const std::size_t ebase = static_cast<std::size_t>(r) * d;
                        for (int c = 0; c < d; ++c) {
                            if (w_cap.requires_grad()) w_cap.grad()[wbase + c] += gif * e_cap.at(ebase + c);
                            if (e_cap.requires_grad()) e_cap.grad()[ebase + c] += gif * w_cap.at(wbase + c);
                        }
                    }
                }
            }
        });
    }
    return out;
}

Tensor embedding_lookup(Tape& tape, const Tensor& table, const std::vector<int>& ids) {
    require_2d(table, "embedding_lookup");
    const int V = table.rows(), d = table.cols();
    const int n = static_cast<int>(ids.size());
    if (n == 0) throw ContractError("embedding_lookup: empty id list");
    std::vector<double> out_vals(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
        if (ids[i] < 0 || ids[i] >= V) {
            throw DimensionError("embedding_lookup: id " + std::to_string(ids[i]) + " out of range [0," +
                                 std::to_string(V) + ")");
        }
        for (int c = 0; c < d; ++c)
            out_vals[static_cast<std::size_t>(i) * d + c] = table.at(ids[i], c);
    }
    Tensor out({n, d}, std::move(out_vals));
    if (table.requires_grad()) {
        out.set_requires_grad(true);
        Tensor t_cap = table, out_cap = out;
        t_cap.ensure_grad();
        std::vector<int> ids_cap = ids;
        tape.record([t_cap, out_cap, ids_cap, d]() mutable {
            const auto& g = out_cap.grad();
            for (std::size_t i = 0; i < ids_cap.size(); ++i)
                for (int c = 0; c < d; ++c)
                    t_cap.grad()[static_cast<std::size_t>(ids_cap[i]) * d + c] += g[i * d + c];
        });
    }
    return out;
}

Tensor masked_max_pool(Tape& tape, const Tensor& features, const std::vector<std::uint8_t>& mask) {
    check_mask(features, mask, "masked_max_pool");
    const int L = features.rows(), C = features.cols();
    std::vector<double> out_vals(C);
    std::vector<int> arg(C, -1);
    for (int c = 0; c < C; ++c) {
        double best = 0.0;
        int best_i = -1;
        for (int i = 0; i < L; ++i) {
            if (!mask[i]) continue;
            double v = features.at(i, c);
            if (best_i < 0 || v > best) {  // first maximum wins ties
                best = v;
                best_i = i;
            }
        }
        if (best_i < 0) throw ContractError("masked_max_pool: all positions masked");
        out_vals[c] = best;
        arg[c] = best_i;
    }
    Tensor out({C}, std::move(out_vals));
    if (features.requires_grad()) {
        out.set_requires_grad(true);
        Tensor f_cap = features, out_cap = out;
        f_cap.ensure_grad();
        tape.record([f_cap, out_cap, arg, C]() mutable {
            for (int c = 0; c < C; ++c)
                f_cap.grad()[static_cast<std::size_t>(arg[c]) * C + c] += out_cap.grad()[c];
        });
    }
    return out;
}

Tensor masked_mean_rows(Tape& tape, const Tensor& features, const std::vector<std::uint8_t>& mask) {
    check_mask(features, mask, "masked_mean_rows");
    const int L = features.rows(), d = features.cols();
    int valid = 0;
    for (std::uint8_t m : mask) valid += m ? 1 : 0;
    if (valid == 0) throw ContractError("masked_mean_rows: all positions masked");
    std::vector<double> out_vals(d, 0.0);
    for (int i = 0; i < L; ++i) {
        if (!mask[i]) continue;
        for (int c = 0; c < d; ++c) out_vals[c] += features.at(i, c);
    }
    for (int c = 0; c < d; ++c) out_vals[c] /= valid;
    Tensor out({d}, std::move(out_vals));
    if (features.requires_grad()) {
        out.set_requires_grad(true);
        Tensor f_cap = features, out_cap = out;
        f_cap.ensure_grad();
        std::vector<std::uint8_t> mask_cap = mask;
        tape.record([f_cap, out_cap, mask_cap, L, d, valid]() mutable {
            for (int i = 0; i < L; ++i) {
                if (!mask_cap[i]) continue;
                for (int c = 0; c < d; ++c)
                    f_cap.grad()[static_cast<std::size_t>(i) * d + c] += out_cap.grad()[c] / valid;
            }
        });
    }
    return out;
}

Tensor zero_masked_rows(Tape& tape, const Tensor& features, const std::vector<std::uint8_t>& mask) {
    check_mask(features, mask, "zero_masked_rows");
    const int L = features.rows(), d = features.cols();
    std::vector<double> out_vals(features.size(), 0.0);
    for (int i = 0; i < L; ++i) {
        if (!mask[i]) continue;
        for (int c = 0; c < d; ++c)
            out_vals[static_cast<std::size_t>(i) * d + c] = features.at(i, c);
    }
    Tensor out(features.shape(), std::move(out_vals));
    if (features.requires_grad()) {
        out.set_requires_grad(true);
        Tensor f_cap = features, out_cap = out;
        f_cap.ensure_grad();
        std::vector<std::uint8_t> mask_cap = mask;
        tape.record([f_cap, out_cap, mask_cap, L, d]() mutable {
            for (int i = 0; i < L; ++i) {
                if (!mask_cap[i]) continue;
                for (int c = 0; c < d; ++c)
                    f_cap.grad()[static_cast<std::size_t>(i) * d + c] +=
                        out_cap.grad()[static_cast<std::size_t>(i) * d + c];
            }
        });
    }
    return out;
}

Tensor pick_neg_log(Tape& tape, const Tensor& probs, int idx) {
    if (!is_vec_like(probs)) throw DimensionError("pick_neg_log requires a probability vector, got " + probs.shape_str());
    if (idx < 0 || static_cast<std::size_t>(idx) >= probs.size()) {
        throw ContractError("pick_neg_log: index " + std::to_string(idx) + " out of range");
    }
    constexpr double kFloor = 1e-12;
    const double p = std::max(probs.at(static_cast<std::size_t>(idx)), kFloor);
    Tensor out = Tensor::scalar(-std::log(p));
    if (probs.requires_grad()) {
        out.set_requires_grad(true);
        Tensor p_cap = probs, out_cap = out;
        p_cap.ensure_grad();
        tape.record([p_cap, out_cap, idx, p]() mutable {
            if (p_cap.at(static_cast<std::size_t>(idx)) >= 1e-12) {
                p_cap.grad()[static_cast<std::size_t>(idx)] += -out_cap.grad()[0] / p;
            }
        });
    }
    return out;
}

Tensor dropout(Tape& tape, const Tensor& x, double p, bool training, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw ValueError("dropout rate must be in [0,1), got " + std::to_string(p));
    if (!training || p == 0.0) return x;
    const double inv_keep = 1.0 / (1.0 - p);
    std::vector<double> keep(x.size());
    std::vector<double> out_vals(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        keep[i] = (rng.next_double() >= p) ? inv_keep : 0.0;
        out_vals[i] = x.at(i) * keep[i];
    }
    Tensor out(x.shape(), std::move(out_vals));
    if (x.requires_grad()) {
        out.set_requires_grad(true);
        Tensor x_cap = x, out_cap = out;
        x_cap.ensure_grad();
        tape.record([x_cap, out_cap, keep]() mutable {
            for (std::size_t i = 0; i < x_cap.size(); ++i) x_cap.grad()[i] += keep[i] * out_cap.grad()[i];
        });
    }
    return out;
}

}  // namespace ragat
