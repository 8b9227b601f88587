#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ragat/errors.hpp"

namespace ragat {

// Dense row-major tensor of doubles with an optional gradient buffer.
// Copying a Tensor copies the handle, not the storage; ops never mutate
// values after construction, only the grad buffer accumulates.
class Tensor {
public:
    Tensor() : d_(std::make_shared<Data>()) {}

    Tensor(std::vector<int> shape, std::vector<double> values, bool requires_grad = false)
        : d_(std::make_shared<Data>()) {
        std::size_t n = 1;
        for (int e : shape) {
            if (e <= 0) throw DimensionError("tensor extent must be positive, got " + std::to_string(e));
            n *= static_cast<std::size_t>(e);
        }
        if (n != values.size()) {
            throw DimensionError("tensor shape/data mismatch: shape product " + std::to_string(n) +
                                 " vs data length " + std::to_string(values.size()));
        }
        d_->shape = std::move(shape);
        d_->values = std::move(values);
        d_->requires_grad = requires_grad;
    }

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
        std::size_t n = 1;
        for (int e : shape) n *= static_cast<std::size_t>(e);
        return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
    }

    static Tensor scalar(double v, bool requires_grad = false) {
        return Tensor({1}, {v}, requires_grad);
    }

    const std::vector<int>& shape() const { return d_->shape; }
    int ndim() const { return static_cast<int>(d_->shape.size()); }
    std::size_t size() const { return d_->values.size(); }

    int rows() const {
        if (ndim() != 2) throw DimensionError("rows() requires a 2-d tensor, got ndim " + std::to_string(ndim()));
        return d_->shape[0];
    }
    int cols() const {
        if (ndim() != 2) throw DimensionError("cols() requires a 2-d tensor, got ndim " + std::to_string(ndim()));
        return d_->shape[1];
    }

    const std::vector<double>& values() const { return d_->values; }
    std::vector<double>& values() { return d_->values; }

    double at(std::size_t i) const { return d_->values[i]; }
    double at(int r, int c) const {
        return d_->values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) + static_cast<std::size_t>(c)];
    }

    bool requires_grad() const { return d_->requires_grad; }
    void set_requires_grad(bool rq) {
        d_->requires_grad = rq;
        if (rq) ensure_grad();
    }

    bool has_grad() const { return !d_->grad.empty(); }
    void ensure_grad() {
        if (d_->grad.size() != d_->values.size()) d_->grad.assign(d_->values.size(), 0.0);
    }
    void zero_grad() {
        if (!d_->grad.empty()) std::fill(d_->grad.begin(), d_->grad.end(), 0.0);
    }
    const std::vector<double>& grad() const { return d_->grad; }
    std::vector<double>& grad() { return d_->grad; }

    // Identity of the underlying storage; two handles sharing storage compare equal.
    bool same_storage(const Tensor& other) const { return d_ == other.d_; }

    std::string shape_str() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < d_->shape.size(); ++i) {
            if (i) os << "x";
            os << d_->shape[i];
        }
        os << ")";
        return os.str();
    }

private:
    struct Data {
        std::vector<int> shape;
        std::vector<double> values;
        std::vector<double> grad;  // empty until requested
        bool requires_grad = false;
    };
    std::shared_ptr<Data> d_;
};

// Records backward rules for each primitive in forward order. One backward
// pass per tape; driving backward twice is a state error.
class Tape {
public:
    void record(std::function<void()> backward_fn) { ops_.push_back(std::move(backward_fn)); }

    void backward(Tensor loss) {
        if (consumed_) throw StateError("backward() called twice on the same tape");
        if (loss.size() != 1) {
            throw ContractError("backward() requires a scalar loss, got shape " + loss.shape_str());
        }
        consumed_ = true;
        loss.ensure_grad();
        loss.grad()[0] += 1.0;
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    }

    bool consumed() const { return consumed_; }
    std::size_t num_ops() const { return ops_.size(); }

private:
    std::vector<std::function<void()>> ops_;
    bool consumed_ = false;
};

}  // namespace ragat
