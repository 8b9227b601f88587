#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ragat/tensor.hpp"

namespace ragat {

// Central finite-difference verification of analytic gradients.
//
// `f` rebuilds the forward pass from scratch each call (recording onto the
// given tape) and returns a scalar loss. `params` are the leaf tensors whose
// gradients are checked; they must have requires_grad set and be captured by
// `f`. Returns the maximum relative error over all parameter entries, with
// denominator max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<Tensor(Tape&)>& f, const std::vector<Tensor>& params,
                  double eps, const std::vector<std::string>* names = nullptr);

}  // namespace ragat
