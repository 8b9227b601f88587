#include "ragat/gradcheck.hpp"

#include <cmath>

#include "ragat/errors.hpp"

namespace ragat {

namespace {

std::string param_name(const std::vector<std::string>* names, std::size_t i) {
    if (names && i < names->size()) return (*names)[i];
    return "param[" + std::to_string(i) + "]";
}

double eval_scalar(const std::function<Tensor(Tape&)>& f) {
    Tape scratch;
    Tensor out = f(scratch);
    if (out.size() != 1) throw ContractError("grad_check: f must return a scalar, got " + out.shape_str());
    return out.at(0);
}

}  // namespace

double grad_check(const std::function<Tensor(Tape&)>& f, const std::vector<Tensor>& params,
                  double eps, const std::vector<std::string>* names) {
    if (eps <= 0.0) throw ValueError("grad_check: eps must be positive");

    for (const Tensor& p : params) {
        Tensor t = p;
        t.ensure_grad();
        t.zero_grad();
    }

    Tape tape;
    Tensor loss = f(tape);
    if (loss.size() != 1) throw ContractError("grad_check: f must return a scalar, got " + loss.shape_str());
    if (!std::isfinite(loss.at(0))) throw NumericError("grad_check: non-finite loss at base point");
    tape.backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const Tensor& p : params) analytic.push_back(p.grad());

    double max_rel = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor p = params[pi];
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double saved = p.values()[i];
            p.values()[i] = saved + eps;
            const double f_plus = eval_scalar(f);
            p.values()[i] = saved - eps;
            const double f_minus = eval_scalar(f);
            p.values()[i] = saved;
            if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                throw NumericError("grad_check: non-finite evaluation perturbing " + param_name(names, pi) +
                                   " entry " + std::to_string(i));
            }
            const double numeric = (f_plus - f_minus) / (2.0 * eps);
            const double a = analytic[pi][i];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            max_rel = std::max(max_rel, std::fabs(a - numeric) / denom);
        }
    }
    return max_rel;
}

}  // namespace ragat
