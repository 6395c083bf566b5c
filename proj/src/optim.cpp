#include "hypermesh/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace hypermesh {

void OptState::init(const ParamStore& store) {
    step = 0;
    m.clear();
    v.clear();
    for (const auto& nt : store.tensors) {
        m.emplace_back(nt.value.rows, nt.value.cols, 0.0);
        v.emplace_back(nt.value.rows, nt.value.cols, 0.0);
    }
}

namespace {

void require_finite_grad(const Array& grad) {
    if (!grad.all_finite()) throw std::runtime_error("optimizer: non-finite gradient, aborting");
}

// m,v update plus the bias-corrected step direction (to be subtracted)
void adam_direction(const Array& grad, Array& m, Array& v, long step, const AdamHyper& h, Array& dir) {
    const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(step));
    for (size_t i = 0; i < grad.v.size(); ++i) {
        const double g = grad.v[i];
        m.v[i] = h.beta1 * m.v[i] + (1.0 - h.beta1) * g;
        v.v[i] = h.beta2 * v.v[i] + (1.0 - h.beta2) * g * g;
        const double mhat = m.v[i] / c1;
        const double vhat = v.v[i] / c2;
        dir.v[i] = h.lr * mhat / (std::sqrt(vhat) + h.eps);
    }
}

}  // namespace

void adam_step(Array& param, const Array& grad, Array& m, Array& v, long step, const AdamHyper& h) {
    require_same_shape(param, grad, "adam_step");
    require_finite_grad(grad);
    Array dir(param.rows, param.cols);
    adam_direction(grad, m, v, step, h, dir);
    for (size_t i = 0; i < param.v.size(); ++i) param.v[i] -= dir.v[i];
}

void riemannian_adam_step(Array& param, const Array& grad, Array& m, Array& v, long step,
                          const AdamHyper& h, Curvature curv) {
    require_same_shape(param, grad, "riemannian_adam_step");
    require_finite_grad(grad);
    const double kappa = curv.kappa();
    Array dir(param.rows, param.cols);
    Array rgrad = grad;
    for (int i = 0; i < param.rows; ++i) {
        const double factor = 1.0 - kappa * sumsq(param.row(i));
        const double scale = factor * factor / 4.0;
        for (int j = 0; j < param.cols; ++j) rgrad.at(i, j) *= scale;
    }
    adam_direction(rgrad, m, v, step, h, dir);
    for (double& e : dir.v) e = -e;  // descend
    const Array base = param;
    for (int i = 0; i < param.rows; ++i) {
        rowk::exp_at(base.row(i), dir.row(i), kappa, param.row(i));
    }
}

void step_all(ParamStore& store, const std::vector<Array>& grads, OptState& state, Curvature curv) {
    if (grads.size() != store.tensors.size() || state.m.size() != store.tensors.size()) {
        throw std::invalid_argument("step_all: gradient/state count mismatch");
    }
    ++state.step;
    for (size_t i = 0; i < store.tensors.size(); ++i) {
        NamedTensor& nt = store.tensors[i];
        if (nt.on_ball) {
            riemannian_adam_step(nt.value, grads[i], state.m[i], state.v[i], state.step, state.hyper, curv);
        } else {
            adam_step(nt.value, grads[i], state.m[i], state.v[i], state.step, state.hyper);
        }
    }
}

}  // namespace hypermesh
