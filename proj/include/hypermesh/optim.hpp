#pragma once

#include "hypermesh/layers.hpp"
#include "hypermesh/manifold.hpp"

namespace hypermesh {

struct AdamHyper {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-parameter moment arrays plus the shared step counter.
struct OptState {
    AdamHyper hyper;
    long step = 0;
    std::vector<Array> m, v;

    void init(const ParamStore& store);
};

/// Bias-corrected Adam update in place. Throws on non-finite gradients.
void adam_step(Array& param, const Array& grad, Array& m, Array& v, long step, const AdamHyper& h);

/// Riemannian Adam for a ball-resident row vector: the Euclidean gradient is
/// rescaled by (1 - kappa*||b||^2)^2 / 4 (inverse conformal metric), moments
/// are kept as flat arrays, and the update is retracted through exp_map at the
/// parameter.
void riemannian_adam_step(Array& param, const Array& grad, Array& m, Array& v, long step,
                          const AdamHyper& h, Curvature curv);

/// One optimizer step over every tensor in the store; ball tensors take the
/// Riemannian update. Increments state.step.
void step_all(ParamStore& store, const std::vector<Array>& grads, OptState& state, Curvature curv);

}  // namespace hypermesh
