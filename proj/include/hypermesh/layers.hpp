#pragma once

#include <string>
#include <vector>

#include "hypermesh/graph.hpp"
#include "hypermesh/hyperops.hpp"

namespace hypermesh {

/// One learnable tensor. on_ball marks manifold parameters (Mobius biases in
/// hyperbolic mode) which take Riemannian Adam updates.
struct NamedTensor {
    std::string name;
    Array value;
    bool on_ball = false;
};

struct ParamStore {
    std::vector<NamedTensor> tensors;

    int add(std::string name, Array value, bool on_ball = false);
    int find(const std::string& name) const;  // -1 when absent
    int count() const { return static_cast<int>(tensors.size()); }
    NamedTensor& operator[](int i) { return tensors[i]; }
    const NamedTensor& operator[](int i) const { return tensors[i]; }
};

// Parameter handles (indices into the store).
struct MobiusLinearRef {
    int w = -1;  // stored (d_in, d_out); rows transform as x*W
    int b = -1;  // (1, d_out), ball point in hyperbolic mode
};

struct DhgcRef {
    MobiusLinearRef l1, l2;
};

struct IhgcRef {
    int unify_sh_w = -1, unify_sh_b = -1;
    int unify_q_w = -1, unify_q_b = -1;
    int unify_k_w = -1, unify_k_b = -1;
    MobiusLinearRef v_map;
    int out_w = -1, out_b = -1;
};

struct HeadRef {
    int off_w1 = -1, off_b1 = -1;
    int off_w2 = -1, off_b2 = -1;  // zero-initialized: the untrained head is the identity refiner
    int pose_w1 = -1, pose_b1 = -1;
    int pose_w2 = -1, pose_b2 = -1;
};

struct BranchRef {
    DhgcRef dhgc;
    IhgcRef ihgc;
    HeadRef head;
};

struct ModelDims {
    int mesh_in = 3;
    int hidden = 64;   // DHGC layer widths
    int feat = 64;     // unified feature dim d (attention normalization constant)
    int out = 32;      // IHGC output width
    int shallow_raw = 32;
    int deep_raw = 64;
    int global_dim = 64;
    int head_hidden = 64;
    int pose_hidden = 32;
};

struct Model {
    ParamStore store;
    BranchRef hand, object;
    ad::Geometry geom;
    ModelDims dims;
    int k = 8;
};

/// Builds both branches; weights U(+-1/sqrt(d_in)) from the seed, Mobius biases
/// at the origin, and the head output layers at zero so the initial model
/// reproduces its input meshes.
Model init_model(uint64_t seed, const ad::Geometry& geom, const ModelDims& dims, int k);

namespace ad_layers {

using ad::Geometry;
using ad::NodeId;
using ad::Tape;

/// Leaf ids for every tensor in the store, in store order.
std::vector<NodeId> bind_leaves(Tape& t, const ParamStore& store);

/// One dynamic hyperbolic graph convolution layer (Euclidean rows in).
/// Returns {euclidean rows out, ball rows out}. The neighbor graph is rebuilt
/// from the projected inputs; the Einstein midpoint aggregates the Mobius-
/// transformed neighbor features in graph row order.
struct DhgcOut {
    NodeId eucl;
    NodeId ball;
};
DhgcOut dhgc_layer(Tape& t, const Geometry& g, NodeId x_eucl, NodeId w, NodeId b, int k);

/// Two stacked DHGC layers over raw mesh vertices; returns the ball features.
NodeId dhgc_stack(Tape& t, const Geometry& g, NodeId vertices, const DhgcRef& p,
                  const std::vector<NodeId>& leaves, int k);

/// Affine to the common width then exp0 onto the ball.
NodeId unify_project(Tape& t, const Geometry& g, NodeId raw, NodeId w, NodeId b);

/// softmax(Log(Q) Log(K)^T / sqrt(d_norm)) Log(V) for one vertex neighborhood.
NodeId scaled_log_attention(Tape& t, const Geometry& g, NodeId q, NodeId k, NodeId v, int d_norm);

/// Full image-attention convolution. deep_q_raw feeds the Q neighborhoods and
/// deep_k_raw the K neighborhoods (the two branches swap these roles).
NodeId ihgc_forward(Tape& t, const Geometry& g, NodeId mesh_ball, NodeId shallow_raw, NodeId deep_q_raw,
                    NodeId deep_k_raw, const IhgcRef& p, const std::vector<NodeId>& leaves, int k,
                    int d_norm);

struct HeadOut {
    NodeId offsets;  // n x 3
    NodeId refined;  // init + offsets
    NodeId t_pred;   // 1 x 3
    NodeId s_pred;   // 1 x 1
};
HeadOut refinement_head(Tape& t, NodeId feats, NodeId global_feat, NodeId init_vertices, const HeadRef& p,
                        const std::vector<NodeId>& leaves);

/// Unified image-feature ball tensors of one branch (shallow, Q-source, K-source).
struct UnifiedFeatures {
    NodeId shallow;
    NodeId deep_q;
    NodeId deep_k;
};

/// Branch forward up to the refined mesh.
struct BranchOut {
    NodeId mesh_ball;  // DHGC output, n x feat
    UnifiedFeatures unified;
    NodeId feats_out;  // IHGC output, n x out
    HeadOut head;
};
BranchOut branch_forward(Tape& t, const Geometry& g, NodeId init_vertices, NodeId shallow_raw,
                         NodeId deep_q_raw, NodeId deep_k_raw, NodeId global_feat, const BranchRef& p,
                         const std::vector<NodeId>& leaves, int k, int d_norm);

}  // namespace ad_layers

}  // namespace hypermesh
