#include "hypermesh/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "hypermesh/rng.hpp"

namespace hypermesh {

int ParamStore::add(std::string name, Array value, bool on_ball) {
    if (find(name) >= 0) throw std::invalid_argument("ParamStore: duplicate tensor name " + name);
    tensors.push_back({std::move(name), std::move(value), on_ball});
    return static_cast<int>(tensors.size()) - 1;
}

int ParamStore::find(const std::string& name) const {
    for (size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

Array uniform_init(Rng& rng, int rows, int cols) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
    Array w(rows, cols);
    for (double& e : w.v) e = rng.uniform(-bound, bound);
    return w;
}

struct Builder {
    ParamStore& store;
    Rng& rng;
    bool hyperbolic;
    std::string prefix;

    int weights(const std::string& name, int d_in, int d_out) {
        return store.add(prefix + name, uniform_init(rng, d_in, d_out), false);
    }
    int zeros(const std::string& name, int rows, int cols, bool on_ball = false) {
        return store.add(prefix + name, Array(rows, cols, 0.0), on_ball);
    }
    MobiusLinearRef mobius(const std::string& name, int d_in, int d_out) {
        MobiusLinearRef r;
        r.w = weights(name + ".w", d_in, d_out);
        r.b = zeros(name + ".b", 1, d_out, hyperbolic);  // origin bias
        return r;
    }
    std::pair<int, int> affine(const std::string& name, int d_in, int d_out, bool zero_w = false) {
        const int w = zero_w ? zeros(name + ".w", d_in, d_out)
                             : store.add(prefix + name + ".w", uniform_init(rng, d_in, d_out), false);
        const int b = zeros(name + ".b", 1, d_out);
        return {w, b};
    }
};

BranchRef build_branch(ParamStore& store, Rng& rng, bool hyperbolic, const std::string& prefix,
                       const ModelDims& d) {
    Builder bld{store, rng, hyperbolic, prefix};
    BranchRef br;
    br.dhgc.l1 = bld.mobius("dhgc1", d.mesh_in, d.hidden);
    br.dhgc.l2 = bld.mobius("dhgc2", d.hidden, d.feat);
    std::tie(br.ihgc.unify_sh_w, br.ihgc.unify_sh_b) = bld.affine("ihgc.unify_sh", d.shallow_raw, d.feat);
    std::tie(br.ihgc.unify_q_w, br.ihgc.unify_q_b) = bld.affine("ihgc.unify_q", d.deep_raw, d.feat);
    std::tie(br.ihgc.unify_k_w, br.ihgc.unify_k_b) = bld.affine("ihgc.unify_k", d.deep_raw, d.feat);
    br.ihgc.v_map = bld.mobius("ihgc.v", 2 * d.feat, d.feat);
    std::tie(br.ihgc.out_w, br.ihgc.out_b) = bld.affine("ihgc.out", d.feat, d.out);
    std::tie(br.head.off_w1, br.head.off_b1) = bld.affine("head.off1", d.out + d.global_dim, d.head_hidden);
    std::tie(br.head.off_w2, br.head.off_b2) = bld.affine("head.off2", d.head_hidden, d.mesh_in, true);
    std::tie(br.head.pose_w1, br.head.pose_b1) = bld.affine("head.pose1", d.global_dim, d.pose_hidden);
    std::tie(br.head.pose_w2, br.head.pose_b2) = bld.affine("head.pose2", d.pose_hidden, 4, true);
    return br;
}

}  // namespace

Model init_model(uint64_t seed, const ad::Geometry& geom, const ModelDims& dims, int k) {
    Model m;
    m.geom = geom;
    m.dims = dims;
    m.k = k;
    Rng rng(seed, StreamPurpose::WeightInit);
    const bool hyp = geom.hyperbolic();
    m.hand = build_branch(m.store, rng, hyp, "hand.", dims);
    m.object = build_branch(m.store, rng, hyp, "obj.", dims);
    return m;
}

namespace ad_layers {

std::vector<NodeId> bind_leaves(Tape& t, const ParamStore& store) {
    std::vector<NodeId> leaves;
    leaves.reserve(store.tensors.size());
    for (const auto& nt : store.tensors) leaves.push_back(t.leaf(nt.value));
    return leaves;
}

DhgcOut dhgc_layer(Tape& t, const Geometry& g, NodeId x_eucl, NodeId w, NodeId b, int k) {
    const NodeId projected = ad::exp0(t, g, x_eucl);
    const NodeId h = ad::mobius_linear(t, g, w, b, projected);
    NeighborGraph graph;
    if (g.hyperbolic()) {
        graph = build_dynamic_graph(BallTensor{t.val(projected), g.curv}, k);
    } else {
        graph = build_dynamic_graph_euclidean(t.val(projected), k);
    }
    const NodeId gathered = t.gather_rows(h, graph.flat());
    const NodeId agg = ad::einstein_midpoint_grouped(t, g, gathered, k);
    const NodeId act = ad::hyper_activation(t, g, agg);
    return {ad::log0(t, g, act), act};
}

NodeId dhgc_stack(Tape& t, const Geometry& g, NodeId vertices, const DhgcRef& p,
                  const std::vector<NodeId>& leaves, int k) {
    const DhgcOut l1 = dhgc_layer(t, g, vertices, leaves[p.l1.w], leaves[p.l1.b], k);
    const DhgcOut l2 = dhgc_layer(t, g, l1.eucl, leaves[p.l2.w], leaves[p.l2.b], k);
    return l2.ball;
}

NodeId unify_project(Tape& t, const Geometry& g, NodeId raw, NodeId w, NodeId b) {
    return ad::exp0(t, g, ad::affine(t, raw, w, b));
}

NodeId scaled_log_attention(Tape& t, const Geometry& g, NodeId q, NodeId k, NodeId v, int d_norm) {
    if (t.val(q).rows < 1) throw std::invalid_argument("scaled_log_attention: empty neighborhood");
    const NodeId lq = ad::log0(t, g, q);
    const NodeId lk = ad::log0(t, g, k);
    const NodeId lv = ad::log0(t, g, v);
    const NodeId scores = t.scale(t.matmul_nt(lq, lk), 1.0 / std::sqrt(static_cast<double>(d_norm)));
    return t.matmul(ad::softmax_rows(t, scores), lv);
}

namespace {

NodeId ihgc_on_unified(Tape& t, const Geometry& g, NodeId mesh_ball, NodeId sh, NodeId dq, NodeId dk,
                       const IhgcRef& p, const std::vector<NodeId>& leaves, int k, int d_norm) {
    CrossModalGraphs graphs;
    if (g.hyperbolic()) {
        graphs = build_cross_modal_neighborhoods(BallTensor{t.val(mesh_ball), g.curv},
                                                 BallTensor{t.val(sh), g.curv}, BallTensor{t.val(dq), g.curv},
                                                 BallTensor{t.val(dk), g.curv}, k);
    } else {
        graphs = build_cross_modal_neighborhoods_euclidean(t.val(mesh_ball), t.val(sh), t.val(dq),
                                                           t.val(dk), k);
    }

    // V = Mobius(Cat(f1, f2)) over every neighbor pair, batched (n*k rows)
    const NodeId f1g = t.gather_rows(mesh_ball, graphs.f1.flat());
    const NodeId f2g = t.gather_rows(sh, graphs.f2.flat());
    const NodeId v_all = ad::mobius_linear(t, g, leaves[p.v_map.w], leaves[p.v_map.b],
                                           t.concat_cols(f1g, f2g));
    const NodeId lq_all = ad::log0(t, g, t.gather_rows(dq, graphs.q.flat()));
    const NodeId lk_all = ad::log0(t, g, t.gather_rows(dk, graphs.kk.flat()));
    const NodeId lv_all = ad::log0(t, g, v_all);

    const int n = t.val(mesh_ball).rows;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d_norm));
    std::vector<NodeId> per_vertex;
    per_vertex.reserve(n);
    for (int i = 0; i < n; ++i) {
        const NodeId lq = t.slice_rows(lq_all, i * k, k);
        const NodeId lk = t.slice_rows(lk_all, i * k, k);
        const NodeId lv = t.slice_rows(lv_all, i * k, k);
        const NodeId scores = t.scale(t.matmul_nt(lq, lk), inv_sqrt_d);
        const NodeId att = t.matmul(ad::softmax_rows(t, scores), lv);  // k x feat
        per_vertex.push_back(t.scale(t.colsum(att), 1.0 / k));         // mean over the k rows
    }
    const NodeId pooled = t.concat_rows(per_vertex);
    return ad::affine(t, pooled, leaves[p.out_w], leaves[p.out_b]);
}

}  // namespace

NodeId ihgc_forward(Tape& t, const Geometry& g, NodeId mesh_ball, NodeId shallow_raw, NodeId deep_q_raw,
                    NodeId deep_k_raw, const IhgcRef& p, const std::vector<NodeId>& leaves, int k,
                    int d_norm) {
    const NodeId sh = unify_project(t, g, shallow_raw, leaves[p.unify_sh_w], leaves[p.unify_sh_b]);
    const NodeId dq = unify_project(t, g, deep_q_raw, leaves[p.unify_q_w], leaves[p.unify_q_b]);
    const NodeId dk = unify_project(t, g, deep_k_raw, leaves[p.unify_k_w], leaves[p.unify_k_b]);
    return ihgc_on_unified(t, g, mesh_ball, sh, dq, dk, p, leaves, k, d_norm);
}

HeadOut refinement_head(Tape& t, NodeId feats, NodeId global_feat, NodeId init_vertices, const HeadRef& p,
                        const std::vector<NodeId>& leaves) {
    const int n = t.val(feats).rows;
    const NodeId gb = t.gather_rows(global_feat, std::vector<int>(static_cast<size_t>(n), 0));
    const NodeId h1 = t.relu(ad::affine(t, t.concat_cols(feats, gb), leaves[p.off_w1], leaves[p.off_b1]));
    HeadOut out;
    out.offsets = ad::affine(t, h1, leaves[p.off_w2], leaves[p.off_b2]);
    out.refined = t.add(init_vertices, out.offsets);
    const NodeId p1 = t.relu(ad::affine(t, global_feat, leaves[p.pose_w1], leaves[p.pose_b1]));
    const NodeId p2 = ad::affine(t, p1, leaves[p.pose_w2], leaves[p.pose_b2]);
    out.t_pred = t.slice_cols(p2, 0, 3);
    out.s_pred = t.slice_cols(p2, 3, 1);
    return out;
}

BranchOut branch_forward(Tape& t, const Geometry& g, NodeId init_vertices, NodeId shallow_raw,
                         NodeId deep_q_raw, NodeId deep_k_raw, NodeId global_feat, const BranchRef& p,
                         const std::vector<NodeId>& leaves, int k, int d_norm) {
    BranchOut out;
    out.mesh_ball = dhgc_stack(t, g, init_vertices, p.dhgc, leaves, k);
    out.unified.shallow = unify_project(t, g, shallow_raw, leaves[p.ihgc.unify_sh_w], leaves[p.ihgc.unify_sh_b]);
    out.unified.deep_q = unify_project(t, g, deep_q_raw, leaves[p.ihgc.unify_q_w], leaves[p.ihgc.unify_q_b]);
    out.unified.deep_k = unify_project(t, g, deep_k_raw, leaves[p.ihgc.unify_k_w], leaves[p.ihgc.unify_k_b]);
    out.feats_out = ihgc_on_unified(t, g, out.mesh_ball, out.unified.shallow, out.unified.deep_q,
                                    out.unified.deep_k, p.ihgc, leaves, k, d_norm);
    out.head = refinement_head(t, out.feats_out, global_feat, init_vertices, p.head, leaves);
    return out;
}

}  // namespace ad_layers

}  // namespace hypermesh
