#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hypermesh/array.hpp"

namespace hypermesh::ad {

using NodeId = int32_t;

/// Reverse-mode tape over dense f64 arrays. Ops record their output value and
/// a backward rule; backward() walks the nodes in reverse insertion order, so
/// gradient accumulation order is fixed and two passes over the same tape are
/// bit-identical. Manifold/layer operations are built as compositions of these
/// elementary ops (see hyperops.hpp).
class Tape {
  public:
    struct Node {
        const char* op;
        std::vector<NodeId> in;
        Array val;
        Array grad;
        std::function<void(Tape&, NodeId)> back;
        bool needs_grad = false;
    };

    /// When set, every recorded value is scanned and the first non-finite op
    /// aborts with its name. Used by the trainer.
    bool nan_guard = false;

    NodeId leaf(Array v);      // gradient-tracked input/parameter slot
    NodeId constant(Array v);  // recorded but not differentiated

    const Array& val(NodeId id) const { return node(id).val; }
    const Array& grad(NodeId id) const;
    const char* op_name(NodeId id) const { return node(id).op; }
    int size() const { return static_cast<int>(nodes_.size()); }

    // -- elementwise, same shape --
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId div(NodeId a, NodeId b);
    NodeId scale(NodeId a, double s);
    NodeId add_const(NodeId a, double s);
    NodeId neg(NodeId a) { return scale(a, -1.0); }
    NodeId tanh_(NodeId a);
    NodeId artanh_(NodeId a);  // argument clamped to +-(1 - ARTANH_EPS), zero grad outside
    NodeId exp_(NodeId a);
    NodeId sqrt_(NodeId a);
    NodeId recip(NodeId a);
    NodeId relu(NodeId a);
    NodeId clamp_min(NodeId a, double lo);

    // -- matrix products --
    NodeId matmul(NodeId a, NodeId b);     // (n,k)(k,m)
    NodeId matmul_nt(NodeId a, NodeId b);  // (n,k)(m,k) -> a b^T

    // -- row reductions / broadcasts --
    NodeId rowdot(NodeId a, NodeId b);  // n x 1
    NodeId rownorm(NodeId a);           // n x 1, clamped below at MIN_NORM
    NodeId rowsum(NodeId a);            // n x 1
    NodeId rowmax(NodeId a);            // n x 1 (grad to first argmax)
    NodeId colsum(NodeId a);            // 1 x d
    NodeId sum_all(NodeId a);           // 1 x 1
    NodeId rowscale(NodeId x, NodeId s);    // x(n,d) * s(n,1)
    NodeId rowshift(NodeId x, NodeId s);    // x(n,d) + s(n,1)
    NodeId add_rowvec(NodeId x, NodeId b);  // x(n,d) + b(1,d)

    // -- structure --
    NodeId gather_rows(NodeId a, std::vector<int> idx);
    NodeId slice_rows(NodeId a, int begin, int count);
    NodeId slice_cols(NodeId a, int begin, int count);
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId concat_rows(const std::vector<NodeId>& parts);
    NodeId segment_sum(NodeId a, int group);  // (n*group, d) -> (n, d)

    /// Radial clamp of each row to the ball of curvature kappa. Gradient is the
    /// identity on unclamped rows and zero on clamped ones (subgradient convention).
    NodeId ball_clamp(NodeId a, double kappa);

    /// Reverse sweep from a scalar (1x1) output. Gradients of unused leaves are zero.
    void backward(NodeId output);

  private:
    std::vector<Node> nodes_;

    const Node& node(NodeId id) const;
    Node& mut_node(NodeId id);
    NodeId push(const char* op, std::vector<NodeId> in, Array val, std::function<void(Tape&, NodeId)> back);
    void add_grad(NodeId target, const Array& g);
    friend struct BackAccess;
};

}  // namespace hypermesh::ad
