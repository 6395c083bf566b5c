#pragma once

#include "hypermesh/manifold.hpp"
#include "hypermesh/tape.hpp"

namespace hypermesh::ad {

/// Feature space the pipeline runs in. Euclidean is the ablation switch:
/// exp/log become the identity, Mobius ops become affine maps, the Einstein
/// midpoint becomes the arithmetic mean and distances become Euclidean.
enum class Space { Hyperbolic, Euclidean };

Space space_from_string(const std::string& s);
const char* to_string(Space s);

struct Geometry {
    Space space = Space::Hyperbolic;
    Curvature curv;

    bool hyperbolic() const { return space == Space::Hyperbolic; }
    double kappa() const { return curv.kappa(); }
    double sqrt_kappa() const { return curv.sqrt_kappa(); }
};

// Differentiable compositions of the manifold primitives. Each mirrors the
// plain kernel in manifold.hpp; forwards agree with it to float rounding and
// gradients are validated against finite differences (see gradcheck).
NodeId exp0(Tape& t, const Geometry& g, NodeId v);
NodeId log0(Tape& t, const Geometry& g, NodeId x);
NodeId mobius_add(Tape& t, const Geometry& g, NodeId x, NodeId y);
NodeId exp_at(Tape& t, const Geometry& g, NodeId base, NodeId v);
NodeId log_at(Tape& t, const Geometry& g, NodeId base, NodeId y);
NodeId geodesic(Tape& t, const Geometry& g, NodeId x, NodeId y);  // rowwise pairs -> (n,1)
NodeId conformal(Tape& t, const Geometry& g, NodeId x);           // (n,1)
NodeId mobius_matvec(Tape& t, const Geometry& g, NodeId w, NodeId x);  // w stored (d_in,d_out)
NodeId to_klein(Tape& t, const Geometry& g, NodeId x);
NodeId from_klein(Tape& t, const Geometry& g, NodeId k);
NodeId hyper_activation(Tape& t, const Geometry& g, NodeId x);

/// Mobius linear layer h = (x (x) W) (+) b with a (1,d_out) bias broadcast to
/// every row; plain affine map in Euclidean mode.
NodeId mobius_linear(Tape& t, const Geometry& g, NodeId w, NodeId b, NodeId x);

/// Euclidean affine rows: x*W + b.
NodeId affine(Tape& t, NodeId x, NodeId w, NodeId b);

/// Einstein midpoint over every consecutive `group` rows: (n*group, d) -> (n, d).
/// Arithmetic mean of the group in Euclidean mode.
NodeId einstein_midpoint_grouped(Tape& t, const Geometry& g, NodeId x, int group);

/// Midpoint of all rows: (m, d) -> (1, d).
NodeId einstein_midpoint(Tape& t, const Geometry& g, NodeId points);

/// Row-stable softmax.
NodeId softmax_rows(Tape& t, NodeId scores);

}  // namespace hypermesh::ad
