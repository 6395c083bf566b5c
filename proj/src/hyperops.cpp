#include "hypermesh/hyperops.hpp"

#include <stdexcept>
#include <string>

namespace hypermesh::ad {

Space space_from_string(const std::string& s) {
    if (s == "hyperbolic") return Space::Hyperbolic;
    if (s == "euclidean") return Space::Euclidean;
    throw std::invalid_argument("space must be 'hyperbolic' or 'euclidean', got '" + s + "'");
}

const char* to_string(Space s) { return s == Space::Hyperbolic ? "hyperbolic" : "euclidean"; }

NodeId exp0(Tape& t, const Geometry& g, NodeId v) {
    if (!g.hyperbolic()) return v;
    const double sk = g.sqrt_kappa();
    const NodeId r = t.rownorm(v);
    const NodeId skr = t.scale(r, sk);
    const NodeId f = t.div(t.tanh_(skr), skr);
    return t.ball_clamp(t.rowscale(v, f), g.kappa());
}

NodeId log0(Tape& t, const Geometry& g, NodeId x) {
    if (!g.hyperbolic()) return x;
    const double sk = g.sqrt_kappa();
    const NodeId r = t.rownorm(x);
    const NodeId skr = t.scale(r, sk);
    const NodeId f = t.div(t.artanh_(skr), skr);
    return t.rowscale(x, f);
}

NodeId mobius_add(Tape& t, const Geometry& g, NodeId x, NodeId y) {
    if (!g.hyperbolic()) return t.add(x, y);
    const double kappa = g.kappa();
    const NodeId xy = t.rowdot(x, y);
    const NodeId nx = t.rowdot(x, x);
    const NodeId ny = t.rowdot(y, y);
    const NodeId common = t.add_const(t.scale(xy, 2.0 * kappa), 1.0);  // 1 + 2k<x,y>
    const NodeId a = t.add(common, t.scale(ny, kappa));
    const NodeId b = t.add_const(t.scale(nx, -kappa), 1.0);
    const NodeId den = t.add(common, t.mul(t.scale(nx, kappa * kappa), ny));
    const NodeId num = t.add(t.rowscale(x, a), t.rowscale(y, b));
    return t.ball_clamp(t.rowscale(num, t.recip(den)), kappa);
}

NodeId conformal(Tape& t, const Geometry& g, NodeId x) {
    const NodeId nx = t.rowdot(x, x);
    if (!g.hyperbolic()) return t.add_const(t.scale(nx, 0.0), 1.0);  // metric factor 1
    return t.scale(t.recip(t.add_const(t.scale(nx, -g.kappa()), 1.0)), 2.0);
}

NodeId exp_at(Tape& t, const Geometry& g, NodeId base, NodeId v) {
    if (!g.hyperbolic()) return t.add(base, v);
    const double sk = g.sqrt_kappa();
    const NodeId lam = conformal(t, g, base);
    const NodeId r = t.rownorm(v);
    const NodeId arg = t.scale(t.mul(lam, r), sk / 2.0);
    const NodeId f = t.div(t.tanh_(arg), t.scale(r, sk));
    const NodeId step = t.rowscale(v, f);
    return mobius_add(t, g, base, step);
}

NodeId log_at(Tape& t, const Geometry& g, NodeId base, NodeId y) {
    if (!g.hyperbolic()) return t.sub(y, base);
    const double sk = g.sqrt_kappa();
    const NodeId u = mobius_add(t, g, t.neg(base), y);
    const NodeId lam = conformal(t, g, base);
    const NodeId ru = t.rownorm(u);
    const NodeId at = t.artanh_(t.scale(ru, sk));
    const NodeId f = t.mul(t.div(at, ru), t.scale(t.recip(lam), 2.0 / sk));
    return t.rowscale(u, f);
}

NodeId geodesic(Tape& t, const Geometry& g, NodeId x, NodeId y) {
    if (!g.hyperbolic()) {
        const NodeId d = t.sub(y, x);
        return t.rownorm(d);
    }
    const double sk = g.sqrt_kappa();
    const NodeId u = mobius_add(t, g, t.neg(x), y);
    return t.scale(t.artanh_(t.scale(t.rownorm(u), sk)), 2.0 / sk);
}

NodeId mobius_matvec(Tape& t, const Geometry& g, NodeId w, NodeId x) {
    const NodeId y = t.matmul(x, w);
    if (!g.hyperbolic()) return y;
    const double sk = g.sqrt_kappa();
    const NodeId rx = t.rownorm(x);
    const NodeId ry = t.rownorm(y);
    const NodeId f = t.div(t.tanh_(t.mul(t.div(ry, rx), t.artanh_(t.scale(rx, sk)))), t.scale(ry, sk));
    return t.ball_clamp(t.rowscale(y, f), g.kappa());
}

NodeId to_klein(Tape& t, const Geometry& g, NodeId x) {
    const NodeId nx = t.rowdot(x, x);
    const NodeId s = t.scale(t.recip(t.add_const(t.scale(nx, g.kappa()), 1.0)), 2.0);
    return t.rowscale(x, s);
}

NodeId from_klein(Tape& t, const Geometry& g, NodeId k) {
    const NodeId nk = t.rowdot(k, k);
    const NodeId under = t.clamp_min(t.add_const(t.scale(nk, -g.kappa()), 1.0), 1e-300);
    const NodeId s = t.recip(t.add_const(t.sqrt_(under), 1.0));
    return t.rowscale(k, s);
}

NodeId hyper_activation(Tape& t, const Geometry& g, NodeId x) {
    if (!g.hyperbolic()) return t.relu(x);
    return exp0(t, g, t.relu(log0(t, g, x)));
}

NodeId mobius_linear(Tape& t, const Geometry& g, NodeId w, NodeId b, NodeId x) {
    if (!g.hyperbolic()) return affine(t, x, w, b);
    const NodeId h = mobius_matvec(t, g, w, x);
    const std::vector<int> rep(static_cast<size_t>(t.val(h).rows), 0);
    const NodeId bb = t.gather_rows(b, rep);  // broadcast bias to every row
    return mobius_add(t, g, h, bb);
}

NodeId affine(Tape& t, NodeId x, NodeId w, NodeId b) { return t.add_rowvec(t.matmul(x, w), b); }

NodeId einstein_midpoint_grouped(Tape& t, const Geometry& g, NodeId x, int group) {
    if (!g.hyperbolic()) return t.scale(t.segment_sum(x, group), 1.0 / group);
    const NodeId kle = to_klein(t, g, x);
    const NodeId nk = t.rowdot(kle, kle);
    const NodeId under = t.clamp_min(t.add_const(t.scale(nk, -g.kappa()), 1.0), 1e-300);
    const NodeId gamma = t.recip(t.sqrt_(under));
    const NodeId num = t.segment_sum(t.rowscale(kle, gamma), group);
    const NodeId den = t.segment_sum(gamma, group);
    const NodeId mid = t.rowscale(num, t.recip(den));
    return t.ball_clamp(from_klein(t, g, mid), g.kappa());
}

NodeId einstein_midpoint(Tape& t, const Geometry& g, NodeId points) {
    const int m = t.val(points).rows;
    if (m < 1) throw std::invalid_argument("einstein_midpoint: empty input set");
    return einstein_midpoint_grouped(t, g, points, m);
}

NodeId softmax_rows(Tape& t, NodeId scores) {
    const NodeId m = t.rowmax(scores);
    const NodeId e = t.exp_(t.rowshift(scores, t.neg(m)));
    return t.rowscale(e, t.recip(t.rowsum(e)));
}

}  // namespace hypermesh::ad
