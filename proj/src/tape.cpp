#include "hypermesh/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hypermesh/manifold.hpp"

namespace hypermesh::ad {

const Tape::Node& Tape::node(NodeId id) const {
    if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
        throw std::invalid_argument("Tape: node " + std::to_string(id) + " is not recorded on this tape");
    }
    return nodes_[id];
}

Tape::Node& Tape::mut_node(NodeId id) { return const_cast<Node&>(node(id)); }

const Array& Tape::grad(NodeId id) const {
    const Node& n = node(id);
    if (n.grad.rows == 0) {
        throw std::logic_error(std::string("Tape: no gradient recorded for node of op ") + n.op);
    }
    return n.grad;
}

NodeId Tape::push(const char* op, std::vector<NodeId> in, Array val, std::function<void(Tape&, NodeId)> back) {
    bool needs = false;
    for (NodeId i : in) needs = needs || node(i).needs_grad;
    if (nan_guard && !val.all_finite()) {
        throw std::runtime_error(std::string("Tape: op '") + op + "' produced a non-finite value");
    }
    Node n;
    n.op = op;
    n.in = std::move(in);
    n.val = std::move(val);
    n.back = needs ? std::move(back) : nullptr;
    n.needs_grad = needs;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::add_grad(NodeId target, const Array& g) {
    Node& n = mut_node(target);
    if (!n.needs_grad) return;
    for (size_t i = 0; i < g.v.size(); ++i) n.grad.v[i] += g.v[i];
}

NodeId Tape::leaf(Array v) {
    Node n;
    n.op = "leaf";
    n.val = std::move(v);
    n.needs_grad = true;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::constant(Array v) {
    Node n;
    n.op = "constant";
    n.val = std::move(v);
    n.needs_grad = false;
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::backward(NodeId output) {
    Node& out = mut_node(output);
    if (out.val.rows != 1 || out.val.cols != 1) {
        throw std::invalid_argument("Tape::backward: output must be scalar (1x1), got " + shape_str(out.val));
    }
    for (Node& n : nodes_) {
        if (n.needs_grad) {
            n.grad = Array(n.val.rows, n.val.cols, 0.0);
        }
    }
    if (!out.needs_grad) return;  // constant graph: all leaf grads stay zero
    out.grad.at(0, 0) = 1.0;
    for (NodeId id = output; id >= 0; --id) {
        Node& n = nodes_[id];
        if (n.needs_grad && n.back) n.back(*this, id);
    }
}

// ---- elementwise ----

NodeId Tape::add(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "tape add");
    Array z = val(a);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] += val(b).v[i];
    return push("add", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        t.add_grad(a, g);
        t.add_grad(b, g);
    });
}

NodeId Tape::sub(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "tape sub");
    Array z = val(a);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] -= val(b).v[i];
    return push("sub", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        t.add_grad(a, g);
        if (t.nodes_[b].needs_grad) {
            Array gb = g;
            for (double& e : gb.v) e = -e;
            t.add_grad(b, gb);
        }
    });
}

NodeId Tape::mul(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "tape mul");
    Array z = val(a);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] *= val(b).v[i];
    return push("mul", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        if (t.nodes_[a].needs_grad) {
            Array ga = g;
            for (size_t i = 0; i < ga.v.size(); ++i) ga.v[i] *= t.nodes_[b].val.v[i];
            t.add_grad(a, ga);
        }
        if (t.nodes_[b].needs_grad) {
            Array gb = g;
            for (size_t i = 0; i < gb.v.size(); ++i) gb.v[i] *= t.nodes_[a].val.v[i];
            t.add_grad(b, gb);
        }
    });
}

NodeId Tape::div(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "tape div");
    Array z = val(a);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] /= val(b).v[i];
    return push("div", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& bv = t.nodes_[b].val;
        if (t.nodes_[a].needs_grad) {
            Array ga = g;
            for (size_t i = 0; i < ga.v.size(); ++i) ga.v[i] /= bv.v[i];
            t.add_grad(a, ga);
        }
        if (t.nodes_[b].needs_grad) {
            Array gb = g;
            const Array& zv = t.nodes_[self].val;
            for (size_t i = 0; i < gb.v.size(); ++i) gb.v[i] *= -zv.v[i] / bv.v[i];
            t.add_grad(b, gb);
        }
    });
}

NodeId Tape::scale(NodeId a, double s) {
    Array z = val(a);
    for (double& e : z.v) e *= s;
    return push("scale", {a}, std::move(z), [a, s](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        for (double& e : g.v) e *= s;
        t.add_grad(a, g);
    });
}

NodeId Tape::add_const(NodeId a, double s) {
    Array z = val(a);
    for (double& e : z.v) e += s;
    return push("add_const", {a}, std::move(z),
                [a](Tape& t, NodeId self) { t.add_grad(a, t.nodes_[self].grad); });
}

NodeId Tape::tanh_(NodeId a) {
    Array z = val(a);
    for (double& e : z.v) e = std::tanh(e);
    return push("tanh", {a}, std::move(z), [a](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& zv = t.nodes_[self].val;
        for (size_t i = 0; i < g.v.size(); ++i) g.v[i] *= 1.0 - zv.v[i] * zv.v[i];
        t.add_grad(a, g);
    });
}

NodeId Tape::artanh_(NodeId a) {
    Array z = val(a);
    for (double& e : z.v) e = artanh(e);
    return push("artanh", {a}, std::move(z), [a](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& xv = t.nodes_[a].val;
        const double lim = 1.0 - ARTANH_EPS;
        for (size_t i = 0; i < g.v.size(); ++i) {
            const double x = xv.v[i];
            g.v[i] = (x > -lim && x < lim) ? g.v[i] / (1.0 - x * x) : 0.0;
        }
        t.add_grad(a, g);
    });
}

NodeId Tape::exp_(NodeId a) {
    Array z = val(a);
    for (double& e : z.v) e = std::exp(e);
    return push("exp", {a}, std::move(z), [a](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& zv = t.nodes_[self].val;
        for (size_t i = 0; i < g.v.size(); ++i) g.v[i] *= zv.v[i];
        t.add_grad(a, g);
    });
}

NodeId Tape::sqrt_(NodeId a) {
    Array z = val(a);
    for (double& e : z.v) e = std::sqrt(std::max(e, 0.0));
    return push("sqrt", {a}, std::move(z), [a](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& xv = t.nodes_[a].val;
        const Array& zv = t.nodes_[self].val;
        for (size_t i = 0; i < g.v.size(); ++i) {
            g.v[i] = xv.v[i] > 0.0 ? g.v[i] / (2.0 * zv.v[i]) : 0.0;
        }
        t.add_grad(a, g);
    });
}

NodeId Tape::recip(NodeId a) {
    Array z = val(a);
    for (double& e : z.v) e = 1.0 / e;
    return push("recip", {a}, std::move(z), [a](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& zv = t.nodes_[self].val;
        for (size_t i = 0; i < g.v.size(); ++i) g.v[i] *= -zv.v[i] * zv.v[i];
        t.add_grad(a, g);
    });
}

NodeId Tape::relu(NodeId a) {
    Array z = val(a);
    for (double& e : z.v) e = e > 0.0 ? e : 0.0;
    return push("relu", {a}, std::move(z), [a](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& xv = t.nodes_[a].val;
        for (size_t i = 0; i < g.v.size(); ++i) {
            if (xv.v[i] <= 0.0) g.v[i] = 0.0;
        }
        t.add_grad(a, g);
    });
}

NodeId Tape::clamp_min(NodeId a, double lo) {
    Array z = val(a);
    for (double& e : z.v) e = e > lo ? e : lo;
    return push("clamp_min", {a}, std::move(z), [a, lo](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        const Array& xv = t.nodes_[a].val;
        for (size_t i = 0; i < g.v.size(); ++i) {
            if (xv.v[i] <= lo) g.v[i] = 0.0;
        }
        t.add_grad(a, g);
    });
}

// ---- matrix products ----

NodeId Tape::matmul(NodeId a, NodeId b) {
    Array z = hypermesh::matmul(val(a), val(b));
    return push("matmul", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        if (t.nodes_[a].needs_grad) t.add_grad(a, hypermesh::matmul_nt(g, t.nodes_[b].val));
        if (t.nodes_[b].needs_grad) t.add_grad(b, hypermesh::matmul_tn(t.nodes_[a].val, g));
    });
}

NodeId Tape::matmul_nt(NodeId a, NodeId b) {
    Array z = hypermesh::matmul_nt(val(a), val(b));
    return push("matmul_nt", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        if (t.nodes_[a].needs_grad) t.add_grad(a, hypermesh::matmul(g, t.nodes_[b].val));
        if (t.nodes_[b].needs_grad) t.add_grad(b, hypermesh::matmul_tn(g, t.nodes_[a].val));
    });
}

// ---- row reductions / broadcasts ----

NodeId Tape::rowdot(NodeId a, NodeId b) {
    require_same_shape(val(a), val(b), "tape rowdot");
    const Array& av = val(a);
    const Array& bv = val(b);
    Array z(av.rows, 1);
    for (int i = 0; i < av.rows; ++i) z.at(i, 0) = dot(av.row(i), bv.row(i));
    return push("rowdot", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        const Array& bv = t.nodes_[b].val;
        if (t.nodes_[a].needs_grad) {
            Array ga(av.rows, av.cols);
            for (int i = 0; i < av.rows; ++i)
                for (int j = 0; j < av.cols; ++j) ga.at(i, j) = g.at(i, 0) * bv.at(i, j);
            t.add_grad(a, ga);
        }
        if (t.nodes_[b].needs_grad) {
            Array gb(bv.rows, bv.cols);
            for (int i = 0; i < bv.rows; ++i)
                for (int j = 0; j < bv.cols; ++j) gb.at(i, j) = g.at(i, 0) * av.at(i, j);
            t.add_grad(b, gb);
        }
    });
}

NodeId Tape::rownorm(NodeId a) {
    const Array& av = val(a);
    Array z(av.rows, 1);
    for (int i = 0; i < av.rows; ++i) z.at(i, 0) = std::max(norm2(av.row(i)), MIN_NORM);
    return push("rownorm", {a}, std::move(z), [a](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        const Array& zv = t.nodes_[self].val;
        Array ga(av.rows, av.cols, 0.0);
        for (int i = 0; i < av.rows; ++i) {
            if (zv.at(i, 0) <= MIN_NORM) continue;
            const double s = g.at(i, 0) / zv.at(i, 0);
            for (int j = 0; j < av.cols; ++j) ga.at(i, j) = s * av.at(i, j);
        }
        t.add_grad(a, ga);
    });
}

NodeId Tape::rowsum(NodeId a) {
    const Array& av = val(a);
    Array z(av.rows, 1);
    for (int i = 0; i < av.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < av.cols; ++j) s += av.at(i, j);
        z.at(i, 0) = s;
    }
    return push("rowsum", {a}, std::move(z), [a](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols);
        for (int i = 0; i < av.rows; ++i)
            for (int j = 0; j < av.cols; ++j) ga.at(i, j) = g.at(i, 0);
        t.add_grad(a, ga);
    });
}

NodeId Tape::rowmax(NodeId a) {
    const Array& av = val(a);
    Array z(av.rows, 1);
    std::vector<int> arg(av.rows, 0);
    for (int i = 0; i < av.rows; ++i) {
        double best = av.at(i, 0);
        int bj = 0;
        for (int j = 1; j < av.cols; ++j) {
            if (av.at(i, j) > best) {
                best = av.at(i, j);
                bj = j;
            }
        }
        z.at(i, 0) = best;
        arg[i] = bj;
    }
    return push("rowmax", {a}, std::move(z), [a, arg = std::move(arg)](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols, 0.0);
        for (int i = 0; i < av.rows; ++i) ga.at(i, arg[i]) = g.at(i, 0);
        t.add_grad(a, ga);
    });
}

NodeId Tape::colsum(NodeId a) {
    const Array& av = val(a);
    Array z(1, av.cols, 0.0);
    for (int i = 0; i < av.rows; ++i)
        for (int j = 0; j < av.cols; ++j) z.at(0, j) += av.at(i, j);
    return push("colsum", {a}, std::move(z), [a](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols);
        for (int i = 0; i < av.rows; ++i)
            for (int j = 0; j < av.cols; ++j) ga.at(i, j) = g.at(0, j);
        t.add_grad(a, ga);
    });
}

NodeId Tape::sum_all(NodeId a) {
    const Array& av = val(a);
    double s = 0.0;
    for (double e : av.v) s += e;
    Array z(1, 1);
    z.at(0, 0) = s;
    return push("sum_all", {a}, std::move(z), [a](Tape& t, NodeId self) {
        const double g = t.nodes_[self].grad.at(0, 0);
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols, g);
        t.add_grad(a, ga);
    });
}

NodeId Tape::rowscale(NodeId x, NodeId s) {
    const Array& xv = val(x);
    const Array& sv = val(s);
    if (sv.rows != xv.rows || sv.cols != 1) {
        throw std::invalid_argument("tape rowscale: scale must be (n,1), got " + shape_str(sv));
    }
    Array z(xv.rows, xv.cols);
    for (int i = 0; i < xv.rows; ++i)
        for (int j = 0; j < xv.cols; ++j) z.at(i, j) = xv.at(i, j) * sv.at(i, 0);
    return push("rowscale", {x, s}, std::move(z), [x, s](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& xv = t.nodes_[x].val;
        const Array& sv = t.nodes_[s].val;
        if (t.nodes_[x].needs_grad) {
            Array gx(xv.rows, xv.cols);
            for (int i = 0; i < xv.rows; ++i)
                for (int j = 0; j < xv.cols; ++j) gx.at(i, j) = g.at(i, j) * sv.at(i, 0);
            t.add_grad(x, gx);
        }
        if (t.nodes_[s].needs_grad) {
            Array gs(xv.rows, 1, 0.0);
            for (int i = 0; i < xv.rows; ++i) {
                double acc = 0.0;
                for (int j = 0; j < xv.cols; ++j) acc += g.at(i, j) * xv.at(i, j);
                gs.at(i, 0) = acc;
            }
            t.add_grad(s, gs);
        }
    });
}

NodeId Tape::rowshift(NodeId x, NodeId s) {
    const Array& xv = val(x);
    const Array& sv = val(s);
    if (sv.rows != xv.rows || sv.cols != 1) {
        throw std::invalid_argument("tape rowshift: shift must be (n,1), got " + shape_str(sv));
    }
    Array z(xv.rows, xv.cols);
    for (int i = 0; i < xv.rows; ++i)
        for (int j = 0; j < xv.cols; ++j) z.at(i, j) = xv.at(i, j) + sv.at(i, 0);
    return push("rowshift", {x, s}, std::move(z), [x, s](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        t.add_grad(x, g);
        if (t.nodes_[s].needs_grad) {
            Array gs(g.rows, 1, 0.0);
            for (int i = 0; i < g.rows; ++i) {
                double acc = 0.0;
                for (int j = 0; j < g.cols; ++j) acc += g.at(i, j);
                gs.at(i, 0) = acc;
            }
            t.add_grad(s, gs);
        }
    });
}

NodeId Tape::add_rowvec(NodeId x, NodeId b) {
    const Array& xv = val(x);
    const Array& bv = val(b);
    if (bv.rows != 1 || bv.cols != xv.cols) {
        throw std::invalid_argument("tape add_rowvec: bias must be (1,d), got " + shape_str(bv));
    }
    Array z(xv.rows, xv.cols);
    for (int i = 0; i < xv.rows; ++i)
        for (int j = 0; j < xv.cols; ++j) z.at(i, j) = xv.at(i, j) + bv.at(0, j);
    return push("add_rowvec", {x, b}, std::move(z), [x, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        t.add_grad(x, g);
        if (t.nodes_[b].needs_grad) {
            Array gb(1, g.cols, 0.0);
            for (int i = 0; i < g.rows; ++i)
                for (int j = 0; j < g.cols; ++j) gb.at(0, j) += g.at(i, j);
            t.add_grad(b, gb);
        }
    });
}

// ---- structure ----

NodeId Tape::gather_rows(NodeId a, std::vector<int> idx) {
    const Array& av = val(a);
    Array z(static_cast<int>(idx.size()), av.cols);
    for (size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] < 0 || idx[r] >= av.rows) throw std::invalid_argument("tape gather_rows: index out of range");
        for (int j = 0; j < av.cols; ++j) z.at(static_cast<int>(r), j) = av.at(idx[r], j);
    }
    return push("gather_rows", {a}, std::move(z), [a, idx = std::move(idx)](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols, 0.0);
        for (size_t r = 0; r < idx.size(); ++r)
            for (int j = 0; j < av.cols; ++j) ga.at(idx[r], j) += g.at(static_cast<int>(r), j);
        t.add_grad(a, ga);
    });
}

NodeId Tape::slice_rows(NodeId a, int begin, int count) {
    const Array& av = val(a);
    if (begin < 0 || begin + count > av.rows) throw std::invalid_argument("tape slice_rows: out of range");
    Array z(count, av.cols);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < av.cols; ++j) z.at(i, j) = av.at(begin + i, j);
    return push("slice_rows", {a}, std::move(z), [a, begin, count](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols, 0.0);
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < av.cols; ++j) ga.at(begin + i, j) = g.at(i, j);
        t.add_grad(a, ga);
    });
}

NodeId Tape::slice_cols(NodeId a, int begin, int count) {
    const Array& av = val(a);
    if (begin < 0 || begin + count > av.cols) throw std::invalid_argument("tape slice_cols: out of range");
    Array z(av.rows, count);
    for (int i = 0; i < av.rows; ++i)
        for (int j = 0; j < count; ++j) z.at(i, j) = av.at(i, begin + j);
    return push("slice_cols", {a}, std::move(z), [a, begin, count](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols, 0.0);
        for (int i = 0; i < av.rows; ++i)
            for (int j = 0; j < count; ++j) ga.at(i, begin + j) = g.at(i, j);
        t.add_grad(a, ga);
    });
}

NodeId Tape::concat_cols(NodeId a, NodeId b) {
    const Array& av = val(a);
    const Array& bv = val(b);
    if (av.rows != bv.rows) throw std::invalid_argument("tape concat_cols: row mismatch");
    Array z(av.rows, av.cols + bv.cols);
    for (int i = 0; i < av.rows; ++i) {
        for (int j = 0; j < av.cols; ++j) z.at(i, j) = av.at(i, j);
        for (int j = 0; j < bv.cols; ++j) z.at(i, av.cols + j) = bv.at(i, j);
    }
    return push("concat_cols", {a, b}, std::move(z), [a, b](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        const Array& bv = t.nodes_[b].val;
        if (t.nodes_[a].needs_grad) {
            Array ga(av.rows, av.cols);
            for (int i = 0; i < av.rows; ++i)
                for (int j = 0; j < av.cols; ++j) ga.at(i, j) = g.at(i, j);
            t.add_grad(a, ga);
        }
        if (t.nodes_[b].needs_grad) {
            Array gb(bv.rows, bv.cols);
            for (int i = 0; i < bv.rows; ++i)
                for (int j = 0; j < bv.cols; ++j) gb.at(i, j) = g.at(i, av.cols + j);
            t.add_grad(b, gb);
        }
    });
}

NodeId Tape::concat_rows(const std::vector<NodeId>& parts) {
    if (parts.empty()) throw std::invalid_argument("tape concat_rows: no parts");
    const int cols = val(parts[0]).cols;
    int rows = 0;
    for (NodeId p : parts) {
        if (val(p).cols != cols) throw std::invalid_argument("tape concat_rows: column mismatch");
        rows += val(p).rows;
    }
    Array z(rows, cols);
    int r = 0;
    for (NodeId p : parts) {
        const Array& pv = val(p);
        for (int i = 0; i < pv.rows; ++i, ++r)
            for (int j = 0; j < cols; ++j) z.at(r, j) = pv.at(i, j);
    }
    return push("concat_rows", parts, std::move(z), [parts](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        int r = 0;
        for (NodeId p : parts) {
            const Array& pv = t.nodes_[p].val;
            if (t.nodes_[p].needs_grad) {
                Array gp(pv.rows, pv.cols);
                for (int i = 0; i < pv.rows; ++i)
                    for (int j = 0; j < pv.cols; ++j) gp.at(i, j) = g.at(r + i, j);
                t.add_grad(p, gp);
            }
            r += pv.rows;
        }
    });
}

NodeId Tape::segment_sum(NodeId a, int group) {
    const Array& av = val(a);
    if (group < 1 || av.rows % group != 0) {
        throw std::invalid_argument("tape segment_sum: rows not divisible by group size");
    }
    const int n = av.rows / group;
    Array z(n, av.cols, 0.0);
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < group; ++r)
            for (int j = 0; j < av.cols; ++j) z.at(i, j) += av.at(i * group + r, j);
    return push("segment_sum", {a}, std::move(z), [a, group](Tape& t, NodeId self) {
        const Array& g = t.nodes_[self].grad;
        const Array& av = t.nodes_[a].val;
        Array ga(av.rows, av.cols);
        for (int i = 0; i < g.rows; ++i)
            for (int r = 0; r < group; ++r)
                for (int j = 0; j < av.cols; ++j) ga.at(i * group + r, j) = g.at(i, j);
        t.add_grad(a, ga);
    });
}

NodeId Tape::ball_clamp(NodeId a, double kappa) {
    const Array& av = val(a);
    Array z = av;
    std::vector<char> clamped(av.rows, 0);
    for (int i = 0; i < av.rows; ++i) {
        const double r = norm2(av.row(i)) * std::sqrt(kappa);
        if (r >= 1.0 - BALL_EPS) {
            const double s = (1.0 - BALL_EPS) / r;
            for (int j = 0; j < av.cols; ++j) z.at(i, j) *= s;
            clamped[i] = 1;
        }
    }
    return push("ball_clamp", {a}, std::move(z), [a, clamped = std::move(clamped)](Tape& t, NodeId self) {
        Array g = t.nodes_[self].grad;
        for (int i = 0; i < g.rows; ++i) {
            if (clamped[i]) {
                for (int j = 0; j < g.cols; ++j) g.at(i, j) = 0.0;
            }
        }
        t.add_grad(a, g);
    });
}

}  // namespace hypermesh::ad
