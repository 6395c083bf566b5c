#include "hypermesh/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hypermesh/threading.hpp"

namespace hypermesh {

const char* to_string(NeighborSource s) {
    switch (s) {
        case NeighborSource::Mesh: return "mesh";
        case NeighborSource::Shallow: return "shallow";
        case NeighborSource::DeepHand: return "deep_hand";
        case NeighborSource::DeepObject: return "deep_object";
    }
    return "?";
}

namespace {

struct Candidate {
    double key;
    int idx;
    bool operator<(const Candidate& o) const { return key < o.key || (key == o.key && idx < o.idx); }
};

void check_knn_args(int n_ref, int n_query, int dim_q, int dim_r, int k, bool include_self) {
    if (dim_q != dim_r) throw std::invalid_argument("knn: dimension mismatch");
    const int avail = include_self ? n_ref : n_ref - 1;
    if (k < 1 || k > avail) {
        throw std::invalid_argument("knn: k=" + std::to_string(k) + " out of range for " +
                                    std::to_string(n_ref) + " refs" + (include_self ? "" : " (self excluded)"));
    }
    if (!include_self && n_query != n_ref) {
        throw std::invalid_argument("knn: self exclusion requires queries == refs");
    }
}

// shared search core; key(i, j) must be monotone in distance
template <typename KeyFn, typename RowLoop>
NeighborGraph knn_core(int n_query, int n_ref, int k, bool include_self, NeighborSource source, KeyFn&& key,
                       RowLoop&& rows) {
    NeighborGraph g;
    g.n = n_query;
    g.k = k;
    g.source = source;
    g.indices.assign(static_cast<size_t>(n_query) * k, -1);
    rows(n_query, [&](int i) {
        std::vector<Candidate> cand;
        cand.reserve(n_ref);
        for (int j = 0; j < n_ref; ++j) {
            if (!include_self && j == i) continue;
            cand.push_back({key(i, j), j});
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        for (int j = 0; j < k; ++j) g.indices[static_cast<size_t>(i) * k + j] = cand[j].idx;
    });
    return g;
}

template <typename F>
void par_rows(int n, F&& f) {
    if (parallel_worthwhile(n)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
        for (int i = 0; i < n; ++i) f(i);
    } else {
        for (int i = 0; i < n; ++i) f(i);
    }
}

template <typename F>
void ser_rows(int n, F&& f) {
    for (int i = 0; i < n; ++i) f(i);
}

std::vector<double> row_sumsqs(const Array& a) {
    std::vector<double> out(a.rows);
    for (int i = 0; i < a.rows; ++i) out[i] = sumsq(a.row(i));
    return out;
}

template <typename RowLoop>
NeighborGraph hyper_knn_impl(const BallTensor& queries, const BallTensor& refs, int k, bool include_self,
                             NeighborSource source, RowLoop&& rows) {
    require_same_curvature(queries, refs, "hyperbolic_knn");
    check_knn_args(refs.rows(), queries.rows(), queries.cols(), refs.cols(), k, include_self);
    const double kappa = queries.curv.kappa();
    const std::vector<double> qs = row_sumsqs(queries.data);
    const std::vector<double> rs = row_sumsqs(refs.data);
    return knn_core(
        queries.rows(), refs.rows(), k, include_self, source,
        [&](int i, int j) {
            return rowk::geodesic_sort_key(queries.data.row(i), refs.data.row(j), kappa, qs[i], rs[j]);
        },
        rows);
}

template <typename RowLoop>
NeighborGraph eucl_knn_impl(const Array& queries, const Array& refs, int k, bool include_self,
                            NeighborSource source, RowLoop&& rows) {
    check_knn_args(refs.rows, queries.rows, queries.cols, refs.cols, k, include_self);
    const std::vector<double> qs = row_sumsqs(queries);
    const std::vector<double> rs = row_sumsqs(refs);
    return knn_core(
        queries.rows, refs.rows, k, include_self, source,
        [&](int i, int j) {
            return std::max(qs[i] + rs[j] - 2.0 * dot(queries.row(i), refs.row(j)), 0.0);
        },
        rows);
}

}  // namespace

NeighborGraph hyperbolic_knn(const BallTensor& queries, const BallTensor& refs, int k, bool include_self,
                             NeighborSource source) {
    return hyper_knn_impl(queries, refs, k, include_self, source,
                          [](int n, auto&& f) { par_rows(n, f); });
}

NeighborGraph hyperbolic_knn_serial(const BallTensor& queries, const BallTensor& refs, int k, bool include_self,
                                    NeighborSource source) {
    return hyper_knn_impl(queries, refs, k, include_self, source,
                          [](int n, auto&& f) { ser_rows(n, f); });
}

NeighborGraph euclidean_knn(const Array& queries, const Array& refs, int k, bool include_self,
                            NeighborSource source) {
    return eucl_knn_impl(queries, refs, k, include_self, source,
                         [](int n, auto&& f) { par_rows(n, f); });
}

NeighborGraph build_dynamic_graph(const BallTensor& features, int k) {
    if (features.rows() <= k) {
        throw std::invalid_argument("build_dynamic_graph: need more than k=" + std::to_string(k) + " nodes");
    }
    return hyperbolic_knn(features, features, k, /*include_self=*/false, NeighborSource::Mesh);
}

NeighborGraph build_dynamic_graph_euclidean(const Array& features, int k) {
    if (features.rows <= k) {
        throw std::invalid_argument("build_dynamic_graph: need more than k=" + std::to_string(k) + " nodes");
    }
    return euclidean_knn(features, features, k, /*include_self=*/false, NeighborSource::Mesh);
}

namespace {

void check_cross_modal(int n, int s, int p, int q, int d, int ds, int dp, int dq, int k) {
    if (ds != d || dp != d || dq != d) {
        throw std::invalid_argument("cross_modal: all feature sets must share dimension " + std::to_string(d));
    }
    const int lim = std::min(std::min(n - 1, s), std::min(p, q));
    if (k < 1 || k > lim) {
        throw std::invalid_argument("cross_modal: k=" + std::to_string(k) + " exceeds min(n-1,s,p,q)=" +
                                    std::to_string(lim));
    }
}

}  // namespace

CrossModalGraphs build_cross_modal_neighborhoods(const BallTensor& mesh, const BallTensor& shallow,
                                                 const BallTensor& deep_hand, const BallTensor& deep_obj, int k) {
    require_same_curvature(mesh, shallow, "cross_modal");
    require_same_curvature(mesh, deep_hand, "cross_modal");
    require_same_curvature(mesh, deep_obj, "cross_modal");
    check_cross_modal(mesh.rows(), shallow.rows(), deep_hand.rows(), deep_obj.rows(), mesh.cols(),
                      shallow.cols(), deep_hand.cols(), deep_obj.cols(), k);
    CrossModalGraphs out;
    out.f1 = hyperbolic_knn(mesh, mesh, k, false, NeighborSource::Mesh);
    out.f2 = hyperbolic_knn(mesh, shallow, k, true, NeighborSource::Shallow);
    out.q = hyperbolic_knn(mesh, deep_hand, k, true, NeighborSource::DeepHand);
    out.kk = hyperbolic_knn(mesh, deep_obj, k, true, NeighborSource::DeepObject);
    return out;
}

CrossModalGraphs build_cross_modal_neighborhoods_euclidean(const Array& mesh, const Array& shallow,
                                                           const Array& deep_hand, const Array& deep_obj, int k) {
    check_cross_modal(mesh.rows, shallow.rows, deep_hand.rows, deep_obj.rows, mesh.cols, shallow.cols,
                      deep_hand.cols, deep_obj.cols, k);
    CrossModalGraphs out;
    out.f1 = euclidean_knn(mesh, mesh, k, false, NeighborSource::Mesh);
    out.f2 = euclidean_knn(mesh, shallow, k, true, NeighborSource::Shallow);
    out.q = euclidean_knn(mesh, deep_hand, k, true, NeighborSource::DeepHand);
    out.kk = euclidean_knn(mesh, deep_obj, k, true, NeighborSource::DeepObject);
    return out;
}

}  // namespace hypermesh
