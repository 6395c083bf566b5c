#pragma once

#include <vector>

#include "hypermesh/manifold.hpp"

namespace hypermesh {

enum class NeighborSource { Mesh, Shallow, DeepHand, DeepObject };
const char* to_string(NeighborSource s);

/// Per-node neighbor lists, each row sorted by ascending geodesic distance with
/// ties broken by ascending reference index.
struct NeighborGraph {
    std::vector<int> indices;  // n*k, row-major
    int n = 0;
    int k = 0;
    NeighborSource source = NeighborSource::Mesh;

    int at(int i, int j) const { return indices[static_cast<size_t>(i) * k + j]; }
    const std::vector<int>& flat() const { return indices; }
};

/// Exact k-nearest-neighbor search under the geodesic distance. Ranking uses
/// 2*kappa*||x-y||^2/((1-kappa||x||^2)(1-kappa||y||^2)), a strictly increasing
/// function of the distance, so the selected sets and their order match a
/// direct distance sort. include_self=false requires queries and refs to be
/// the same set and skips ref j == query i.
NeighborGraph hyperbolic_knn(const BallTensor& queries, const BallTensor& refs, int k, bool include_self,
                             NeighborSource source = NeighborSource::Mesh);
NeighborGraph hyperbolic_knn_serial(const BallTensor& queries, const BallTensor& refs, int k, bool include_self,
                                    NeighborSource source = NeighborSource::Mesh);

/// Euclidean twin used by the ablation pipeline (squared-distance ranking).
NeighborGraph euclidean_knn(const Array& queries, const Array& refs, int k, bool include_self,
                            NeighborSource source = NeighborSource::Mesh);

/// Self-kNN over the feature set itself, self excluded; rebuilt per layer.
NeighborGraph build_dynamic_graph(const BallTensor& features, int k);
NeighborGraph build_dynamic_graph_euclidean(const Array& features, int k);

/// The four per-vertex neighborhoods of the image-attention convolution:
/// f1 mesh->mesh (self excluded), f2 mesh->shallow, q mesh->deep-hand,
/// kk mesh->deep-object (self allowed in the non-mesh sets).
struct CrossModalGraphs {
    NeighborGraph f1, f2, q, kk;
};

CrossModalGraphs build_cross_modal_neighborhoods(const BallTensor& mesh, const BallTensor& shallow,
                                                 const BallTensor& deep_hand, const BallTensor& deep_obj, int k);
CrossModalGraphs build_cross_modal_neighborhoods_euclidean(const Array& mesh, const Array& shallow,
                                                           const Array& deep_hand, const Array& deep_obj, int k);

}  // namespace hypermesh
