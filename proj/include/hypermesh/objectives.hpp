#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hypermesh/mesh.hpp"
#include "hypermesh/tape.hpp"

namespace hypermesh {

/// Evaluation summary; serialized as JSON with exactly these five fields.
/// Lengths in meters, volume in cm^3, Chamfer in squared meters.
struct MetricsReport {
    double hand_joint_err = 0.0;
    double hand_vert_err = 0.0;
    double object_chamfer = 0.0;
    double max_penetration = 0.0;
    double intersection_volume = 0.0;

    std::string to_json() const;
    MetricsReport& operator+=(const MetricsReport& o);
    MetricsReport& operator/=(double n);
};

// ---- losses (plain) ----

/// Mean over vertices of the squared Euclidean offset.
double l2_vertex_loss(const Array& pred, const Array& gt);
/// l2_vertex_loss restricted to the designated keypoint rows.
double keypoint_loss(const Mesh& pred, const Mesh& gt);
/// Mean over a of min squared distance to b, plus the same with roles swapped.
double chamfer_distance(const Array& a, const Array& b);
double chamfer_distance_serial(const Array& a, const Array& b);
/// (||T - Tgt||^2, (S - Sgt)^2)
std::pair<double, double> pose_losses(const Vec3& t, double s, const Vec3& t_gt, double s_gt);
double total_loss(double l_v_hand, double l_j, double l_v_obj, double l_t, double l_s);

// ---- error metrics (plain) ----

/// Mean over rows of the Euclidean distance (not squared).
double mean_vertex_error(const Array& pred, const Array& gt);
double mean_keypoint_error(const Mesh& pred, const Mesh& gt);

// ---- contact metrics (evaluation only, not differentiated) ----

/// 0 outside the mesh, distance to the nearest surface triangle inside.
double point_mesh_inside_depth(const Vec3& p, const Mesh& mesh);
/// Max over hand vertices of point_mesh_inside_depth against the object.
double max_penetration(const Mesh& hand, const Mesh& object);
double max_penetration_serial(const Mesh& hand, const Mesh& object);
/// Voxel-counted overlap volume in cm^3 at the given voxel edge (meters).
/// The grid is anchored at the min corner of the joint bounding box.
double intersection_volume(const Mesh& hand, const Mesh& object, double voxel = 0.005);
double intersection_volume_serial(const Mesh& hand, const Mesh& object, double voxel = 0.005);

// ---- losses (differentiable, recorded on the tape) ----

ad::NodeId loss_l2_vertices(ad::Tape& t, ad::NodeId pred, ad::NodeId gt);
ad::NodeId loss_keypoints(ad::Tape& t, ad::NodeId pred, ad::NodeId gt, const std::vector<int>& keypoints);
/// Nearest-pair selection is made on recorded values and treated as constant;
/// gradients flow through the selected pairs.
ad::NodeId loss_chamfer(ad::Tape& t, ad::NodeId a, ad::NodeId b);
std::pair<ad::NodeId, ad::NodeId> loss_pose(ad::Tape& t, ad::NodeId t_pred, ad::NodeId s_pred,
                                            const Vec3& t_gt, double s_gt);

}  // namespace hypermesh
