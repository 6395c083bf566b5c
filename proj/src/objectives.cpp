#include "hypermesh/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "hypermesh/threading.hpp"

namespace hypermesh {

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["hand_joint_err"] = hand_joint_err;
    j["hand_vert_err"] = hand_vert_err;
    j["object_chamfer"] = object_chamfer;
    j["max_penetration"] = max_penetration;
    j["intersection_volume"] = intersection_volume;
    return j.dump(2) + "\n";
}

MetricsReport& MetricsReport::operator+=(const MetricsReport& o) {
    hand_joint_err += o.hand_joint_err;
    hand_vert_err += o.hand_vert_err;
    object_chamfer += o.object_chamfer;
    max_penetration += o.max_penetration;
    intersection_volume += o.intersection_volume;
    return *this;
}

MetricsReport& MetricsReport::operator/=(double n) {
    hand_joint_err /= n;
    hand_vert_err /= n;
    object_chamfer /= n;
    max_penetration /= n;
    intersection_volume /= n;
    return *this;
}

double l2_vertex_loss(const Array& pred, const Array& gt) {
    require_same_shape(pred, gt, "l2_vertex_loss");
    double acc = 0.0;
    for (int i = 0; i < pred.rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < pred.cols; ++j) {
            const double d = pred.at(i, j) - gt.at(i, j);
            row += d * d;
        }
        acc += row;
    }
    return acc / pred.rows;
}

double keypoint_loss(const Mesh& pred, const Mesh& gt) {
    if (pred.keypoints.empty() || pred.keypoints != gt.keypoints) {
        throw std::invalid_argument("keypoint_loss: meshes must share a non-empty keypoint list");
    }
    return l2_vertex_loss(pred.keypoint_rows(), gt.keypoint_rows());
}

namespace {

double min_sq_dist_to(const Array& from, int i, const Array& to) {
    double best = std::numeric_limits<double>::max();
    for (int j = 0; j < to.rows; ++j) {
        double d = 0.0;
        for (int c = 0; c < from.cols; ++c) {
            const double e = from.at(i, c) - to.at(j, c);
            d += e * e;
        }
        best = std::min(best, d);
    }
    return best;
}

template <typename RowLoop>
double chamfer_impl(const Array& a, const Array& b, RowLoop&& rows) {
    if (a.rows < 1 || b.rows < 1) throw std::invalid_argument("chamfer_distance: empty point set");
    if (a.cols != b.cols) throw std::invalid_argument("chamfer_distance: dimension mismatch");
    std::vector<double> mins_a(a.rows), mins_b(b.rows);
    rows(a.rows, [&](int i) { mins_a[i] = min_sq_dist_to(a, i, b); });
    rows(b.rows, [&](int j) { mins_b[j] = min_sq_dist_to(b, j, a); });
    double sa = 0.0, sb = 0.0;
    for (double m : mins_a) sa += m;
    for (double m : mins_b) sb += m;
    return sa / a.rows + sb / b.rows;
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

}  // namespace

double chamfer_distance(const Array& a, const Array& b) {
    return chamfer_impl(a, b, [](int n, auto&& f) { par_rows(n, f); });
}

double chamfer_distance_serial(const Array& a, const Array& b) {
    return chamfer_impl(a, b, [](int n, auto&& f) {
        for (int i = 0; i < n; ++i) f(i);
    });
}

std::pair<double, double> pose_losses(const Vec3& t, double s, const Vec3& t_gt, double s_gt) {
    const Vec3 d = t - t_gt;
    const double ds = s - s_gt;
    return {d.dot(d), ds * ds};
}

double total_loss(double l_v_hand, double l_j, double l_v_obj, double l_t, double l_s) {
    return l_v_hand + l_j + l_v_obj + l_t + l_s;
}

double mean_vertex_error(const Array& pred, const Array& gt) {
    require_same_shape(pred, gt, "mean_vertex_error");
    double acc = 0.0;
    for (int i = 0; i < pred.rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < pred.cols; ++j) {
            const double d = pred.at(i, j) - gt.at(i, j);
            row += d * d;
        }
        acc += std::sqrt(row);
    }
    return acc / pred.rows;
}

double mean_keypoint_error(const Mesh& pred, const Mesh& gt) {
    if (pred.keypoints.empty() || pred.keypoints != gt.keypoints) {
        throw std::invalid_argument("mean_keypoint_error: meshes must share a non-empty keypoint list");
    }
    return mean_vertex_error(pred.keypoint_rows(), gt.keypoint_rows());
}

double point_mesh_inside_depth(const Vec3& p, const Mesh& mesh) {
    if (!point_inside_mesh(p, mesh)) return 0.0;
    return distance_to_surface(p, mesh);
}

namespace {

template <typename RowLoop>
double penetration_impl(const Mesh& hand, const Mesh& object, RowLoop&& rows) {
    if (!hand.bounds().overlaps(object.bounds())) return 0.0;
    std::vector<double> depth(hand.vertex_count(), 0.0);
    rows(hand.vertex_count(), [&](int i) { depth[i] = point_mesh_inside_depth(hand.vertex(i), object); });
    double best = 0.0;
    for (double d : depth) best = std::max(best, d);
    return best;
}

template <typename RowLoop>
double volume_impl(const Mesh& hand, const Mesh& object, double voxel, RowLoop&& rows) {
    if (voxel <= 0.0) throw std::invalid_argument("intersection_volume: voxel size must be positive");
    const Aabb hb = hand.bounds(), ob = object.bounds();
    if (!hb.overlaps(ob)) return 0.0;
    // grid anchored at the joint bounding box min corner
    const Vec3 anchor{std::min(hb.lo.x, ob.lo.x), std::min(hb.lo.y, ob.lo.y), std::min(hb.lo.z, ob.lo.z)};
    const Vec3 olo{std::max(hb.lo.x, ob.lo.x), std::max(hb.lo.y, ob.lo.y), std::max(hb.lo.z, ob.lo.z)};
    const Vec3 ohi{std::min(hb.hi.x, ob.hi.x), std::min(hb.hi.y, ob.hi.y), std::min(hb.hi.z, ob.hi.z)};
    const int ix0 = static_cast<int>(std::floor((olo.x - anchor.x) / voxel));
    const int ix1 = static_cast<int>(std::ceil((ohi.x - anchor.x) / voxel));
    const int iy0 = static_cast<int>(std::floor((olo.y - anchor.y) / voxel));
    const int iy1 = static_cast<int>(std::ceil((ohi.y - anchor.y) / voxel));
    const int iz0 = static_cast<int>(std::floor((olo.z - anchor.z) / voxel));
    const int iz1 = static_cast<int>(std::ceil((ohi.z - anchor.z) / voxel));

    const int nx = ix1 - ix0;
    if (nx <= 0) return 0.0;
    std::vector<long> slab(nx, 0);
    rows(nx, [&](int sx) {
        const int ix = ix0 + sx;
        const double cx = anchor.x + (ix + 0.5) * voxel;
        long count = 0;
        for (int iy = iy0; iy < iy1; ++iy) {
            const double cy = anchor.y + (iy + 0.5) * voxel;
            for (int iz = iz0; iz < iz1; ++iz) {
                const double cz = anchor.z + (iz + 0.5) * voxel;
                const Vec3 c{cx, cy, cz};
                if (point_inside_mesh(c, hand) && point_inside_mesh(c, object)) ++count;
            }
        }
        slab[sx] = count;
    });
    long total = 0;
    for (long c : slab) total += c;
    return static_cast<double>(total) * voxel * voxel * voxel * 1e6;  // m^3 -> cm^3
}

}  // namespace

double max_penetration(const Mesh& hand, const Mesh& object) {
    return penetration_impl(hand, object, [](int n, auto&& f) { par_rows(n, f); });
}

double max_penetration_serial(const Mesh& hand, const Mesh& object) {
    return penetration_impl(hand, object, [](int n, auto&& f) {
        for (int i = 0; i < n; ++i) f(i);
    });
}

double intersection_volume(const Mesh& hand, const Mesh& object, double voxel) {
    return volume_impl(hand, object, voxel, [](int n, auto&& f) { par_rows(n, f); });
}

double intersection_volume_serial(const Mesh& hand, const Mesh& object, double voxel) {
    return volume_impl(hand, object, voxel, [](int n, auto&& f) {
        for (int i = 0; i < n; ++i) f(i);
    });
}

// ---- tape losses ----

namespace {

ad::NodeId mean_row_sq(ad::Tape& t, ad::NodeId diff, int rows) {
    return t.scale(t.sum_all(t.mul(diff, diff)), 1.0 / rows);
}

}  // namespace

ad::NodeId loss_l2_vertices(ad::Tape& t, ad::NodeId pred, ad::NodeId gt) {
    require_same_shape(t.val(pred), t.val(gt), "loss_l2_vertices");
    return mean_row_sq(t, t.sub(pred, gt), t.val(pred).rows);
}

ad::NodeId loss_keypoints(ad::Tape& t, ad::NodeId pred, ad::NodeId gt, const std::vector<int>& keypoints) {
    if (keypoints.empty()) throw std::invalid_argument("loss_keypoints: empty keypoint list");
    const ad::NodeId pk = t.gather_rows(pred, keypoints);
    const ad::NodeId gk = t.gather_rows(gt, keypoints);
    return mean_row_sq(t, t.sub(pk, gk), static_cast<int>(keypoints.size()));
}

ad::NodeId loss_chamfer(ad::Tape& t, ad::NodeId a, ad::NodeId b) {
    const Array& av = t.val(a);
    const Array& bv = t.val(b);
    if (av.rows < 1 || bv.rows < 1) throw std::invalid_argument("loss_chamfer: empty point set");
    auto argmins = [](const Array& from, const Array& to) {
        std::vector<int> idx(from.rows, 0);
        for (int i = 0; i < from.rows; ++i) {
            double best = std::numeric_limits<double>::max();
            for (int j = 0; j < to.rows; ++j) {
                double d = 0.0;
                for (int c = 0; c < from.cols; ++c) {
                    const double e = from.at(i, c) - to.at(j, c);
                    d += e * e;
                }
                if (d < best) {
                    best = d;
                    idx[i] = j;
                }
            }
        }
        return idx;
    };
    const ad::NodeId near_b = t.gather_rows(b, argmins(av, bv));
    const ad::NodeId near_a = t.gather_rows(a, argmins(bv, av));
    const ad::NodeId term_a = mean_row_sq(t, t.sub(a, near_b), av.rows);
    const ad::NodeId term_b = mean_row_sq(t, t.sub(b, near_a), bv.rows);
    return t.add(term_a, term_b);
}

std::pair<ad::NodeId, ad::NodeId> loss_pose(ad::Tape& t, ad::NodeId t_pred, ad::NodeId s_pred,
                                            const Vec3& t_gt, double s_gt) {
    Array tg(1, 3);
    tg.at(0, 0) = t_gt.x;
    tg.at(0, 1) = t_gt.y;
    tg.at(0, 2) = t_gt.z;
    const ad::NodeId dt = t.sub(t_pred, t.constant(tg));
    const ad::NodeId lt = t.sum_all(t.mul(dt, dt));
    const ad::NodeId ds = t.add_const(s_pred, -s_gt);
    const ad::NodeId ls = t.sum_all(t.mul(ds, ds));
    return {lt, ls};
}

}  // namespace hypermesh
