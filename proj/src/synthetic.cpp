#include "hypermesh/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypermesh {

std::vector<int> hand_keypoint_table() {
    // 12 icosahedron poles plus 9 spread subdivision vertices of the 162-vertex template
    return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 20, 45, 70, 95, 110, 125, 140, 150, 161};
}

FeatureMaps make_feature_maps(uint64_t dataset_seed, double scale) {
    FeatureMaps maps;
    auto fill = [&](Array& a, int rows, int cols, uint64_t idx) {
        Rng rng(dataset_seed, StreamPurpose::FeatureMaps, idx);
        a = Array(rows, cols);
        for (double& e : a.v) e = rng.uniform(-scale, scale);
    };
    fill(maps.shallow, 3, SHALLOW_WIDTH, 0);
    fill(maps.deep_hand, 3, DEEP_WIDTH, 1);
    fill(maps.deep_obj, 3, DEEP_WIDTH, 2);
    fill(maps.global, 8, GLOBAL_WIDTH, 3);
    return maps;
}

namespace {

Vec3 random_unit(Rng& rng) {
    while (true) {
        const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        const double n = v.norm();
        if (n > 1e-9) return v * (1.0 / n);
    }
}

double min_vertex_distance(const Mesh& m, const Vec3& p) {
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < m.vertex_count(); ++i) best = std::min(best, (m.vertex(i) - p).norm());
    return best;
}

std::vector<double> face_area_cumsum(const Mesh& m) {
    std::vector<double> cum(m.faces.size());
    double acc = 0.0;
    for (size_t f = 0; f < m.faces.size(); ++f) {
        const auto& face = m.faces[f];
        const Vec3 a = m.vertex(face[0]), b = m.vertex(face[1]), c = m.vertex(face[2]);
        acc += 0.5 * (b - a).cross(c - a).norm();
        cum[f] = acc;
    }
    return cum;
}

Vec3 sample_on_face(const Mesh& m, int f, Rng& rng) {
    const auto& face = m.faces[f];
    const Vec3 a = m.vertex(face[0]), b = m.vertex(face[1]), c = m.vertex(face[2]);
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    return a + (b - a) * u + (c - a) * v;
}

int pick_face(const std::vector<double>& cum, double r) {
    const auto it = std::lower_bound(cum.begin(), cum.end(), r);
    return static_cast<int>(std::min<size_t>(it - cum.begin(), cum.size() - 1));
}

void add_gaussian(Array& a, Rng& rng, double sigma) {
    for (double& e : a.v) e += sigma * rng.normal();
}

Vec3 mean_rows3(const Array& a) {
    Vec3 s;
    for (int i = 0; i < a.rows; ++i) s = s + Vec3{a.at(i, 0), a.at(i, 1), a.at(i, 2)};
    return s * (1.0 / a.rows);
}

}  // namespace

Array sample_surface(const Mesh& m, int count, Rng& rng) {
    const std::vector<double> cum = face_area_cumsum(m);
    const double total = cum.back();
    Array out(count, 3);
    for (int i = 0; i < count; ++i) {
        const Vec3 p = sample_on_face(m, pick_face(cum, rng.uniform() * total), rng);
        out.at(i, 0) = p.x;
        out.at(i, 1) = p.y;
        out.at(i, 2) = p.z;
    }
    return out;
}

FeatureSets pseudo_image_features(const Mesh& gt_hand, const Mesh& gt_object, uint64_t seed,
                                  const FeatureMaps& maps, double noise_sigma) {
    FeatureSets out;

    // shallow: area-weighted samples of the joint scene surface
    Rng samp(seed, StreamPurpose::SurfaceSamples, 0);
    const std::vector<double> cum_h = face_area_cumsum(gt_hand);
    const std::vector<double> cum_o = face_area_cumsum(gt_object);
    const double area_h = cum_h.back(), area_o = cum_o.back();
    Array shallow_pos(SHALLOW_COUNT, 3);
    for (int i = 0; i < SHALLOW_COUNT; ++i) {
        const double r = samp.uniform() * (area_h + area_o);
        const Vec3 p = r < area_h ? sample_on_face(gt_hand, pick_face(cum_h, r), samp)
                                  : sample_on_face(gt_object, pick_face(cum_o, r - area_h), samp);
        shallow_pos.at(i, 0) = p.x;
        shallow_pos.at(i, 1) = p.y;
        shallow_pos.at(i, 2) = p.z;
    }

    Rng samp_h(seed, StreamPurpose::SurfaceSamples, 1);
    Rng samp_o(seed, StreamPurpose::SurfaceSamples, 2);
    const Array deep_hand_pos = sample_surface(gt_hand, DEEP_COUNT, samp_h);
    const Array deep_obj_pos = sample_surface(gt_object, DEEP_COUNT, samp_o);

    out.shallow = matmul(shallow_pos, maps.shallow);
    out.deep_hand = matmul(deep_hand_pos, maps.deep_hand);
    out.deep_obj = matmul(deep_obj_pos, maps.deep_obj);

    // global: pooled position statistics of the deep sample sets
    const Vec3 mh = mean_rows3(deep_hand_pos), mo = mean_rows3(deep_obj_pos);
    double rh = 0.0, ro = 0.0;
    for (int i = 0; i < DEEP_COUNT; ++i) {
        rh += (Vec3{deep_hand_pos.at(i, 0), deep_hand_pos.at(i, 1), deep_hand_pos.at(i, 2)} - mh).dot(
            Vec3{deep_hand_pos.at(i, 0), deep_hand_pos.at(i, 1), deep_hand_pos.at(i, 2)} - mh);
        ro += (Vec3{deep_obj_pos.at(i, 0), deep_obj_pos.at(i, 1), deep_obj_pos.at(i, 2)} - mo).dot(
            Vec3{deep_obj_pos.at(i, 0), deep_obj_pos.at(i, 1), deep_obj_pos.at(i, 2)} - mo);
    }
    Array stats(1, 8);
    stats.at(0, 0) = mh.x;
    stats.at(0, 1) = mh.y;
    stats.at(0, 2) = mh.z;
    stats.at(0, 3) = mo.x;
    stats.at(0, 4) = mo.y;
    stats.at(0, 5) = mo.z;
    stats.at(0, 6) = std::sqrt(rh / DEEP_COUNT);
    stats.at(0, 7) = std::sqrt(ro / DEEP_COUNT);
    out.global = matmul(stats, maps.global);

    Rng noise0(seed, StreamPurpose::FeatureNoise, 0);
    Rng noise1(seed, StreamPurpose::FeatureNoise, 1);
    Rng noise2(seed, StreamPurpose::FeatureNoise, 2);
    Rng noise3(seed, StreamPurpose::FeatureNoise, 3);
    add_gaussian(out.shallow, noise0, noise_sigma);
    add_gaussian(out.deep_hand, noise1, noise_sigma);
    add_gaussian(out.deep_obj, noise2, noise_sigma);
    add_gaussian(out.global, noise3, noise_sigma);
    return out;
}

void perturb_initial(SceneSample& scene, const SceneConfig& cfg) {
    scene.init_hand = scene.gt_hand;
    scene.init_object = scene.gt_object;
    Rng hn(scene.seed, StreamPurpose::HandNoise);
    Rng on(scene.seed, StreamPurpose::ObjectNoise);
    add_gaussian(scene.init_hand.vertices, hn, cfg.noise_sigma);
    add_gaussian(scene.init_object.vertices, on, cfg.noise_sigma);
    Rng off(scene.seed, StreamPurpose::ObjectOffset);
    scene.init_object.translate(random_unit(off) * cfg.object_offset);
}

SceneSample generate_scene(uint64_t seed, const SceneConfig& cfg) {
    SceneSample s;
    s.seed = seed;

    s.gt_hand = make_icosphere(cfg.subdiv, 1.0);
    scale_axes(s.gt_hand, cfg.hand_ax, cfg.hand_ay, cfg.hand_az);
    s.gt_hand.keypoints = hand_keypoint_table();
    s.gt_hand.validate();

    Rng place(seed, StreamPurpose::ScenePlacement);
    const Vec3 u = random_unit(place);
    const double gap = place.uniform(cfg.gap_min, cfg.gap_max);
    const double target = cfg.object_radius + gap;  // vertex clearance from the object center

    // bisection on the center distance: f(s) = min_v ||s*u - v|| - target
    double max_norm = 0.0;
    for (int i = 0; i < s.gt_hand.vertex_count(); ++i) max_norm = std::max(max_norm, s.gt_hand.vertex(i).norm());
    double lo = 0.0, hi = max_norm + target + 0.05;
    if (min_vertex_distance(s.gt_hand, Vec3{}) >= target) {
        throw std::invalid_argument("generate_scene: hand too small for the configured contact gap");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (min_vertex_distance(s.gt_hand, u * mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    s.gt_object = make_icosphere(cfg.subdiv, cfg.object_radius);
    s.gt_object.translate(u * hi);
    s.gt_object.validate();

    s.targets.t = s.gt_object.centroid();
    double max_r = 0.0;
    for (int i = 0; i < s.gt_object.vertex_count(); ++i) {
        max_r = std::max(max_r, (s.gt_object.vertex(i) - s.targets.t).norm());
    }
    s.targets.s = max_r;

    s.features = pseudo_image_features(s.gt_hand, s.gt_object, seed,
                                       make_feature_maps(cfg.dataset_seed, cfg.feature_scale),
                                       cfg.feature_noise);
    perturb_initial(s, cfg);
    return s;
}

}  // namespace hypermesh
