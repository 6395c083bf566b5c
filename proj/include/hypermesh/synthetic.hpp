#pragma once

#include <cstdint>

#include "hypermesh/mesh.hpp"
#include "hypermesh/rng.hpp"

namespace hypermesh {

/// Desk-scale scene recipe. Lengths in meters.
struct SceneConfig {
    int subdiv = 2;  // icosphere level: 10*4^s + 2 vertices
    double hand_ax = 0.08, hand_ay = 0.04, hand_az = 0.03;
    double object_radius = 0.04;
    double gap_min = -0.005, gap_max = 0.005;  // surface gap at placement
    double noise_sigma = 0.005;                // vertex jitter of the initial meshes
    double object_offset = 0.01;               // rigid offset of the initial object
    double feature_noise = 0.01;
    double feature_scale = 2.0;  // entry range of the fixed feature maps
    uint64_t dataset_seed = 0;   // seeds the fixed feature maps (shared by all scenes)
};

inline constexpr int SHALLOW_COUNT = 128, SHALLOW_WIDTH = 32;
inline constexpr int DEEP_COUNT = 64, DEEP_WIDTH = 64;
inline constexpr int GLOBAL_WIDTH = 64;
inline constexpr int KEYPOINT_COUNT = 21;

/// Train/eval seed split, fixed by convention.
inline constexpr uint64_t TRAIN_SEED_BEGIN = 0, TRAIN_SEED_END = 256;
inline constexpr uint64_t EVAL_SEED_BEGIN = 256, EVAL_SEED_END = 288;

/// Fixed affine encoders shared across scenes (the stand-in image backbone).
struct FeatureMaps {
    Array shallow;   // 3 x 32
    Array deep_hand; // 3 x 64
    Array deep_obj;  // 3 x 64
    Array global;    // 8 x 64
};

FeatureMaps make_feature_maps(uint64_t dataset_seed, double scale);

struct FeatureSets {
    Array shallow;    // 128 x 32
    Array deep_hand;  // 64 x 64
    Array deep_obj;   // 64 x 64
    Array global;     // 1 x 64
};

struct PoseTargets {
    Vec3 t;     // object centroid in hand-relative coordinates
    double s;   // max centroid radius of the object
};

struct SceneSample {
    Mesh gt_hand, gt_object;
    Mesh init_hand, init_object;
    FeatureSets features;
    PoseTargets targets;
    uint64_t seed = 0;
};

/// 21 designated joint vertices of the hand template.
std::vector<int> hand_keypoint_table();

/// Deterministic per seed: hand ellipsoid at the origin, object sphere placed
/// at a seeded direction with vertex-surface gap in [gap_min, gap_max].
SceneSample generate_scene(uint64_t seed, const SceneConfig& cfg);

/// Area-weighted surface samples of one mesh.
Array sample_surface(const Mesh& m, int count, Rng& rng);

/// Geometry-correlated pseudo image features (positions through the fixed maps
/// plus gaussian noise).
FeatureSets pseudo_image_features(const Mesh& gt_hand, const Mesh& gt_object, uint64_t seed,
                                  const FeatureMaps& maps, double noise_sigma);

/// Initial meshes: gt plus iid gaussian vertex noise, and a seeded rigid offset
/// of the object.
void perturb_initial(SceneSample& scene, const SceneConfig& cfg);

}  // namespace hypermesh
