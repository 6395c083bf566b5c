#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hypermesh/hyperops.hpp"
#include "hypermesh/synthetic.hpp"

namespace hypermesh {

/// Flat key=value configuration. Every key has a default; unknown keys (in a
/// file or on the command line) are hard errors.
struct Config {
    double curvature = -1.0;  // c < 0
    int k = 8;
    std::array<int, 4> dims = {3, 64, 64, 32};  // mesh-in, dhgc widths, ihgc out
    double lr = 1e-4;
    int lr_decay_epoch = 0;  // 0 disables the x0.1 step decay
    int epochs = 200;
    uint64_t seed = 0;
    ad::Space space = ad::Space::Hyperbolic;
    int train_scenes = 8;   // train seeds used per epoch, from the start of the pool
    int eval_scenes = 32;   // eval seeds 256..256+eval_scenes
    double noise_sigma = 0.005;
    double object_offset = 0.01;
    double feature_noise = 0.01;
    double feature_scale = 2.0;
    double gap_min = -0.005;
    double gap_max = 0.005;
    std::string out = "out";

    SceneConfig scene_config() const;
    Curvature curv() const { return Curvature(curvature); }
    ad::Geometry geometry() const { return {space, curv()}; }
    ModelDims model_dims() const;

    /// key=value lines, one per key, fixed order; parse(echo()) round-trips.
    std::string echo() const;

    void set(const std::string& key, const std::string& value);  // unknown key -> error
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);
};

}  // namespace hypermesh
