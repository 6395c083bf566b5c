#pragma once

#include <cstdint>

namespace hypermesh {

/// Purpose tags for deriving independent random streams from one seed.
/// Stream state = splitmix(splitmix(seed) ^ salt(purpose)) ^ splitmix(index);
/// the same (seed, purpose, index) triple always yields the same stream on
/// every platform (integer ops only; gaussians use the polar method, so no
/// trig functions are involved).
enum class StreamPurpose : uint64_t {
    ScenePlacement = 1,
    HandNoise = 2,
    ObjectNoise = 3,
    ObjectOffset = 4,
    SurfaceSamples = 5,
    FeatureNoise = 6,
    FeatureMaps = 7,
    WeightInit = 8,
    GradCheck = 9,
    Fuzz = 10,
};

/// splitmix64 step; also usable as a standalone 64-bit mixer.
uint64_t splitmix64(uint64_t& state);
uint64_t mix64(uint64_t x);

/// Small deterministic generator over a derived stream.
class Rng {
  public:
    Rng(uint64_t seed, StreamPurpose purpose, uint64_t index = 0);

    uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    /// Standard normal via the Marsaglia polar method (caches the spare value).
    double normal();
    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n);

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hypermesh
