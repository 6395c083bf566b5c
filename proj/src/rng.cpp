#include "hypermesh/rng.hpp"

#include <cmath>

namespace hypermesh {

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t mix64(uint64_t x) {
    uint64_t s = x;
    return splitmix64(s);
}

Rng::Rng(uint64_t seed, StreamPurpose purpose, uint64_t index) {
    state_ = mix64(mix64(seed) ^ (static_cast<uint64_t>(purpose) * 0xd1342543de82ef95ULL)) ^
             mix64(index + 0x2545f4914f6cdd1dULL);
}

uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    // 53 high bits -> [0,1) with full double resolution
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, w, s;
    do {
        u = 2.0 * uniform() - 1.0;
        w = 2.0 * uniform() - 1.0;
        s = u * u + w * w;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = w * m;
    has_spare_ = true;
    return u * m;
}

uint64_t Rng::below(uint64_t n) {
    // rejection sampling keeps the distribution exact
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

}  // namespace hypermesh
