#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "footsim/core.hpp"

namespace footsim {

/// Seeded generator with an implementation-independent mapping to real
/// values, so recorded runs replay identically across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n).
    std::size_t index(std::size_t n);
    bool bernoulli(double p) { return uniform() < p; }
    double normal();
    Vec2 unit_circle();
    Vec3 unit_sphere();
    /// Uniform point in the disc of the given radius.
    Vec2 in_disc(double radius);

    /// Independent child stream, e.g. one per episode.
    Rng fork() { return Rng(engine_()); }

    std::string state() const;
    void set_state(const std::string& s);

    bool operator==(const Rng& o) const { return engine_ == o.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace footsim
