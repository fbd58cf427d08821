#include "footsim/rng.hpp"

#include <sstream>

namespace footsim {

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw Error("Rng::index on empty range");
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return static_cast<std::size_t>(v % n);
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Vec2 Rng::unit_circle() { return direction_from_angle(uniform(0.0, 2.0 * kPi)); }

Vec3 Rng::unit_sphere() {
    const double z = uniform(-1.0, 1.0);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec2 d = unit_circle();
    return {r * d.x, r * d.y, z};
}

Vec2 Rng::in_disc(double radius) {
    const double r = radius * std::sqrt(uniform());
    return unit_circle() * r;
}

std::string Rng::state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::set_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    if (!is) throw Error("invalid generator state");
}

}  // namespace footsim
