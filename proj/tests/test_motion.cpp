#include "doctest.h"

#include <cmath>
#include <sstream>

#include "footsim/motion.hpp"
#include "footsim/rng.hpp"

using namespace footsim;

namespace {
const DegclPair& find_pair(const DegclBuffer& buf, const std::string& name) {
    for (const auto& p : buf.pairs) {
        if (p.name == name) return p;
    }
    throw Error("missing primitive " + name);
}

double angle_between(const Latent& a, const Latent& b) {
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}
}  // namespace

TEST_CASE("latent construction") {
    const Latent z = Latent::from_raw({3.0, 4.0});
    CHECK(z[0] == doctest::Approx(0.6));
    CHECK(z[1] == doctest::Approx(0.8));
    CHECK_THROWS_AS(Latent::from_raw({0.0, 0.0}), Error);
    CHECK_THROWS_AS(Latent::from_unit({1.0, 1.0}), Error);
    CHECK(Latent::from_unit({0.0, 1.0})[1] == 1.0);
}

TEST_CASE("degcl buffer layout") {
    const DegclBuffer buf = build_degcl_buffer();
    REQUIRE(buf.size() == 16);
    for (const auto& p : buf.pairs) {
        CHECK(p.ref_latent == encode(p.ref_goal));
        CHECK(p.ref_goal.face_dir == Vec2{1.0, 0.0});
        CHECK(std::abs(std::sqrt(dot(p.ref_latent, p.ref_latent)) - 1.0) < 1e-9);
    }
    for (const char* lateral : {"lateral_walk_left", "lateral_walk_right"}) {
        const auto& p = find_pair(buf, lateral);
        CHECK(std::abs(dot(p.ref_goal.move_vel, p.ref_goal.face_dir)) < 1e-9);
    }
    CHECK(find_pair(buf, "forward_walk").ref_goal.move_vel.x == 1.5);
    CHECK(find_pair(buf, "forward_jog").ref_goal.move_vel.x == 3.0);
    CHECK(find_pair(buf, "forward_run").ref_goal.move_vel.x == 5.0);
    CHECK(find_pair(buf, "backward_walk").ref_goal.move_vel.x == -1.2);
    CHECK(find_pair(buf, "backward_jog").ref_goal.move_vel.x == -2.5);

    double min_angle = 10.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        for (std::size_t j = i + 1; j < buf.size(); ++j)
            min_angle = std::min(min_angle, angle_between(buf[i].ref_latent, buf[j].ref_latent));
    }
    CHECK(min_angle > 1e-3);
}

TEST_CASE("encoder separates distinct goals") {
    const Latent a = encode({{1.5, 0.0}, {1.0, 0.0}});
    const Latent b = encode({{-1.5, 0.0}, {1.0, 0.0}});
    CHECK(dot(a, a) == doctest::Approx(1.0));
    CHECK(dot(a, b) < 0.9);
    CHECK(encode({{2.0, 1.0}, {0.0, 1.0}}) == encode({{2.0, 1.0}, {0.0, 1.0}}));
    CHECK_THROWS_AS(encode({{1.0, 0.0}, {0.0, 0.0}}), Error);
}

TEST_CASE("decoder on the reference latents") {
    const DegclBuffer buf = build_degcl_buffer();
    const GaitParams jog = decode(find_pair(buf, "forward_jog").ref_latent);
    CHECK(jog.heading == doctest::Approx(0.0));
    CHECK(jog.target_speed == doctest::Approx(3.0));
    CHECK(jog.facing_rate == doctest::Approx(0.0));
    CHECK_FALSE(jog.kick.active);

    for (const auto& p : buf.pairs) {
        const GaitParams g = decode(p.ref_latent);
        CHECK(std::abs(g.target_speed - norm(p.ref_goal.move_vel)) < 1e-6);
        CHECK(std::abs(wrap_angle(g.heading - angle_of(p.ref_goal.move_vel))) < 1e-6);

        std::vector<double> neg(p.ref_latent.values().begin(), p.ref_latent.values().end());
        for (double& v : neg) v = -v;
        const GaitParams h = decode(Latent::from_unit(neg));
        const bool same = h.target_speed == g.target_speed && h.heading == g.heading &&
                          h.facing_rate == g.facing_rate;
        CHECK_FALSE(same);
    }
}

TEST_CASE("decode inverts encode_gait") {
    Rng rng(21);
    for (int i = 0; i < 2000; ++i) {
        GaitParams g;
        g.target_speed = rng.uniform(0.05, 7.0);
        g.heading = rng.uniform(-3.1, 3.1);
        g.facing_rate = rng.uniform(-3.0, 3.0);
        if (rng.bernoulli(0.5)) {
            g.kick.active = true;
            g.kick.speed = rng.uniform(0.0, 18.0);
            g.kick.foot = rng.bernoulli(0.5) ? Side::left : Side::right;
            const double e = rng.uniform(0.0, kPi / 4.0);
            g.kick.direction = {std::cos(e) * std::cos(g.heading), std::cos(e) * std::sin(g.heading), std::sin(e)};
        }
        const GaitParams d = decode(encode_gait(g));
        REQUIRE(d.target_speed == doctest::Approx(g.target_speed).epsilon(1e-9));
        REQUIRE(std::abs(wrap_angle(d.heading - g.heading)) < 1e-9);
        REQUIRE(d.facing_rate == doctest::Approx(g.facing_rate).epsilon(1e-9));
        REQUIRE(d.kick.active == g.kick.active);
        if (g.kick.active) {
            CHECK(d.kick.foot == g.kick.foot);
            CHECK(d.kick.speed == doctest::Approx(g.kick.speed).epsilon(1e-9));
            CHECK(norm(d.kick.direction - g.kick.direction) < 1e-9);
        }
    }
}

TEST_CASE("decoder ranges and continuity") {
    Rng rng(8);
    double lipschitz = 0.0;
    for (int i = 0; i < 5000; ++i) {
        std::vector<double> raw(8);
        for (double& v : raw) v = rng.normal();
        const Latent z = Latent::from_raw(raw);
        const GaitParams g = decode(z);
        REQUIRE(g.target_speed >= 0.0);
        REQUIRE(g.target_speed <= 7.0);
        REQUIRE(std::abs(g.facing_rate) <= 3.0);
        REQUIRE(g.step_frequency >= 0.5);
        REQUIRE(g.step_frequency <= 4.0);
        REQUIRE(g.step_length_scale >= 0.0);
        REQUIRE(g.step_length_scale <= 1.0);
        if (g.kick.active) {
            REQUIRE(g.kick.speed <= 18.0);
            REQUIRE(std::abs(norm(g.kick.direction) - 1.0) < 1e-9);
        }
        // Small perturbation: parameter change stays bounded by the angle moved.
        for (double& v : raw) v += 1e-7 * rng.normal();
        const Latent z2 = Latent::from_raw(raw);
        const double ang = angle_between(z, z2);
        const GaitParams g2 = decode(z2);
        if (ang > 0.0 && g.kick.active == g2.kick.active && std::abs(g.heading - g2.heading) < 1.0 &&
            norm(Vec2{raw[0], raw[1]}) > 1e-3) {
            const double dp = std::abs(g.target_speed - g2.target_speed) + std::abs(g.facing_rate - g2.facing_rate);
            lipschitz = std::max(lipschitz, dp / ang);
        }
    }
    MESSAGE("measured decoder Lipschitz constant (speed + turn rate): " << lipschitz);
    CHECK(std::isfinite(lipschitz));
}

TEST_CASE("non-unit latents are counted") {
    const std::size_t before = decode_normalization_warnings();
    const std::vector<double> raw{2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    decode(raw);
    CHECK(decode_normalization_warnings() == before + 1);
}

TEST_CASE("degcl file round trip") {
    const DegclBuffer buf = build_degcl_buffer();
    std::stringstream ss;
    write_degcl(ss, buf);
    const DegclBuffer back = read_degcl(ss);
    REQUIRE(back.size() == buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        CHECK(back[i].name == buf[i].name);
        CHECK(back[i].ref_latent == buf[i].ref_latent);
        CHECK(back[i].ref_goal.move_vel == buf[i].ref_goal.move_vel);
    }
    std::stringstream bad("garbage 1 2 3");
    CHECK_THROWS_AS(read_degcl(bad), Error);
}
