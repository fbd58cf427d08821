#include "doctest.h"

#include <cmath>
#include <vector>

#include "footsim/sim.hpp"
#include "test_support.hpp"

using namespace footsim;

namespace {

World one_player_world(const BallState& ball) {
    World w;
    w.ball = ball;
    w.players.push_back(rest_pose());
    return w;
}

double first_rebound_apex(double h, const SimConfig& cfg) {
    BallState b;
    b.pos = {0, 0, b.radius + h};
    bool bounced = false;
    double apex = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const auto ev = step_ball(b, cfg, i);
        if (ev) bounced = true;
        if (bounced) {
            apex = std::max(apex, b.pos.z - b.radius);
            if (b.vel.z < 0.0) break;
        }
    }
    return apex;
}

}  // namespace

TEST_CASE("sim config validation") {
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.dt_control() == doctest::Approx(1.0 / 30.0));
    CHECK(cfg.ball_character_restitution() == doctest::Approx(0.4));
    CHECK(cfg.ball_character_friction() == doctest::Approx(0.6));
    cfg.ball_restitution = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.dt_sim = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("ball at rest stays at rest") {
    World w = one_player_world(BallState{{5, 0, 0.11}});
    const SimConfig cfg;
    const std::vector<GaitParams> cmds(1);
    const BallState before = *w.ball;
    step(w, cfg, cmds);
    CHECK(norm(w.ball->pos - before.pos) < 1e-12);
    CHECK(norm(w.ball->vel) < 1e-12);
    CHECK(w.tick == 1);
    CHECK(w.events.empty());
}

TEST_CASE("drop test rebound apex") {
    const SimConfig cfg = testing::drag_free();
    const double apex = first_rebound_apex(1.0, cfg);
    CHECK(std::abs(apex - 0.64) < 0.03 * 0.64);
    // Sampling at the apex tick can only under-estimate by g*dt^2/8.
    CHECK(apex <= 0.64 + 1e-9);
}

TEST_CASE("lob flight lands at the closed-form range") {
    const SimConfig cfg = testing::drag_free();
    BallState b;
    const double v0 = 14.0;
    const double phi = deg_to_rad(45.0);
    b.vel = {v0 * std::cos(phi), 0.0, v0 * std::sin(phi)};
    const auto land = testing::simulate_landing(b, cfg);
    REQUIRE(land.has_value());
    CHECK(std::abs(land->x - 20.0) < 0.05);
    CHECK(std::abs(land->y) < 1e-9);
}

TEST_CASE("ground contact never leaves the ball below the tolerance") {
    const SimConfig cfg;
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        BallState b;
        b.pos = {0, 0, b.radius + rng.uniform(0.0, 3.0)};
        b.vel = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-20, 10)};
        b.ang_vel = rng.unit_sphere() * rng.uniform(0, 80);
        for (int i = 0; i < 300; ++i) {
            step_ball(b, cfg, i);
            REQUIRE(b.pos.z >= b.radius - cfg.penetration_tol);
        }
    }
}

TEST_CASE("energy conservation without damping and contacts") {
    const SimConfig cfg = testing::drag_free();
    BallState b;
    b.pos = {0, 0, 10.0};
    b.vel = {3.0, -1.0, 49.5};  // stays airborne for more than 10 s
    auto energy = [&](const BallState& s) { return 0.5 * norm_sq(s.vel) + cfg.gravity * s.pos.z; };
    const double e0 = energy(b);
    for (int i = 0; i < 600; ++i) {
        REQUIRE_FALSE(step_ball(b, cfg, i).has_value());
        CHECK(std::abs(energy(b) - e0) <= 0.005 * e0);
    }
    CHECK(b.pos.z > b.radius);
}

TEST_CASE("rolling ball decelerates and stops") {
    const SimConfig cfg;
    BallState b;
    b.vel = {4.0, 0.0, 0.0};
    b.ang_vel = {0.0, 4.0 / b.radius, 0.0};  // already rolling
    double last = 4.0;
    for (int i = 0; i < 600; ++i) {
        step_ball(b, cfg, i);
        const double s = norm(b.vel.xy());
        CHECK(s <= last + 1e-12);
        last = s;
        CHECK(b.pos.z == doctest::Approx(b.radius));
    }
    CHECK(last < 1e-9);
}

TEST_CASE("kinematic striker contact") {
    BallState ball;
    ball.pos = {0.19, 0, 0.11};
    SUBCASE("foot strikes a resting ball") {
        const auto r = resolve_ball_body(ball, {0, 0, 0.11}, {5, 0, 0}, 0.08, 0.5, 0.0, {1, 0});
        CHECK(r.impulse);
        CHECK(r.ball.vel.x == doctest::Approx(7.5).epsilon(1e-12));
    }
    SUBCASE("ball rebounds off a resting body") {
        ball.vel = {-4, 0, 0};
        const auto r = resolve_ball_body(ball, {0, 0, 0.11}, {}, 0.08, 0.5, 0.0, {1, 0});
        CHECK(r.ball.vel.x == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("co-moving body imparts nothing") {
        ball.vel = {3, 1, 0};
        const auto r = resolve_ball_body(ball, {0, 0, 0.11}, {3, 1, 0}, 0.08, 0.4, 0.6, {1, 0});
        CHECK_FALSE(r.impulse);
        CHECK(r.ball.vel == ball.vel);
    }
    SUBCASE("coincident centers resolve along the fallback axis") {
        ball.pos = {0, 0, 0.5};
        ball.vel = {0, 0, -1};
        const auto r = resolve_ball_body(ball, {0, 0, 0.5}, {}, 0.08, 0.4, 0.6, {0, 1});
        CHECK(r.degenerate);
        CHECK(r.ball.pos.y == doctest::Approx(0.19));
    }
    SUBCASE("restitution property on random contacts") {
        Rng rng(17);
        for (int i = 0; i < 2000; ++i) {
            BallState b;
            const Vec3 body{0, 0, 1};
            const Vec3 n = rng.unit_sphere();
            b.pos = body + n * 0.18;
            b.vel = rng.unit_sphere() * rng.uniform(0, 20);
            const Vec3 vb = rng.unit_sphere() * rng.uniform(0, 10);
            const double e = rng.uniform(0, 1);
            const double vn_pre = dot(b.vel - vb, n);
            const auto r = resolve_ball_body(b, body, vb, 0.08, e, rng.uniform(0, 1), {1, 0});
            if (vn_pre >= 0.0) continue;
            const double vn_post = dot(r.ball.vel - vb, n);
            REQUIRE(std::abs(vn_post - (-e * vn_pre)) < 1e-9);
        }
    }
}

TEST_CASE("characters follow decoded commands") {
    World w;
    w.players.push_back(rest_pose());
    const SimConfig cfg;
    GaitParams g;
    g.target_speed = 3.0;
    g.step_frequency = 2.1;
    std::vector<GaitParams> cmds{g};
    for (int i = 0; i < 60; ++i) step_control(w, cfg, cmds);
    const CharacterState& c = w.players[0];
    CHECK(c.root_vel.x == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(c.root_pos.z == doctest::Approx(0.9));
    CHECK(c.root_pos.x > 5.0);
    for (const auto& f : c.feet) CHECK(f.pos.z >= 0.0);
    CHECK(w.tick == 120);
    CHECK_NOTHROW(validate(c));

    SUBCASE("turning keeps facing unit") {
        g.facing_rate = 2.0;
        cmds = {g};
        for (int i = 0; i < 100; ++i) step_control(w, cfg, cmds);
        CHECK(std::abs(norm(w.players[0].facing) - 1.0) < 1e-9);
    }
}

TEST_CASE("step requires one command per player") {
    World w;
    w.players.push_back(rest_pose());
    const std::vector<GaitParams> none;
    CHECK_THROWS_AS(step(w, SimConfig{}, none), Error);
}

TEST_CASE("non-finite state raises an integration error naming the body") {
    World w = one_player_world(BallState{});
    w.ball->vel.x = std::nan("");
    const std::vector<GaitParams> cmds(1);
    try {
        step(w, SimConfig{}, cmds);
        FAIL("expected an integration error");
    } catch (const IntegrationError& e) {
        CHECK(std::string(e.what()).find("ball") != std::string::npos);
    }
    World w2 = one_player_world(BallState{});
    std::vector<GaitParams> bad(1);
    bad[0].heading = std::nan("");
    CHECK_THROWS_AS(step(w2, SimConfig{}, bad), IntegrationError);
}

TEST_CASE("strike swing hits a ball at the strike station") {
    const SimConfig cfg;
    for (Side side : {Side::left, Side::right}) {
        BallState ball;
        const Vec3 station = strike_station(side);
        ball.pos = station;
        World w = one_player_world(ball);
        GaitParams g;
        g.kick.active = true;
        g.kick.foot = side;
        g.kick.speed = 12.0 / 1.4;
        g.kick.direction = {1, 0, 0};
        std::vector<GaitParams> cmds{g};
        std::optional<CollisionEvent> hit;
        for (int i = 0; i < 6 && !hit; ++i) {
            step_control(w, cfg, cmds);
            cmds[0].kick.active = false;
            for (const auto& e : w.events) {
                if (e.player == 0 && is_foot(e.part) && !hit) hit = e;
            }
        }
        REQUIRE(hit.has_value());
        CHECK(hit->part == (side == Side::left ? ContactPart::foot_l : ContactPart::foot_r));
        CHECK(hit->post_vel.x == doctest::Approx(12.0).epsilon(0.02));
        CHECK(std::abs(hit->post_vel.y) < 0.05);
    }
}

TEST_CASE("handball zone contacts are tagged") {
    BallState ball;
    const CharacterState c = rest_pose();
    ball.pos = c.handball_zones[0] + Vec3{0, 0.3, 0};
    ball.vel = {0, -8, 0};
    World w = one_player_world(ball);
    const std::vector<GaitParams> cmds(1);
    bool handball = false;
    for (int i = 0; i < 5 && !handball; ++i) {
        step_control(w, SimConfig{}, cmds);
        for (const auto& e : w.events) handball = handball || e.kind == CollisionKind::handball;
    }
    CHECK(handball);
}

TEST_CASE("contact part names round trip") {
    for (int i = 0; i <= static_cast<int>(ContactPart::ground); ++i) {
        const auto p = static_cast<ContactPart>(i);
        CHECK(contact_part_from_string(to_string(p)) == p);
    }
    CHECK(as_body_part(ContactPart::foot_l) == BodyPart::foot_l);
    CHECK_FALSE(as_body_part(ContactPart::arm_l).has_value());
}
