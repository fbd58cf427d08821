#include "doctest.h"

#include <cmath>
#include <sstream>

#include "footsim/skills.hpp"
#include "test_support.hpp"

using namespace footsim;

namespace {

// Steps the world under a fixed policy until the ball first touches the
// character's body, then `after` further ticks. Returns the ticks taken.
int run_until_contact(World& w, const SkillPolicy& p, const SkillGoal& goal, int max_ticks, int after) {
    const SimConfig sim;
    std::vector<GaitParams> cmd(1);
    int contact = -1;
    for (int t = 1; t <= max_ticks; ++t) {
        cmd[0] = decode(act(p, w.players[0], &*w.ball, goal));
        step_control(w, sim, cmd);
        for (const auto& e : w.events) {
            if (contact < 0 && e.player == 0 && e.kind == CollisionKind::body) contact = t;
        }
        if (contact >= 0 && t - contact >= after) return t;
    }
    return -1;
}

}  // namespace

TEST_CASE("strike speed inverts the restitution law") {
    static_assert(std::abs(analytic::strike_speed_for(12.0, 0.0, 0.4) - 12.0 / 1.4) < 1e-12);
    // Striking a ball that already moves along the line needs less foot speed.
    CHECK(analytic::strike_speed_for(12.0, -2.0, 0.4) == doctest::Approx((12.0 - 0.8) / 1.4));
    const double e = SimConfig{}.ball_character_restitution();
    CHECK(e == doctest::Approx(0.4));
    // Foot speed u on a ball at rest with speed v_b: v' = v_b + (1 + e)(u - v_b).
    for (double target : {5.0, 12.0, 20.0}) {
        for (double vb : {-3.0, 0.0, 2.0}) {
            const double u = analytic::strike_speed_for(target, vb, e);
            CHECK(-e * vb + (1.0 + e) * u == doctest::Approx(target).epsilon(1e-12));
        }
    }
}

TEST_CASE("analytic move equals the reference encoding when tracking") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const MoveGoal g{rng.in_disc(7.0), rng.unit_circle()};
        CharacterState c = rest_pose(rng.in_disc(5.0), rng.unit_circle());
        c.root_vel = lift(g.vel);
        const Latent z = analytic::move(c, g);
        const CharacterFrame f = frame_of(c);
        const Latent ref = encode(MoveRefGoal{world_to_character(f, g.vel, VecKind::vector),
                                              world_to_character(f, g.face, VecKind::vector)});
        REQUIRE(z.dim() == ref.dim());
        for (std::size_t k = 0; k < z.dim(); ++k) CHECK(z[k] == doctest::Approx(ref[k]).epsilon(1e-6));
    }
}

TEST_CASE("kick from a resting ball hits the requested speed") {
    for (double speed : {8.0, 14.0, 20.0}) {
        World w;
        w.players.push_back(rest_pose({0.0, 0.0}, {1.0, 0.0}));
        refresh_body_points(w.players[0]);
        BallState b;
        b.pos = lift(Vec2{1.0, 0.0}, b.radius);
        w.ball = b;
        const Vec3 target{speed, 0.0, 0.0};
        REQUIRE(run_until_contact(w, SkillPolicy::analytic(Skill::kick), KickGoal{target}, 150, 0) > 0);
        const double got = norm(w.ball->vel);
        CAPTURE(speed);
        CHECK(std::abs(got - speed) <= 0.02 * speed);
        CHECK(angle_between(w.ball->vel, target) < deg_to_rad(5.0));
    }
}

TEST_CASE("descent prediction finds the lob landing point") {
    const SimConfig sim = testing::drag_free();
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        const CharacterState c = rest_pose(rng.in_disc(3.0), rng.unit_circle());
        const PassInit pass = init_lob_pass(c, rng, sim);
        const BallPrediction p = predict_descent(pass.ball, pass.ball.pos.z, sim, 10.0);
        REQUIRE(p.found);
        CHECK(norm(p.point - pass.spec.landing) < 0.05);
        CHECK(p.time == doctest::Approx(lob_flight(pass.spec.v0, pass.spec.phi, sim.gravity).time).epsilon(0.02));
    }
}

TEST_CASE("trap plan puts the target part under the intercept") {
    CharacterState c = rest_pose({0.0, 0.0}, {1.0, 0.0});
    BallState b;
    b.pos = {5.0, 0.0, b.radius};
    b.vel = {-6.0, 0.0, 0.0};
    const auto plan = analytic::trap_plan(c, b, TrapGoal{BodyPart::foot_r});
    CHECK(plan.face.x == doctest::Approx(1.0));
    CHECK(plan.intercept.y == doctest::Approx(0.0));
    // The right foot sits on the right (negative y) of the root.
    CHECK(plan.root_target.y == doctest::Approx(geometry::kFootOffset.y));
    CHECK(plan.time_to_intercept == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("parametric forward pass is pure and normalized") {
    SkillPolicy p = SkillPolicy::parametric(Skill::dribble, false);
    CHECK(p.layers == std::vector<std::size_t>{25, 32, 8});
    CHECK(p.params.size() == SkillPolicy::param_count(p.layers));
    CHECK(p.params.size() == 25 * 32 + 32 + 32 * 8 + 8);
    const CharacterState c = rest_pose({1.0, 2.0}, {0.0, 1.0});
    BallState b;
    b.pos = {1.3, 2.5, b.radius};

    // All-zero parameters produce the neutral latent.
    const Latent z0 = act(p, c, &b, DribbleGoal{{2.0, 0.0}});
    CHECK(z0[channel::kFaceCos] == 1.0);

    Rng rng(4);
    for (double& v : p.params) v = rng.normal() * 0.3;
    const Latent a = act(p, c, &b, DribbleGoal{{2.0, 0.0}});
    const Latent a2 = act(p, c, &b, DribbleGoal{{2.0, 0.0}});
    CHECK(a == a2);
    double sq = 0.0;
    for (double v : a.values()) sq += v * v;
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));

    SkillPolicy r = SkillPolicy::parametric(Skill::dribble, true);
    const Latent prior = act(SkillPolicy::analytic(Skill::dribble), c, &b, DribbleGoal{{2.0, 0.0}});
    CHECK(act(r, c, &b, DribbleGoal{{2.0, 0.0}}) == prior);

    CHECK_THROWS_AS(act(p, c, nullptr, DribbleGoal{{2.0, 0.0}}), Error);
    CHECK_THROWS_AS(act(p, c, &b, MoveGoal{}), Error);
}

TEST_CASE("policy files round trip") {
    SkillPolicy p = SkillPolicy::parametric(Skill::kick, true, 16);
    p.seed = 77;
    Rng rng(1);
    for (double& v : p.params) v = rng.normal();
    std::stringstream ss;
    write_policy(ss, p);
    const SkillPolicy q = read_policy(ss);
    CHECK(q.skill == p.skill);
    CHECK(q.kind == p.kind);
    CHECK(q.residual);
    CHECK(q.seed == 77);
    CHECK(q.layers == p.layers);
    CHECK(q.params == p.params);

    std::stringstream bad("footsim-policy 9 kick parametric 0 0 0 0\n");
    CHECK_THROWS_WITH_AS(read_policy(bad), doctest::Contains("version"), Error);
    std::stringstream junk("hello\n");
    CHECK_THROWS_AS(read_policy(junk), Error);
}

TEST_CASE("training order is enforced") {
    TrainConfig cfg;
    cfg.population = 4;
    cfg.elites = 1;
    cfg.iterations = 1;
    cfg.episodes_per_candidate = 1;
    CHECK_THROWS_WITH_AS(train(Skill::trap, cfg, {}, nullptr), doctest::Contains("move"), Error);
    CHECK_THROWS_WITH_AS(train(Skill::dribble, cfg, {}, nullptr), doctest::Contains("STI buffer"), Error);
    CHECK_THROWS_WITH_AS(train(Skill::kick, cfg, {}, nullptr), doctest::Contains("dribble"), Error);
    cfg.elites = 4;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("CEM bookkeeping") {
    const DegclBuffer degcl = build_degcl_buffer();
    TrainConfig cfg;
    cfg.population = 6;
    cfg.elites = 2;
    cfg.iterations = 5;
    cfg.episodes_per_candidate = 1;
    cfg.hidden = 8;
    cfg.seed = 9;
    cfg.rollout.episode.max_episode_time = 1.0;
    const TrainResult r = train(Skill::move, cfg, {}, &degcl);
    REQUIRE(r.log.size() == 5);
    CHECK_FALSE(r.policy.residual);
    CHECK(r.baseline_mean == r.log[0].mean);
    for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i].best_so_far >= r.log[i - 1].best_so_far);
    for (const auto& row : r.log) {
        CHECK(row.max >= row.elite_mean);
        CHECK(row.elite_mean >= row.mean);
    }
    CHECK(r.best_fitness == r.log.back().best_so_far);

    cfg.threads = 3;
    const TrainResult t = train(Skill::move, cfg, {}, &degcl);
    CHECK(t.policy.params == r.policy.params);
    CHECK(t.best_fitness == r.best_fitness);

    std::ostringstream csv;
    write_train_log_csv(csv, r.log);
    CHECK(csv.str().rfind("iteration,mean,max,elite_mean,best_so_far\n", 0) == 0);
}

TEST_CASE("DEGCL episodes make up the configured fraction") {
    const DegclBuffer degcl = build_degcl_buffer();
    RolloutConfig cfg;
    cfg.episode.max_episode_time = 1.0 / 30.0;
    Rng rng(12);
    const SkillPolicy p = SkillPolicy::analytic(Skill::move);
    int deg = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) deg += run_episode(p, {}, &degcl, rng, cfg).mode == GoalMode::degcl;
    CHECK(std::abs(deg / double(n) - 0.8) <= 0.02);
}

TEST_CASE("STI buffers follow the recording rules") {
    const DegclBuffer degcl = build_degcl_buffer();
    Rng rng(2);
    const StiBuffer move = build_sti_buffer(SkillPolicy::analytic(Skill::move), 300, {}, &degcl, rng);
    CHECK(move.size() == 300);
    CHECK(move.full());
    for (const auto& s : move.snapshots()) CHECK_FALSE(s.ball.has_value());

    const StiBuffer trap = build_sti_buffer(SkillPolicy::analytic(Skill::trap), 40, {&move}, nullptr, rng);
    CHECK(trap.size() == 40);
    for (const auto& s : trap.snapshots()) {
        REQUIRE(s.ball.has_value());
        CHECK(s.source == Skill::trap);
        // Recorded at a collision: the ball is at the body.
        CHECK(horizontal_distance(*s.ball, s.character) < 1.0);
    }
    // Consecutive move snapshots come from consecutive ticks.
    CHECK(move[1].tick_tag == move[0].tick_tag + 1);

    CHECK_THROWS_AS(build_sti_buffer(SkillPolicy::analytic(Skill::kick), 10, {}, nullptr, rng), Error);
    CHECK_THROWS_AS(build_sti_buffer(SkillPolicy::analytic(Skill::trap), 10, {}, nullptr, rng), Error);
}

TEST_CASE("episode returns are reproducible") {
    const DegclBuffer degcl = build_degcl_buffer();
    RolloutConfig cfg;
    cfg.episode.max_episode_time = 2.0;
    const SkillPolicy p = SkillPolicy::analytic(Skill::move);
    CHECK(evaluate_policy(p, 5, 42, {}, &degcl, cfg) == evaluate_policy(p, 5, 42, {}, &degcl, cfg));
}
