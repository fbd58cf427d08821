#include "footsim/skills.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "footsim/binio.hpp"

namespace footsim {

namespace {

constexpr const char* kPolicyMagic = "footsim-policy";
constexpr int kPolicyVersion = 1;

constexpr std::size_t kCharacterDims = 17;
constexpr std::size_t kBallDims = 6;

std::size_t goal_dims(Skill s) {
    switch (s) {
        case Skill::move: return 4;
        case Skill::dribble: return 2;
        case Skill::trap: return 6;
        case Skill::kick: return 3;
    }
    return 0;
}

bool needs_ball(Skill s) { return s != Skill::move; }

// Speed toward `target` that can still stop in time under the root
// acceleration cap.
Vec2 arrival(Vec2 from, Vec2 target, double max_speed, double gain = 4.0, double accel = 4.5) {
    const Vec2 d = target - from;
    const double dist = norm(d);
    if (dist < 1e-9) return {};
    const double speed = std::min({max_speed, gain * dist, std::sqrt(2.0 * accel * dist)});
    return d * (speed / dist);
}

Vec2 clamp_speed(Vec2 v, double max_speed) {
    const double n = norm(v);
    return n > max_speed ? v * (max_speed / n) : v;
}

Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

bool strike_ready(const CharacterState& c) { return !c.strike.active && c.strike.cooldown_ticks == 0; }

// Body part offset from the root, horizontal, character frame.
Vec2 part_offset(BodyPart part) {
    switch (part) {
        case BodyPart::lower_leg_l:
        case BodyPart::foot_l: return {0.0, geometry::kFootOffset.y};
        case BodyPart::lower_leg_r:
        case BodyPart::foot_r: return {0.0, -geometry::kFootOffset.y};
        default: return {};
    }
}

std::vector<double> mlp_forward(const std::vector<std::size_t>& layers, const std::vector<double>& params,
                                std::vector<double> x) {
    std::size_t k = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const std::size_t in = layers[l];
        const std::size_t out = layers[l + 1];
        std::vector<double> y(out, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            double s = 0.0;
            for (std::size_t i = 0; i < in; ++i) s += params[k + o * in + i] * x[i];
            y[o] = s;
        }
        k += out * in;
        for (std::size_t o = 0; o < out; ++o) y[o] += params[k + o];
        k += out;
        if (l + 2 < layers.size()) {
            for (double& v : y) v = std::tanh(v);
        }
        x = std::move(y);
    }
    return x;
}

Latent analytic_latent(Skill s, const CharacterState& c, const BallState* ball, const SkillGoal& goal,
                       const ActContext& ctx) {
    if (needs_ball(s) && ball == nullptr) throw Error(std::string(to_string(s)) + " policy requires a ball");
    switch (s) {
        case Skill::move: return analytic::move(c, std::get<MoveGoal>(goal), ctx);
        case Skill::dribble: return analytic::dribble(c, *ball, std::get<DribbleGoal>(goal), ctx);
        case Skill::trap: return analytic::trap(c, *ball, std::get<TrapGoal>(goal), ctx);
        case Skill::kick: return analytic::kick(c, *ball, std::get<KickGoal>(goal), ctx);
    }
    throw Error("unknown skill");
}

}  // namespace

std::string_view to_string(PolicyKind k) { return k == PolicyKind::analytic ? "analytic" : "parametric"; }

FeatureSpec FeatureSpec::for_skill(Skill s) { return {true, needs_ball(s), true}; }

std::size_t FeatureSpec::dim(Skill s) const {
    return (character ? kCharacterDims : 0) + (ball ? kBallDims : 0) + (goal ? goal_dims(s) : 0);
}

SkillPolicy SkillPolicy::analytic(Skill s) {
    SkillPolicy p;
    p.skill = s;
    p.kind = PolicyKind::analytic;
    p.features = FeatureSpec::for_skill(s);
    return p;
}

SkillPolicy SkillPolicy::parametric(Skill s, bool residual, std::size_t hidden, std::size_t latent_dim) {
    if (latent_dim < channel::kUsed) throw Error("latent dimension below decoder channel count");
    SkillPolicy p;
    p.skill = s;
    p.kind = PolicyKind::parametric;
    p.features = FeatureSpec::for_skill(s);
    p.layers = {p.features.dim(s), hidden, latent_dim};
    p.params.assign(param_count(p.layers), 0.0);
    p.residual = residual;
    return p;
}

std::size_t SkillPolicy::param_count(const std::vector<std::size_t>& layers) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) n += layers[l] * layers[l + 1] + layers[l + 1];
    return n;
}

std::vector<double> policy_features(const SkillPolicy& p, const CharacterState& c, const BallState* ball,
                                    const SkillGoal& goal) {
    const CharacterFrame f = frame_of(c);
    std::vector<double> x;
    x.reserve(p.features.dim(p.skill));
    auto push = [&](Vec3 v, double scale) {
        x.push_back(v.x / scale);
        x.push_back(v.y / scale);
        x.push_back(v.z / scale);
    };
    if (p.features.character) {
        x.push_back(c.root_pos.z);
        push(world_to_character(f, c.root_vel, VecKind::vector), 7.0);
        x.push_back(c.facing_rate / gait_limits::kMaxFacingRate);
        for (const FootState& foot : c.feet) push(world_to_character(f, foot.pos, VecKind::point), 1.0);
        for (const FootState& foot : c.feet) push(world_to_character(f, foot.vel, VecKind::vector), 7.0);
    }
    if (p.features.ball) {
        if (ball == nullptr) throw Error(std::string(to_string(p.skill)) + " policy requires a ball");
        Vec3 rel = world_to_character(f, ball->pos, VecKind::point);
        rel = {std::clamp(rel.x, -3.0, 3.0), std::clamp(rel.y, -3.0, 3.0), std::clamp(rel.z, 0.0, 3.0)};
        push(rel, 1.0);
        push(world_to_character(f, ball->vel, VecKind::vector), 10.0);
    }
    if (p.features.goal) {
        if (skill_of(goal) != p.skill) throw Error("goal does not match the policy skill");
        switch (p.skill) {
            case Skill::move: {
                const auto& g = std::get<MoveGoal>(goal);
                const Vec2 v = world_to_character(f, g.vel, VecKind::vector) / 7.0;
                const Vec2 d = world_to_character(f, g.face, VecKind::vector);
                x.insert(x.end(), {v.x, v.y, d.x, d.y});
                break;
            }
            case Skill::dribble: {
                const Vec2 v = world_to_character(f, std::get<DribbleGoal>(goal).vel, VecKind::vector) / 7.0;
                x.insert(x.end(), {v.x, v.y});
                break;
            }
            case Skill::trap: {
                const std::size_t k = index_of(std::get<TrapGoal>(goal).part);
                for (std::size_t i = 0; i < 6; ++i) x.push_back(i == k ? 1.0 : 0.0);
                break;
            }
            case Skill::kick:
                push(world_to_character(f, std::get<KickGoal>(goal).vel, VecKind::vector), 35.0);
                break;
        }
    }
    return x;
}

Latent act(const SkillPolicy& p, const CharacterState& c, const BallState* ball, const SkillGoal& goal,
           const ActContext& ctx) {
    if (skill_of(goal) != p.skill) throw Error("goal does not match the policy skill");
    if (p.kind == PolicyKind::analytic) return analytic_latent(p.skill, c, ball, goal, ctx);

    if (p.layers.size() < 2 || p.params.size() != SkillPolicy::param_count(p.layers))
        throw Error("malformed parametric policy");
    std::vector<double> x = policy_features(p, c, ball, goal);
    if (x.size() != p.layers.front()) throw Error("policy input width does not match its features");
    std::vector<double> y = mlp_forward(p.layers, p.params, std::move(x));
    if (p.residual) {
        const Latent prior = analytic_latent(p.skill, c, ball, goal, ctx);
        if (prior.dim() != y.size()) throw Error("policy output width does not match the latent");
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += prior[i];
    }
    double sq = 0.0;
    for (double v : y) sq += v * v;
    if (!(sq > 1e-24) || !std::isfinite(sq)) {
        // A zero output has no direction; fall back to the neutral stand latent.
        std::fill(y.begin(), y.end(), 0.0);
        y[channel::kFaceCos] = 1.0;
    }
    return Latent::from_raw(std::move(y));
}

GaitParams velocity_command(const CharacterState& c, Vec2 world_vel, Vec2 face) {
    const CharacterFrame f = frame_of(c);
    const Vec2 v = world_to_character(f, world_vel, VecKind::vector);
    GaitParams g;
    g.target_speed = std::min(norm(v), gait_limits::kMaxSpeed);
    g.heading = g.target_speed > 1e-9 ? angle_of(v) : 0.0;
    const Vec2 fc = world_to_character(f, normalized_or(face, c.facing), VecKind::vector);
    g.facing_rate = std::clamp(MotionConfig{}.facing_gain * angle_of(fc), -gait_limits::kMaxFacingRate,
                               gait_limits::kMaxFacingRate);
    g.step_frequency = std::clamp(1.2 + 0.3 * g.target_speed, gait_limits::kMinStepFrequency,
                                  gait_limits::kMaxStepFrequency);
    g.step_length_scale = std::clamp(g.target_speed / 4.0, 0.0, 1.0);
    return g;
}

double contact_height(BodyPart part) {
    switch (part) {
        case BodyPart::head: return geometry::kHeadOffset.z;
        case BodyPart::torso: return geometry::kTorsoOffset.z;
        case BodyPart::lower_leg_l:
        case BodyPart::lower_leg_r: return geometry::kLowerLegOffset.z;
        case BodyPart::foot_l:
        case BodyPart::foot_r: return 0.18;
    }
    return 0.18;
}

BallPrediction predict_descent(const BallState& start, double height, const SimConfig& sim, double horizon) {
    BallState b = start;
    const int n = static_cast<int>(horizon / sim.dt_sim);
    for (int i = 0; i < n; ++i) {
        const BallState prev = b;
        const auto ev = step_ball(b, sim, 0);
        const bool crossed = prev.vel.z < 0.0 && prev.pos.z >= height && b.pos.z < height;
        if (crossed || ev) {
            // Solve the previous tick's parabola for the crossing time.
            const double h = std::max(height, b.radius);
            const double g = sim.gravity;
            const double disc = prev.vel.z * prev.vel.z + 2.0 * g * (prev.pos.z - h);
            double tau = g > 0.0 ? (prev.vel.z + std::sqrt(std::max(0.0, disc))) / g : 0.0;
            tau = std::clamp(tau, 0.0, sim.dt_sim);
            if (prev.pos.z < h) tau = 0.0;
            return {prev.pos.xy() + prev.vel.xy() * tau, i * sim.dt_sim + tau, true};
        }
    }
    return {b.pos.xy(), horizon, false};
}

namespace analytic {

Latent move(const CharacterState& c, const MoveGoal& g, const ActContext& ctx) {
    const CharacterFrame f = frame_of(c);
    const Vec2 target = world_to_character(f, g.vel, VecKind::vector);
    const Vec2 actual = world_to_character(f, c.root_vel.xy(), VecKind::vector);
    const Vec2 cmd = target + (target - actual) * kMoveCorrectionGain;
    return encode(MoveRefGoal{cmd, world_to_character(f, normalized_or(g.face, c.facing), VecKind::vector)},
                  ctx.motion);
}

Latent dribble(const CharacterState& c, const BallState& b, const DribbleGoal& g, const ActContext& ctx) {
    const double s = norm(g.vel);
    const Vec2 pb = b.pos.xy();
    const Vec2 vb = b.vel.xy();
    const Vec2 root = c.root_pos.xy();
    const Vec2 d = s > 0.05 ? g.vel / s : normalized_or(pb - root, c.facing, 1e-6);

    // Line the ball up with the right strike station.
    const double lateral = strike_station(Side::right).y;
    Vec2 target = pb + vb * 0.15 - d * kDribbleBehind - perp(d) * lateral;
    const Vec2 rel = root - pb;
    if (dot(rel, d) > -0.15 && norm(rel) < 1.5) {
        // The root is level with or ahead of the ball: go around it.
        const double side = cross(d, rel) >= 0.0 ? 1.0 : -1.0;
        target = pb - d * 0.5 + perp(d) * (0.5 * side);
    }
    // Follow the ball sideways but never run ahead of the target speed.
    const double along = dot(vb, d);
    const Vec2 follow = d * std::clamp(along, 0.0, s) + (vb - d * along);
    const Vec2 vel = clamp_speed(follow + arrival(root, target, std::max(2.0, s + 1.0), 3.0, 6.0), gait_limits::kMaxSpeed);
    GaitParams gp = velocity_command(c, vel, d);

    // Tap so that the ball leaves with the target velocity plus a margin;
    // the strike line cancels the ball's sideways drift.
    const Vec2 want = d * (s + 0.6);
    const Vec2 change = want - vb;
    const Vec2 n = normalized_or(change, d, 1e-6);
    const bool lagging = along < s || norm(vb - d * along) > 0.1 * s;
    if (s > 0.3 && strike_ready(c) && b.pos.z < 0.3 && lagging && dot(n, d) > 0.5) {
        const CharacterFrame f = frame_of(c);
        const Vec3 q = world_to_character(f, b.pos, VecKind::point);
        for (Side side : {Side::right, Side::left}) {
            const Vec3 st = strike_station(side);
            if (q.x > 0.1 && q.x < 0.55 && std::abs(q.y - st.y) < 0.09) {
                gp.kick.active = true;
                gp.kick.foot = side;
                gp.kick.direction = lift(world_to_character(f, n, VecKind::vector));
                gp.heading = angle_of(gp.kick.direction.xy());
                gp.kick.speed = std::min(strike_speed_for(dot(want, n), dot(vb, n), ctx.sim.ball_character_restitution()),
                                         gait_limits::kMaxStrikeSpeed);
                break;
            }
        }
    }
    return encode_gait(gp, ctx.motion);
}

TrapPlan trap_plan(const CharacterState& c, const BallState& b, const TrapGoal& g, const ActContext& ctx) {
    TrapPlan plan;
    const Vec2 pb = b.pos.xy();
    const Vec2 vb = b.vel.xy();
    const Vec2 root = c.root_pos.xy();
    const double speed = norm(vb);
    const bool grounded = b.pos.z < b.radius + 0.2 && std::abs(b.vel.z) < 1.0;
    if (speed < 2.0 && grounded) {
        plan.intercept = pb;
    } else if (grounded) {
        const Vec2 dir = vb / speed;
        const double ahead = std::max(0.0, dot(root - pb, dir));
        plan.intercept = pb + dir * ahead;
        plan.time_to_intercept = ahead / speed;
    } else {
        const BallPrediction p = predict_descent(b, contact_height(g.part), ctx.sim);
        plan.intercept = p.point;
        plan.time_to_intercept = p.time;
    }
    plan.face = normalized_or(-vb, normalized_or(pb - root, c.facing, 1e-6), 1e-6);
    plan.root_target = plan.intercept - rotate(part_offset(g.part), plan.face);
    return plan;
}

Latent trap(const CharacterState& c, const BallState& b, const TrapGoal& g, const ActContext& ctx) {
    const TrapPlan plan = trap_plan(c, b, g, ctx);
    const Vec2 root = c.root_pos.xy();
    Vec2 vel = arrival(root, plan.root_target, gait_limits::kMaxSpeed);
    const Vec2 rel = b.vel.xy() - c.root_vel.xy();
    if (horizontal_distance(b, c) < 0.6 && norm(rel) < 4.0 && b.pos.z < 1.8) {
        // Ball at the body: ride along with it to absorb its momentum.
        vel = clamp_speed(b.vel.xy(), gait_limits::kMaxSpeed);
    }
    return encode_gait(velocity_command(c, vel, plan.face), ctx.motion);
}

Latent kick(const CharacterState& c, const BallState& b, const KickGoal& g, const ActContext& ctx) {
    const Vec3 dir3 = normalized_or(g.vel, lift(c.facing));
    const Vec2 dh = normalized_or(g.vel.xy(), c.facing, 1e-6);
    const Side foot = Side::right;
    const Vec3 st = strike_station(foot);
    const Vec2 pb = b.pos.xy();
    const Vec2 vb = b.vel.xy();
    const Vec2 root = c.root_pos.xy();

    const CharacterFrame f = frame_of(c);
    const Vec3 q = world_to_character(f, b.pos, VecKind::point);
    const bool facing = angle_between(c.facing, dh) < 0.1 && std::abs(q.y - st.y) < 0.06;

    // A fast ball or a poor line-up keeps the feet clear of the ball: the
    // gait stride would touch it before the strike does.
    const double hold = norm(vb) > 1.5 ? 0.8 : (facing ? 0.0 : 0.3);
    Vec2 target = pb + vb * 0.1 - rotate(st.xy(), dh) - dh * hold;
    const Vec2 rel = root - pb;
    if (dot(rel, dh) > -0.2 && norm(rel) < 1.5) {
        const double side = cross(dh, rel) >= 0.0 ? 1.0 : -1.0;
        target = pb - dh * 0.7 + perp(dh) * (0.6 * side);
    }
    const Vec2 vel = clamp_speed(vb + arrival(root, target, gait_limits::kMaxSpeed, 3.0, 4.0), gait_limits::kMaxSpeed);
    GaitParams gp = velocity_command(c, vel, dh);

    const bool lined_up = norm(q.xy() - st.xy()) < 0.03 &&
                          angle_between(c.facing, dh) < 0.05 && b.pos.z < 0.25 && norm(vb - c.root_vel.xy()) < 1.0;
    if (strike_ready(c) && lined_up) {
        gp.kick.active = true;
        gp.kick.foot = foot;
        gp.kick.direction = world_to_character(f, dir3, VecKind::vector);
        gp.heading = angle_of(gp.kick.direction.xy());
        gp.kick.speed = std::min(strike_speed_for(norm(g.vel), dot(b.vel, dir3), ctx.sim.ball_character_restitution()),
                                 gait_limits::kMaxStrikeSpeed);
    }
    return encode_gait(gp, ctx.motion);
}

}  // namespace analytic

// ---------------------------------------------------------------------------
// Episodes

EpisodeStats run_episode(const SkillPolicy& p, const StiBuffers& buffers, const DegclBuffer* degcl, Rng& rng,
                         const RolloutConfig& cfg, const TickObserver& observer) {
    const Skill skill = p.skill;
    EpisodeInit init = init_episode(skill, buffers, rng, cfg.episode, cfg.sim);
    World& w = init.world;
    EpisodeStats stats;
    stats.source = init.source;
    if (skill == Skill::move && degcl != nullptr && degcl->size() > 0 && rng.bernoulli(cfg.degcl_fraction))
        stats.mode = GoalMode::degcl;

    const ActContext actx{cfg.sim, cfg.motion};
    const PassKind pass = init.pass ? init.pass->kind : PassKind::lob;
    auto draw_goal = [&] { return sample_goal(skill, rng, {&w.players[0], pass, stats.mode, degcl}); };
    GoalSample goal = draw_goal();
    double next_reassign = (skill == Skill::move || skill == Skill::dribble)
                               ? goal.reassign_after
                               : std::numeric_limits<double>::infinity();

    EpisodeClock clock{0, cfg.sim.dt_control()};
    const RewardWindows windows{cfg.reward.trap_post_ticks, cfg.reward.kick_window_ticks};
    std::vector<GaitParams> cmd(1);
    while (true) {
        const CharacterState& c = w.players[0];
        const BallState* ball = w.ball ? &*w.ball : nullptr;
        const Latent z = act(p, c, ball, goal.goal, actx);
        cmd[0] = decode(z, cfg.motion);
        step_control(w, cfg.sim, cmd);
        const int t = ++clock.control_ticks;
        update_contact_log(stats.contacts, w.events, t);

        const CharacterState& after = w.players[0];
        double r = 0.0;
        switch (skill) {
            case Skill::move: {
                const bool deg = goal.mode == GoalMode::degcl;
                r = move_reward(std::get<MoveGoal>(goal.goal), after, deg, deg ? &*goal.ref_latent : nullptr, z,
                                cfg.reward);
                break;
            }
            case Skill::dribble:
                r = dribble_reward(std::get<DribbleGoal>(goal.goal), *w.ball, after, cfg.reward).total;
                break;
            case Skill::trap: {
                const auto& first = stats.contacts.first_contact_tick;
                if (!first || t - *first < windows.trap_post_ticks)
                    r = trap_reward(std::get<TrapGoal>(goal.goal), *w.ball, after, first.has_value(), cfg.reward);
                break;
            }
            case Skill::kick: {
                const auto& first = stats.contacts.first_contact_tick;
                if (first && t - *first < windows.kick_window_ticks)
                    r = kick_reward(std::get<KickGoal>(goal.goal), *w.ball, cfg.reward);
                break;
            }
        }
        stats.episode_return += r;
        if (observer) observer(w, t);

        stats.termination = check_termination(skill, w, clock, stats.contacts, init.pass, cfg.episode, windows);
        if (stats.termination.done()) break;
        if (clock.elapsed() >= next_reassign - 1e-9) {
            goal = draw_goal();
            next_reassign += goal.reassign_after;
        }
    }
    stats.control_ticks = clock.control_ticks;
    return stats;
}

StiBuffer build_sti_buffer(const SkillPolicy& p, std::size_t count, const StiBuffers& buffers,
                           const DegclBuffer* degcl, Rng& rng, const RolloutConfig& cfg) {
    if (p.skill == Skill::kick) throw Error("kick has no successor skill and records no STI buffer");
    StiBuffer buf(p.skill, count);
    std::uint64_t tag = 0;
    const TickObserver record = [&](const World& w, int) {
        ++tag;
        if (buf.full()) return;
        const CharacterState& c = w.players[0];
        switch (p.skill) {
            case Skill::move: buf.add({c, std::nullopt, Skill::move, tag}); break;
            case Skill::dribble: buf.add({c, w.ball, Skill::dribble, tag}); break;
            case Skill::trap: {
                const bool collided = std::any_of(w.events.begin(), w.events.end(), [](const CollisionEvent& e) {
                    return e.player == 0 && e.kind == CollisionKind::body;
                });
                if (collided) buf.add({c, w.ball, Skill::trap, tag});
                break;
            }
            case Skill::kick: break;
        }
    };
    // Trap episodes without any contact record nothing; bound the attempts.
    const std::size_t max_episodes = 100 + 50 * count;
    for (std::size_t e = 0; e < max_episodes && !buf.full(); ++e) run_episode(p, buffers, degcl, rng, cfg, record);
    if (!buf.full()) throw Error("could not collect the requested number of snapshots");
    return buf;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
    if (population < 2) throw Error("population must be at least 2");
    if (elites < 1 || elites >= population) throw Error("elites must satisfy 0 < elites < population");
    if (iterations < 1) throw Error("iterations must be positive");
    if (episodes_per_candidate < 1) throw Error("episodes_per_candidate must be positive");
    if (!(init_stddev > 0.0)) throw Error("init_stddev must be positive");
    if (!(rollout.degcl_fraction >= 0.0 && rollout.degcl_fraction <= 1.0))
        throw Error("degcl_fraction must lie in [0, 1]");
    if (threads < 1) throw Error("threads must be positive");
    rollout.episode.validate();
    rollout.reward.validate();
    rollout.sim.validate();
}

void require_training_order(Skill s, const StiBuffers& buffers, const RolloutConfig& cfg) {
    auto need = [&](const StiBuffer* b, std::string_view name) {
        if (b == nullptr || b->empty())
            throw Error("training " + std::string(to_string(s)) + " requires the " + std::string(name) +
                        " STI buffer; train " + std::string(name) + " first");
    };
    if (!cfg.episode.use_sti) return;
    switch (s) {
        case Skill::move: break;
        case Skill::trap: need(buffers.move, "move"); break;
        case Skill::dribble:
            need(buffers.move, "move");
            need(buffers.trap, "trap");
            break;
        case Skill::kick: need(buffers.dribble, "dribble"); break;
    }
}

double evaluate_policy(const SkillPolicy& p, int episodes, std::uint64_t seed, const StiBuffers& buffers,
                       const DegclBuffer* degcl, const RolloutConfig& cfg) {
    Rng rng(seed);
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) total += run_episode(p, buffers, degcl, rng, cfg).episode_return;
    return total / episodes;
}

TrainResult train(Skill s, const TrainConfig& cfg, const StiBuffers& buffers, const DegclBuffer* degcl) {
    cfg.validate();
    require_training_order(s, buffers, cfg.rollout);
    const bool residual = cfg.residual.value_or(s != Skill::move);
    SkillPolicy base = SkillPolicy::parametric(s, residual, cfg.hidden, cfg.rollout.motion.latent_dim);
    base.seed = cfg.seed;
    const std::size_t n = base.params.size();

    Rng rng(cfg.seed);
    std::vector<double> mean(n, 0.0);
    std::vector<double> sigma(n, cfg.init_stddev);
    TrainResult result;
    result.best_fitness = -std::numeric_limits<double>::infinity();
    const auto pop = static_cast<std::size_t>(cfg.population);

    for (int it = 0; it < cfg.iterations; ++it) {
        std::vector<std::vector<double>> cand(pop, std::vector<double>(n));
        for (auto& theta : cand) {
            for (std::size_t i = 0; i < n; ++i) theta[i] = mean[i] + sigma[i] * rng.normal();
        }
        // Common random numbers: every candidate sees the same episodes.
        const std::uint64_t episode_seed = rng.next_u64();
        std::vector<double> fitness(pop, 0.0);
        auto evaluate = [&](std::size_t k) {
            SkillPolicy p = base;
            p.params = cand[k];
            fitness[k] = evaluate_policy(p, cfg.episodes_per_candidate, episode_seed, buffers, degcl, cfg.rollout);
        };
        if (cfg.threads <= 1) {
            for (std::size_t k = 0; k < pop; ++k) evaluate(k);
        } else {
            std::vector<std::thread> workers;
            for (unsigned t = 0; t < cfg.threads; ++t) {
                workers.emplace_back([&, t] {
                    for (std::size_t k = t; k < pop; k += cfg.threads) evaluate(k);
                });
            }
            for (auto& th : workers) th.join();
        }

        std::vector<std::size_t> order(pop);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
        const auto ne = static_cast<std::size_t>(cfg.elites);
        for (std::size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (std::size_t e = 0; e < ne; ++e) m += cand[order[e]][i];
            m /= static_cast<double>(ne);
            double v = 0.0;
            for (std::size_t e = 0; e < ne; ++e) v += (cand[order[e]][i] - m) * (cand[order[e]][i] - m);
            mean[i] = m;
            sigma[i] = std::max(std::sqrt(v / static_cast<double>(ne)), cfg.min_stddev);
        }

        TrainLogRow row;
        row.iteration = it;
        row.mean = std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(pop);
        row.max = fitness[order[0]];
        double em = 0.0;
        for (std::size_t e = 0; e < ne; ++e) em += fitness[order[e]];
        row.elite_mean = em / static_cast<double>(ne);
        if (row.max > result.best_fitness) {
            result.best_fitness = row.max;
            result.policy = base;
            result.policy.params = cand[order[0]];
        }
        row.best_so_far = result.best_fitness;
        if (it == 0) result.baseline_mean = row.mean;
        result.log.push_back(row);
    }
    return result;
}

void write_train_log_csv(std::ostream& os, const std::vector<TrainLogRow>& log) {
    os << "iteration,mean,max,elite_mean,best_so_far\n";
    os.precision(10);
    for (const auto& r : log)
        os << r.iteration << ',' << r.mean << ',' << r.max << ',' << r.elite_mean << ',' << r.best_so_far << '\n';
}

void write_policy(std::ostream& os, const SkillPolicy& p) {
    os << kPolicyMagic << ' ' << kPolicyVersion << ' ' << to_string(p.skill) << ' ' << to_string(p.kind) << ' '
       << (p.residual ? 1 : 0) << ' ' << p.seed << ' ' << p.layers.size();
    for (std::size_t l : p.layers) os << ' ' << l;
    os << ' ' << p.params.size() << '\n';
    for (double v : p.params) binio::write_f64(os, v);
}

SkillPolicy read_policy(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw Error("empty policy file");
    std::istringstream hs(header);
    std::string magic, skill, kind;
    int version = 0, residual = 0;
    std::size_t nlayers = 0;
    SkillPolicy p;
    if (!(hs >> magic >> version) || magic != kPolicyMagic) throw Error("not a policy file");
    if (version != kPolicyVersion) throw Error("unsupported policy file version " + std::to_string(version));
    if (!(hs >> skill >> kind >> residual >> p.seed >> nlayers)) throw Error("malformed policy header");
    const auto sk = skill_from_string(skill);
    if (!sk) throw Error("unknown skill '" + skill + "' in policy file");
    if (kind != "analytic" && kind != "parametric") throw Error("unknown policy kind '" + kind + "'");
    p.skill = *sk;
    p.kind = kind == "analytic" ? PolicyKind::analytic : PolicyKind::parametric;
    p.features = FeatureSpec::for_skill(p.skill);
    p.residual = residual != 0;
    p.layers.resize(nlayers);
    for (auto& l : p.layers) {
        if (!(hs >> l)) throw Error("malformed policy header");
    }
    std::size_t count = 0;
    if (!(hs >> count)) throw Error("malformed policy header");
    if (p.kind == PolicyKind::parametric && count != SkillPolicy::param_count(p.layers))
        throw Error("policy parameter count does not match its layers");
    p.params.resize(count);
    for (double& v : p.params) v = binio::read_f64(is);
    return p;
}

}  // namespace footsim
