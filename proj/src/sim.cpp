#include "footsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace footsim {

void SimConfig::validate() const {
    if (!(dt_sim > 0.0)) throw Error("dt_sim must be positive");
    if (control_divisor < 1) throw Error("control_divisor must be at least 1");
    const double coeffs[] = {gravity,          ball_friction,       ball_rolling_friction,
                             ball_restitution, ball_linear_damping, ball_angular_damping,
                             ground_friction,  ground_restitution,  character_friction,
                             character_restitution, penetration_tol, bounce_threshold,
                             max_root_accel};
    for (double c : coeffs) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw Error("sim coefficients must be finite and >= 0");
    }
    if (ball_restitution > 1.0 || ground_restitution > 1.0 || character_restitution > 1.0)
        throw Error("restitution coefficients must not exceed 1");
}

std::string_view to_string(ContactPart p) {
    switch (p) {
        case ContactPart::head: return "head";
        case ContactPart::torso: return "torso";
        case ContactPart::lower_leg_l: return "lower_leg_L";
        case ContactPart::lower_leg_r: return "lower_leg_R";
        case ContactPart::foot_l: return "foot_L";
        case ContactPart::foot_r: return "foot_R";
        case ContactPart::pelvis: return "pelvis";
        case ContactPart::arm_l: return "arm_L";
        case ContactPart::arm_r: return "arm_R";
        case ContactPart::ground: return "ground";
    }
    return "?";
}

std::optional<ContactPart> contact_part_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(ContactPart::ground); ++i) {
        const auto p = static_cast<ContactPart>(i);
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

std::optional<BodyPart> as_body_part(ContactPart p) {
    if (static_cast<int>(p) < 6) return static_cast<BodyPart>(p);
    return std::nullopt;
}

std::string_view to_string(CollisionKind k) {
    switch (k) {
        case CollisionKind::ground: return "ground";
        case CollisionKind::body: return "body";
        case CollisionKind::handball: return "handball";
    }
    return "?";
}

Vec3 strike_station(Side foot) {
    return {0.35, foot == Side::left ? 0.10 : -0.10, BallState{}.radius};
}

ContactResult resolve_ball_body(const BallState& ball, Vec3 body_pos, Vec3 body_vel,
                                double body_radius, double restitution, double friction,
                                Vec2 fallback_axis) {
    ContactResult r;
    r.ball = ball;
    r.pre_vel = ball.vel;
    const Vec3 d = ball.pos - body_pos;
    const double dist = norm(d);
    Vec3 n;
    if (dist <= 1e-12) {
        n = lift(normalized_or(fallback_axis, {1.0, 0.0}));
        r.degenerate = true;
    } else {
        n = d / dist;
    }
    const double reach = ball.radius + body_radius;
    if (dist < reach) r.ball.pos = body_pos + n * reach;

    const Vec3 v_rel = ball.vel - body_vel;
    const double vn = dot(v_rel, n);
    if (vn < 0.0) {
        const Vec3 vt = v_rel - n * vn;
        const double vt_mag = norm(vt);
        // Coulomb limit: the tangential change is bounded by friction times the normal change.
        const double max_dt = friction * (1.0 + restitution) * (-vn);
        const double blend = vt_mag > 0.0 ? std::min(1.0, max_dt / vt_mag) : 0.0;
        const Vec3 v_rel_post = n * (-restitution * vn) + vt * (1.0 - blend);
        r.ball.vel = body_vel + v_rel_post;
        r.impulse = true;
    }
    r.post_vel = r.ball.vel;
    return r;
}

namespace {

constexpr double kStrikeReach = 0.6;     // m travelled before the swing ends
constexpr double kStrikeDuration = 0.3;  // s
constexpr double kStrikeCooldown = 0.15; // s
constexpr double kStrideAmplitude = 0.45;
constexpr double kStepLift = 0.12;

// Ground response at the contact instant. `b.vel.z` holds the (negative)
// normal velocity on entry. Returns true for an impact (bounce).
bool ground_response(BallState& b, const SimConfig& cfg, double dt) {
    const double vz = b.vel.z;
    const bool impact = vz < -cfg.bounce_threshold;
    const double normal_change = impact ? (1.0 + cfg.ball_restitution) * (-vz) : std::max(0.0, -vz);
    b.vel.z = impact ? -cfg.ball_restitution * vz : 0.0;

    // Coulomb friction on the contact-point slip of a thin-shelled ball
    // (I = 2/3 m r^2, so a tangential impulse changes slip by 2.5 J/m).
    const double r = b.radius;
    const Vec2 slip{b.vel.x - r * b.ang_vel.y, b.vel.y + r * b.ang_vel.x};
    const double slip_mag = norm(slip);
    if (slip_mag > 0.0) {
        const double dv_mag = std::min(slip_mag / 2.5, cfg.ball_ground_friction() * normal_change);
        const Vec2 dv = slip * (-dv_mag / slip_mag);
        b.vel.x += dv.x;
        b.vel.y += dv.y;
        b.ang_vel.x += 1.5 * dv.y / r;
        b.ang_vel.y -= 1.5 * dv.x / r;
    }

    if (!impact) {
        // Rolling resistance: constant deceleration of the rolling motion and spin.
        const double speed = norm(b.vel.xy());
        if (speed > 0.0) {
            const double reduced = std::max(0.0, speed - cfg.ball_rolling_friction * cfg.gravity * dt);
            const double k = reduced / speed;
            b.vel.x *= k;
            b.vel.y *= k;
            b.ang_vel.x *= k;
            b.ang_vel.y *= k;
        }
    }
    return impact;
}

void check_finite(const BallState& b) {
    if (!is_finite(b.pos) || !is_finite(b.vel) || !is_finite(b.ang_vel))
        throw IntegrationError("non-finite state in body 'ball'");
}

void check_finite(const CharacterState& c, std::size_t index) {
    bool ok = is_finite(c.root_pos) && is_finite(c.root_vel) && is_finite(c.facing) &&
              std::isfinite(c.facing_rate) && std::isfinite(c.gait_phase);
    for (const auto& f : c.feet) ok = ok && is_finite(f.pos) && is_finite(f.vel);
    if (!ok) throw IntegrationError("non-finite state in body 'player " + std::to_string(index) + "'");
}

void check_command(const GaitParams& g, std::size_t index) {
    const bool ok = std::isfinite(g.target_speed) && std::isfinite(g.heading) &&
                    std::isfinite(g.facing_rate) && std::isfinite(g.step_frequency) &&
                    std::isfinite(g.step_length_scale) && is_finite(g.kick.direction) &&
                    std::isfinite(g.kick.speed);
    if (!ok) throw IntegrationError("non-finite command for body 'player " + std::to_string(index) + "'");
}

void advance_character(CharacterState& c, const GaitParams& g, const SimConfig& cfg) {
    const double dt = cfg.dt_sim;
    const std::array<Vec3, 2> old_feet{c.feet[0].pos, c.feet[1].pos};

    // Facing.
    c.facing_rate = std::clamp(g.facing_rate, -gait_limits::kMaxFacingRate, gait_limits::kMaxFacingRate);
    c.facing = normalized_or(rotate(c.facing, direction_from_angle(c.facing_rate * dt)), {1.0, 0.0});

    // Root velocity tracks the commanded velocity under an acceleration cap.
    const double speed_cmd = std::clamp(g.target_speed, 0.0, gait_limits::kMaxSpeed);
    const Vec2 desired = rotate(direction_from_angle(g.heading), c.facing) * speed_cmd;
    Vec2 v = c.root_vel.xy();
    Vec2 dv = desired - v;
    const double max_dv = cfg.max_root_accel * dt;
    const double dv_mag = norm(dv);
    if (dv_mag > max_dv) dv *= max_dv / dv_mag;
    v += dv;
    c.root_vel = lift(v);
    c.root_pos = {c.root_pos.x + v.x * dt, c.root_pos.y + v.y * dt, geometry::kPelvisHeight};

    // Gait oscillator: feet half a cycle apart, stride along the actual motion.
    const double f = std::clamp(g.step_frequency, gait_limits::kMinStepFrequency, gait_limits::kMaxStepFrequency);
    c.gait_phase = std::fmod(c.gait_phase + f * dt, 1.0);
    const CharacterFrame frame = frame_of(c);
    const double speed = norm(v);
    const Vec2 move_dir = speed > 0.05 ? world_to_character(frame, v, VecKind::vector) / speed : Vec2{1.0, 0.0};
    const double amp = std::clamp(speed / 4.0, 0.0, 1.0);
    for (Side s : {Side::left, Side::right}) {
        FootState& foot = c.foot(s);
        const double phase = c.gait_phase + (s == Side::right ? 0.5 : 0.0);
        const double sn = std::sin(2.0 * kPi * phase);
        const double cs = std::cos(2.0 * kPi * phase);
        const double lift_h = amp > 1e-3 ? kStepLift * amp * std::max(0.0, cs) : 0.0;
        foot.offset = lift(move_dir * (kStrideAmplitude * amp * sn), lift_h);
        foot.contact = lift_h <= 0.0;
    }

    // Kick swing.
    bool recovered = false;
    Side recovered_foot = Side::right;
    StrikeState& st = c.strike;
    if (st.cooldown_ticks > 0) --st.cooldown_ticks;
    if (!st.active && g.kick.active && st.cooldown_ticks == 0) {
        st.active = true;
        st.foot = g.kick.foot;
        st.direction = normalized_or(character_to_world(frame, g.kick.direction, VecKind::vector), lift(c.facing));
        st.speed = std::clamp(g.kick.speed, 0.0, gait_limits::kMaxStrikeSpeed);
        st.travelled = 0.0;
        st.ticks = 0;
        const Vec3 station = character_to_world(frame, strike_station(st.foot), VecKind::point);
        // Wind up behind the station along the strike line, no lower than the ground.
        double back = BallState{}.radius + geometry::kFootRadius + kStrikeWindupGap;
        if (st.direction.z > 0.0) back = std::min(back, station.z / st.direction.z);
        const Vec3 windup = station - st.direction * back;
        c.foot(st.foot).pos = windup;
        c.foot(st.foot).vel = st.direction * st.speed;
    } else if (st.active) {
        FootState& foot = c.foot(st.foot);
        foot.pos += st.direction * (st.speed * dt);
        foot.pos.z = std::max(0.0, foot.pos.z);
        foot.vel = st.direction * st.speed;
        st.travelled += st.speed * dt;
        ++st.ticks;
        if (st.travelled >= kStrikeReach || st.ticks * dt >= kStrikeDuration) {
            st.active = false;
            st.cooldown_ticks = static_cast<int>(std::lround(kStrikeCooldown / dt));
            recovered = true;
            recovered_foot = st.foot;
        }
    }
    if (st.active) c.foot(st.foot).contact = false;

    refresh_body_points(c);
    for (Side s : {Side::left, Side::right}) {
        FootState& foot = c.foot(s);
        if (st.active && st.foot == s) continue;
        // The foot snapping back after a swing carries the root velocity only.
        if (recovered && recovered_foot == s) {
            foot.vel = c.root_vel;
        } else {
            foot.vel = (foot.pos - old_feet[index_of(s)]) / dt;
        }
    }
}

void separate_players(std::vector<CharacterState>& players) {
    const double min_sep = 2.0 * geometry::kBodyClearance;
    for (std::size_t i = 0; i < players.size(); ++i) {
        for (std::size_t j = i + 1; j < players.size(); ++j) {
            Vec2 d = players[i].root_pos.xy() - players[j].root_pos.xy();
            const double dist = norm(d);
            if (dist >= min_sep) continue;
            const Vec2 n = dist > 1e-9 ? d / dist : Vec2{i < j ? 1.0 : -1.0, 0.0};
            const Vec2 push = n * (0.5 * (min_sep - dist));
            players[i].root_pos += lift(push);
            players[j].root_pos -= lift(push);
            refresh_body_points(players[i]);
            refresh_body_points(players[j]);
        }
    }
}

constexpr ContactPart foot_contact_part(Side s) { return s == Side::left ? ContactPart::foot_l : ContactPart::foot_r; }

struct Collider {
    ContactPart part;
    Vec3 pos;
    double radius;
    CollisionKind kind;
};

std::array<Collider, 9> colliders_of(const CharacterState& c) {
    return {{
        {ContactPart::foot_l, c.foot(Side::left).pos, geometry::kFootRadius, CollisionKind::body},
        {ContactPart::foot_r, c.foot(Side::right).pos, geometry::kFootRadius, CollisionKind::body},
        {ContactPart::lower_leg_l, c.body_point(BodyPart::lower_leg_l), geometry::kLowerLegRadius, CollisionKind::body},
        {ContactPart::lower_leg_r, c.body_point(BodyPart::lower_leg_r), geometry::kLowerLegRadius, CollisionKind::body},
        {ContactPart::pelvis, c.root_pos, geometry::kPelvisRadius, CollisionKind::body},
        {ContactPart::torso, c.body_point(BodyPart::torso), geometry::kTorsoRadius, CollisionKind::body},
        {ContactPart::head, c.body_point(BodyPart::head), geometry::kHeadRadius, CollisionKind::body},
        {ContactPart::arm_l, c.handball_zones[0], c.handball_radius, CollisionKind::handball},
        {ContactPart::arm_r, c.handball_zones[1], c.handball_radius, CollisionKind::handball},
    }};
}

Vec3 collider_velocity(const CharacterState& c, const Collider& col) {
    // Only a striking foot moves on its own; gait swing does not impart
    // momentum, so feet otherwise act as rigid offsets of the root.
    if (c.strike.active) {
        if (col.part == foot_contact_part(c.strike.foot)) return c.foot(c.strike.foot).vel;
    }
    // Rigid offsets: root velocity plus the turning contribution.
    const Vec3 r = col.pos - c.root_pos;
    return c.root_vel + cross(Vec3{0.0, 0.0, c.facing_rate}, r);
}

}  // namespace

std::optional<CollisionEvent> step_ball(BallState& b, const SimConfig& cfg, std::uint64_t tick) {
    const double dt = cfg.dt_sim;
    const Vec3 a{0.0, 0.0, -cfg.gravity};
    const double lin = std::exp(-cfg.ball_linear_damping * dt);
    const double ang = std::exp(-cfg.ball_angular_damping * dt);
    const Vec3 p0 = b.pos;
    const Vec3 v0 = b.vel;
    const double r = b.radius;

    // Trapezoidal position update; exact for constant gravity without damping.
    Vec3 v1 = (v0 + a * dt) * lin;
    Vec3 p1 = p0 + (v0 + v1) * (0.5 * dt);
    b.ang_vel *= ang;

    std::optional<CollisionEvent> event;
    if (p1.z < r) {
        if (p0.z > r && v0.z < 0.0) {
            // Airborne crossing: resolve at the exact time of impact.
            const double g = cfg.gravity;
            const double disc = v0.z * v0.z + 2.0 * g * (p0.z - r);
            double tau = g > 0.0 ? (v0.z + std::sqrt(disc)) / g : (p0.z - r) / (-v0.z);
            tau = std::clamp(tau, 0.0, dt);
            const double k = std::exp(-cfg.ball_linear_damping * tau);
            BallState c = b;
            c.vel = (v0 + a * tau) * k;
            c.pos = p0 + v0 * tau + a * (0.5 * tau * tau);
            c.pos.z = r;
            const Vec3 pre = c.vel;
            const bool impact = ground_response(c, cfg, dt);
            const double rem = dt - tau;
            const double kr = std::exp(-cfg.ball_linear_damping * rem);
            v1 = (c.vel + a * rem) * kr;
            p1 = c.pos + (c.vel + v1) * (0.5 * rem);
            b.ang_vel = c.ang_vel;
            if (p1.z < r) {
                p1.z = r;
                v1.z = std::max(0.0, v1.z);
            }
            if (impact) {
                event = CollisionEvent{tick, -1, ContactPart::ground, CollisionKind::ground, pre, c.vel, false};
            }
        } else {
            // Resting or rolling contact.
            b.vel = v1;
            const bool impact = ground_response(b, cfg, dt);
            v1 = b.vel;
            p1 = p0 + lift(v1.xy() * dt);
            p1.z = r;
            if (impact) {
                event = CollisionEvent{tick, -1, ContactPart::ground, CollisionKind::ground, v0, v1, false};
            }
        }
    }
    b.pos = p1;
    b.vel = v1;
    return event;
}

void step(World& world, const SimConfig& cfg, std::span<const GaitParams> commands) {
    if (commands.size() != world.players.size())
        throw Error("step: one command per player is required");
    for (std::size_t i = 0; i < commands.size(); ++i) check_command(commands[i], i);
    const std::uint64_t tick = world.tick + 1;

    for (std::size_t i = 0; i < world.players.size(); ++i) advance_character(world.players[i], commands[i], cfg);
    separate_players(world.players);

    if (world.ball) {
        BallState& b = *world.ball;
        if (auto ev = step_ball(b, cfg, tick)) world.events.push_back(*ev);
        const double e = cfg.ball_character_restitution();
        const double mu = cfg.ball_character_friction();
        for (std::size_t i = 0; i < world.players.size(); ++i) {
            const CharacterState& c = world.players[i];
            // Cheap reject: the ball is far from every collider of this player.
            if (norm(b.pos.xy() - c.root_pos.xy()) > 2.0) continue;
            for (const Collider& col : colliders_of(c)) {
                const double reach = b.radius + col.radius;
                if (norm_sq(b.pos - col.pos) >= reach * reach) continue;
                const ContactResult res =
                    resolve_ball_body(b, col.pos, collider_velocity(c, col), col.radius, e, mu, c.facing);
                b = res.ball;
                if (res.impulse || res.degenerate) {
                    world.events.push_back(CollisionEvent{tick, static_cast<int>(i), col.part, col.kind,
                                                          res.pre_vel, res.post_vel, res.degenerate});
                }
            }
        }
        if (b.pos.z < b.radius) {
            b.pos.z = b.radius;
            b.vel.z = std::max(0.0, b.vel.z);
        }
        check_finite(b);
    }
    for (std::size_t i = 0; i < world.players.size(); ++i) check_finite(world.players[i], i);
    world.tick = tick;
}

void step_control(World& world, const SimConfig& cfg, std::span<const GaitParams> commands) {
    world.events.clear();
    for (int k = 0; k < cfg.control_divisor; ++k) step(world, cfg, commands);
}

}  // namespace footsim
