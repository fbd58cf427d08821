#include "footsim/episodes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "footsim/binio.hpp"

namespace footsim {

// ---------------------------------------------------------------------------
// StiBuffer

StiBuffer::StiBuffer(Skill source, std::size_t capacity) : source_(source), capacity_(capacity) {
    if (source == Skill::kick) throw Error("kick has no STI buffer");
    if (capacity == 0) throw Error("STI buffer capacity must be positive");
}

bool StiBuffer::add(Snapshot s) {
    if (s.source != source_) throw Error("snapshot source does not match the STI buffer");
    if (source_ == Skill::move && s.ball) throw Error("move snapshots never carry a ball");
    if (source_ == Skill::trap && !s.ball) throw Error("trap snapshots always carry a ball");
    if (full()) return false;
    snapshots_.push_back(std::move(s));
    return true;
}

const Snapshot& StiBuffer::sample(Rng& rng) const {
    if (snapshots_.empty()) throw Error("cannot sample an empty STI buffer");
    return snapshots_[rng.index(snapshots_.size())];
}

StiBuffer StiBuffer::subsample(std::size_t count, Rng& rng) const {
    if (count > snapshots_.size()) throw Error("subsample larger than the STI buffer");
    std::vector<std::size_t> idx(snapshots_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    StiBuffer out(source_, std::max<std::size_t>(count, 1));
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
    for (std::size_t i = 0; i < count; ++i) out.add(snapshots_[idx[i]]);
    return out;
}

namespace {

constexpr const char* kStiMagic = "footsim-sti";
constexpr int kStiVersion = 1;

void write_character(std::ostream& os, const CharacterState& c) {
    using namespace binio;
    write_vec(os, c.root_pos);
    write_vec(os, c.root_vel);
    write_f64(os, c.facing.x);
    write_f64(os, c.facing.y);
    write_f64(os, c.facing_rate);
    write_f64(os, c.gait_phase);
    for (const auto& f : c.feet) {
        write_vec(os, f.pos);
        write_vec(os, f.vel);
        write_f64(os, f.contact ? 1.0 : 0.0);
        write_vec(os, f.offset);
    }
    const StrikeState& s = c.strike;
    write_f64(os, s.active ? 1.0 : 0.0);
    write_f64(os, static_cast<double>(index_of(s.foot)));
    write_vec(os, s.direction);
    write_f64(os, s.speed);
    write_f64(os, s.travelled);
    write_f64(os, s.ticks);
    write_f64(os, s.cooldown_ticks);
}

CharacterState read_character(std::istream& is) {
    using namespace binio;
    CharacterState c;
    c.root_pos = read_vec3(is);
    c.root_vel = read_vec3(is);
    c.facing.x = read_f64(is);
    c.facing.y = read_f64(is);
    c.facing_rate = read_f64(is);
    c.gait_phase = read_f64(is);
    for (auto& f : c.feet) {
        f.pos = read_vec3(is);
        f.vel = read_vec3(is);
        f.contact = read_f64(is) != 0.0;
        f.offset = read_vec3(is);
    }
    StrikeState& s = c.strike;
    s.active = read_f64(is) != 0.0;
    s.foot = read_f64(is) != 0.0 ? Side::right : Side::left;
    s.direction = read_vec3(is);
    s.speed = read_f64(is);
    s.travelled = read_f64(is);
    s.ticks = static_cast<int>(read_f64(is));
    s.cooldown_ticks = static_cast<int>(read_f64(is));
    refresh_body_points(c);
    return c;
}

}  // namespace

void write_sti(std::ostream& os, const StiBuffer& buf, std::uint64_t seed, std::uint64_t config_hash) {
    os << kStiMagic << ' ' << kStiVersion << ' ' << to_string(buf.source()) << ' ' << buf.size() << ' '
       << buf.capacity() << ' ' << seed << ' ' << config_hash << '\n';
    for (const Snapshot& s : buf.snapshots()) {
        binio::write_f64(os, static_cast<double>(s.tick_tag));
        write_character(os, s.character);
        binio::write_f64(os, s.ball ? 1.0 : 0.0);
        if (s.ball) {
            binio::write_vec(os, s.ball->pos);
            binio::write_vec(os, s.ball->vel);
            binio::write_vec(os, s.ball->ang_vel);
            binio::write_f64(os, s.ball->radius);
            binio::write_f64(os, s.ball->mass);
        }
    }
    if (!os) throw Error("failed to write STI buffer");
}

StiBuffer read_sti(std::istream& is, StiFileHeader* header) {
    std::string line;
    if (!std::getline(is, line)) throw Error("missing STI header");
    std::istringstream hs(line);
    std::string magic, skill;
    int version = 0;
    StiFileHeader h;
    if (!(hs >> magic >> version >> skill >> h.count >> h.capacity >> h.seed >> h.config_hash) || magic != kStiMagic)
        throw Error("not an STI buffer file");
    if (version != kStiVersion) throw Error("unsupported STI buffer version");
    const auto src = skill_from_string(skill);
    if (!src) throw Error("unknown STI source skill '" + skill + "'");
    h.source = *src;
    StiBuffer buf(h.source, std::max(h.capacity, h.count));
    for (std::size_t i = 0; i < h.count; ++i) {
        Snapshot s;
        s.source = h.source;
        s.tick_tag = static_cast<std::uint64_t>(binio::read_f64(is));
        s.character = read_character(is);
        if (binio::read_f64(is) != 0.0) {
            BallState b;
            b.pos = binio::read_vec3(is);
            b.vel = binio::read_vec3(is);
            b.ang_vel = binio::read_vec3(is);
            b.radius = binio::read_f64(is);
            b.mass = binio::read_f64(is);
            s.ball = b;
        }
        buf.add(std::move(s));
    }
    if (header) *header = h;
    return buf;
}

// ---------------------------------------------------------------------------
// Passes

Flight lob_flight(double v0, double phi, double g) {
    return {v0 * v0 * std::sin(2.0 * phi) / g, 2.0 * v0 * std::sin(phi) / g};
}

std::string_view to_string(PassKind k) { return k == PassKind::lob ? "lob" : "ground"; }

Vec2 sample_pass_target(const CharacterState& c, double lead_time, Rng& rng) {
    const Vec2 v = c.root_vel.xy();
    const Vec2 center = c.root_pos.xy() + v * lead_time;
    const Vec2 axis = normalized_or(v, c.facing, 1e-6);
    const double r = std::sqrt(rng.uniform());
    const double a = rng.uniform(-kPi / 4.0, kPi / 4.0);
    return center + rotate(axis, direction_from_angle(a)) * r;
}

PassInit init_lob_pass(const CharacterState& c, Rng& rng, const SimConfig& sim) {
    PassInit p;
    p.kind = PassKind::lob;
    LobSpec& s = p.spec;
    s.v0 = rng.uniform(10.0, 30.0);
    s.spin = rng.unit_sphere() * rng.uniform(0.0, 80.0);
    s.phi = rng.uniform(deg_to_rad(10.0), deg_to_rad(45.0));
    const Flight f = lob_flight(s.v0, s.phi, sim.gravity);
    s.landing = sample_pass_target(c, f.time, rng);
    p.launch = s.landing + rng.unit_circle() * f.distance;
    p.travel_dir = normalized_or(s.landing - p.launch, {1.0, 0.0});
    p.ball.pos = lift(p.launch, p.ball.radius);
    p.ball.vel = lift(p.travel_dir * (s.v0 * std::cos(s.phi)), s.v0 * std::sin(s.phi));
    p.ball.ang_vel = s.spin;
    return p;
}

double ground_pass_offset(double v0) { return 15.0 + (v0 - 10.0) * 1.5; }

PassInit init_ground_pass(const CharacterState& c, Rng& rng, const SimConfig&) {
    PassInit p;
    p.kind = PassKind::ground;
    LobSpec& s = p.spec;
    s.v0 = rng.uniform(10.0, 30.0);
    const double offset = ground_pass_offset(s.v0);
    s.landing = sample_pass_target(c, offset / s.v0, rng);
    p.launch = s.landing + rng.unit_circle() * offset;
    p.travel_dir = normalized_or(s.landing - p.launch, {1.0, 0.0});
    const double radius = p.ball.radius;
    const double height = rng.uniform(radius, 0.5);
    s.phi = rng.uniform(0.0, deg_to_rad(10.0));
    p.ball.pos = lift(p.launch, height);
    p.ball.vel = lift(p.travel_dir * (s.v0 * std::cos(s.phi)), s.v0 * std::sin(s.phi));
    return p;
}

// ---------------------------------------------------------------------------
// Goals

GoalSample sample_goal(Skill skill, Rng& rng, const GoalContext& ctx) {
    GoalSample out;
    switch (skill) {
        case Skill::dribble: {
            const double speed = rng.uniform(0.0, 7.0);
            out.goal = DribbleGoal{rng.unit_circle() * speed};
            out.reassign_after = rng.uniform(5.0, 6.5);
            break;
        }
        case Skill::trap: {
            const std::size_t n = ctx.pass == PassKind::lob ? 6 : 2;
            const std::size_t k = rng.index(n);
            out.goal = TrapGoal{ctx.pass == PassKind::lob ? kBodyParts[k] : (k == 0 ? BodyPart::foot_l : BodyPart::foot_r)};
            break;
        }
        case Skill::move: {
            if (ctx.mode == GoalMode::degcl) {
                if (ctx.degcl == nullptr || ctx.degcl->size() == 0) throw Error("DEGCL goal sampling needs a DEGCL buffer");
                const std::size_t k = rng.index(ctx.degcl->size());
                const DegclPair& pair = (*ctx.degcl)[k];
                const CharacterFrame f = ctx.character ? frame_of(*ctx.character) : CharacterFrame{};
                out.goal = MoveGoal{character_to_world(f, pair.ref_goal.move_vel, VecKind::vector),
                                    character_to_world(f, pair.ref_goal.face_dir, VecKind::vector)};
                out.mode = GoalMode::degcl;
                out.ref_latent = pair.ref_latent;
                out.degcl_index = k;
            } else {
                const double speed = rng.uniform(0.0, 7.0);
                const Vec2 dir = rng.unit_circle();
                out.goal = MoveGoal{dir * speed, rng.unit_circle()};
            }
            out.reassign_after = rng.uniform(5.0, 6.5);
            break;
        }
        case Skill::kick: {
            const Vec2 forward = ctx.character ? ctx.character->facing : Vec2{1.0, 0.0};
            const double yaw = rng.uniform(-kPi / 4.0, kPi / 4.0);
            const double pitch = rng.uniform(0.0, kPi / 4.0);
            const double speed = rng.uniform(5.0, 35.0);
            const Vec2 h = rotate(forward, direction_from_angle(yaw));
            out.goal = KickGoal{lift(h * (speed * std::cos(pitch)), speed * std::sin(pitch))};
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Episodes

void EpisodeConfig::validate() const {
    if (trap_stage != 1 && trap_stage != 2) throw Error("trap_stage must be 1 or 2");
    for (double p : {trap_lob_fraction, dribble_trap_fraction, kick_dribble_fraction}) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("episode mixture fractions must lie in [0, 1]");
    }
    if (!(max_episode_time > 0.0) || !(kick_contact_timeout > 0.0)) throw Error("episode limits must be positive");
}

std::string_view to_string(InitSource s) {
    switch (s) {
        case InitSource::rest: return "rest";
        case InitSource::move_snapshot: return "move_snapshot";
        case InitSource::trap_snapshot: return "trap_snapshot";
        case InitSource::dribble_snapshot: return "dribble_snapshot";
    }
    return "?";
}

namespace {

const StiBuffer& require(const StiBuffer* buf, std::string_view predecessor, Skill for_skill) {
    if (buf == nullptr || buf->empty()) {
        throw Error("training " + std::string(to_string(for_skill)) + " requires the " + std::string(predecessor) +
                    " STI buffer (train the " + std::string(predecessor) + " policy first)");
    }
    return *buf;
}

BallState ball_on_ground_near(const CharacterState& c, double radius, double max_speed, Rng& rng) {
    BallState b;
    b.pos = lift(c.root_pos.xy() + rng.in_disc(radius), b.radius);
    b.vel = lift(rng.unit_circle() * rng.uniform(0.0, max_speed));
    return b;
}

}  // namespace

EpisodeInit init_episode(Skill skill, const StiBuffers& buffers, Rng& rng, const EpisodeConfig& cfg,
                         const SimConfig& sim) {
    cfg.validate();
    EpisodeInit init;
    CharacterState character = rest_pose();
    switch (skill) {
        case Skill::move:
            init.source = InitSource::rest;
            break;
        case Skill::trap: {
            if (cfg.use_sti) {
                character = require(buffers.move, "move", skill).sample(rng).character;
                init.source = InitSource::move_snapshot;
            }
            const bool lob = cfg.trap_stage == 1 || rng.bernoulli(cfg.trap_lob_fraction);
            init.pass = lob ? init_lob_pass(character, rng, sim) : init_ground_pass(character, rng, sim);
            init.world.ball = init.pass->ball;
            break;
        }
        case Skill::dribble: {
            if (!cfg.use_sti) {
                init.world.ball = ball_on_ground_near(character, cfg.dribble_ball_radius, cfg.dribble_ball_max_speed, rng);
                break;
            }
            const StiBuffer& trap = require(buffers.trap, "trap", skill);
            const StiBuffer& move = require(buffers.move, "move", skill);
            if (rng.bernoulli(cfg.dribble_trap_fraction)) {
                const Snapshot& s = trap.sample(rng);
                character = s.character;
                init.world.ball = s.ball;
                init.source = InitSource::trap_snapshot;
            } else {
                character = move.sample(rng).character;
                init.world.ball = ball_on_ground_near(character, cfg.dribble_ball_radius, cfg.dribble_ball_max_speed, rng);
                init.source = InitSource::move_snapshot;
            }
            break;
        }
        case Skill::kick: {
            const StiBuffer* dribble = cfg.use_sti ? &require(buffers.dribble, "dribble", skill) : nullptr;
            if (dribble && rng.bernoulli(cfg.kick_dribble_fraction)) {
                const Snapshot& s = dribble->sample(rng);
                character = s.character;
                init.world.ball = s.ball;
                if (!init.world.ball) throw Error("dribble snapshot without a ball");
                init.source = InitSource::dribble_snapshot;
            } else {
                init.world.ball = ball_on_ground_near(character, cfg.kick_ball_radius, 0.0, rng);
                init.source = InitSource::rest;
            }
            break;
        }
    }
    init.world.players.push_back(character);
    init.world.rng = rng.fork();
    return init;
}

void update_contact_log(ContactLog& log, std::span<const CollisionEvent> events, int control_tick, int player) {
    for (const CollisionEvent& e : events) {
        if (e.kind == CollisionKind::ground) {
            if (!log.first_contact_tick && !log.handball) log.ground_before_contact = true;
            continue;
        }
        if (e.player != player) continue;
        if (e.kind == CollisionKind::handball) {
            log.handball = true;
            continue;
        }
        if (!log.first_contact_tick) {
            log.first_contact_tick = control_tick;
            log.first_contact_part = e.part;
        }
    }
}

std::string_view to_string(TerminationKind k) {
    switch (k) {
        case TerminationKind::running: return "running";
        case TerminationKind::early_stop: return "early_stop";
        case TerminationKind::finished: return "finished";
        case TerminationKind::timeout: return "timeout";
    }
    return "?";
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::none: return "none";
        case StopReason::ball_lost: return "ball_lost";
        case StopReason::handball: return "handball";
        case StopReason::lob_grounded: return "lob_grounded";
        case StopReason::ball_passed: return "ball_passed";
    }
    return "?";
}

Termination check_termination(Skill skill, const World& world, const EpisodeClock& clock, const ContactLog& log,
                              const std::optional<PassInit>& pass, const EpisodeConfig& cfg,
                              const RewardWindows& windows, int player) {
    const int t = clock.control_ticks;
    const int max_ticks = static_cast<int>(std::lround(cfg.max_episode_time / clock.dt_control));
    const auto stop = [](StopReason r) { return Termination{TerminationKind::early_stop, r}; };
    const Termination timeout{TerminationKind::timeout, StopReason::none};
    const Termination finished{TerminationKind::finished, StopReason::none};
    const CharacterState& c = world.players.at(static_cast<std::size_t>(player));

    switch (skill) {
        case Skill::move:
            break;
        case Skill::dribble:
            if (!world.ball) throw Error("dribble episode without a ball");
            if (horizontal_distance(*world.ball, c) > cfg.dribble_lost_distance) return stop(StopReason::ball_lost);
            break;
        case Skill::trap: {
            if (!world.ball) throw Error("trap episode without a ball");
            if (log.handball) return stop(StopReason::handball);
            if (log.first_contact_tick) {
                if (t - *log.first_contact_tick >= windows.trap_post_ticks) return finished;
                break;
            }
            const PassKind kind = pass ? pass->kind : PassKind::lob;
            if (kind == PassKind::lob && log.ground_before_contact) return stop(StopReason::lob_grounded);
            if (kind == PassKind::ground && pass) {
                const double along = dot(world.ball->pos.xy() - c.root_pos.xy(), pass->travel_dir);
                if (along > cfg.ground_pass_beyond_margin) return stop(StopReason::ball_passed);
            }
            break;
        }
        case Skill::kick: {
            const bool contact = log.first_contact_tick.has_value();
            if (contact && t - *log.first_contact_tick >= windows.kick_window_ticks) return finished;
            const int no_contact_ticks = static_cast<int>(std::lround(cfg.kick_contact_timeout / clock.dt_control));
            if (!contact && t >= no_contact_ticks) return timeout;
            break;
        }
    }
    if (t >= max_ticks) return timeout;
    return {};
}

}  // namespace footsim
