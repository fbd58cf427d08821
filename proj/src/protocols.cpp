#include "footsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace footsim {

const SkillPolicy& PolicySet::operator[](Skill s) const {
    switch (s) {
        case Skill::move: return move;
        case Skill::trap: return trap;
        case Skill::dribble: return dribble;
        case Skill::kick: return kick;
    }
    return move;
}

SkillPolicy& PolicySet::operator[](Skill s) {
    return const_cast<SkillPolicy&>(static_cast<const PolicySet&>(*this)[s]);
}

void ProtocolConfig::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error("protocol scale must be positive");
    sim.validate();
    reward.validate();
    episode.validate();
}

std::size_t scaled_count(std::size_t full, double scale) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(full) * scale)));
}

void score_player(PlayerFrame& p, const std::optional<BallState>& ball, const SkillGoal& goal, bool collided,
                  const RewardConfig& rc) {
    p.reward_terms.clear();
    std::visit(
        [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, MoveGoal>) {
                const MoveTaskTerms t = move_task_reward(g, p.character, rc);
                p.reward = t.total;
                p.reward_terms = {{"vel", t.vel}, {"dir", t.dir}};
            } else {
                if (!ball) throw Error("reward for skill '" + std::string(to_string(skill_of(goal))) + "' needs a ball");
                if constexpr (std::is_same_v<G, DribbleGoal>) {
                    const DribbleRewardTerms t = dribble_reward(g, *ball, p.character, rc);
                    p.reward = t.total;
                    p.reward_terms = {{"ball_vel", t.ball_vel}, {"ball_root_pos", t.ball_root_pos}, {"root_vel", t.root_vel}};
                } else if constexpr (std::is_same_v<G, TrapGoal>) {
                    p.reward = trap_reward(g, *ball, p.character, collided, rc);
                } else {
                    p.reward = kick_reward(g, *ball, rc);
                }
            }
        },
        goal);
}

namespace {

constexpr int kWarmupGoals = 4;
constexpr int kGoalTicks = 150;           // 5 s at 30 Hz
constexpr int kTransitionWindowTicks = 900;  // 30 s
constexpr int kPrePhaseMaxTicks = 300;

struct Recorder {
    Trajectory& traj;
    const ProtocolConfig& cfg;
    std::uint64_t tick{0};

    void record(const World& w, FsmState fsm, const SkillGoal& goal, const Latent& z, int segment, bool measured,
                bool collided, std::vector<TransitionRecord> transitions = {}) {
        TrajectoryFrame f;
        f.tick = ++tick;
        f.segment = segment;
        f.measured = measured;
        f.ball = w.ball;
        PlayerFrame p;
        p.id = 0;
        p.character = w.players[0];
        p.fsm = fsm;
        p.goal = goal;
        p.latent = z;
        score_player(p, w.ball, goal, collided, cfg.reward);
        f.players.push_back(std::move(p));
        f.events = w.events;
        for (auto& t : transitions) t.tick = f.tick;
        f.transitions = std::move(transitions);
        traj.frames.push_back(std::move(f));
    }
};

class Stepper {
public:
    Stepper(const ProtocolConfig& cfg) : sim_(cfg.sim), ctx_{cfg.sim, cfg.motion}, motion_(cfg.motion) {}

    Latent step(World& w, const SkillPolicy& p, const SkillGoal& g) {
        const Latent z = act(p, w.players[0], w.ball ? &*w.ball : nullptr, g, ctx_);
        cmd_[0] = decode(z, motion_);
        step_control(w, sim_, cmd_);
        return z;
    }

private:
    SimConfig sim_;
    ActContext ctx_;
    MotionConfig motion_;
    std::vector<GaitParams> cmd_ = std::vector<GaitParams>(1);
};

bool touched(const World& w) {
    return std::any_of(w.events.begin(), w.events.end(),
                       [](const CollisionEvent& e) { return e.player == 0 && e.kind != CollisionKind::ground; });
}

World make_world(const CharacterState& c, std::optional<BallState> ball, Rng& rng) {
    World w;
    w.players.push_back(c);
    refresh_body_points(w.players[0]);
    w.ball = ball;
    w.rng = rng.fork();
    return w;
}

BallState ball_at(Vec2 p, Vec2 v = {}) {
    BallState b;
    b.pos = lift(p, b.radius);
    b.vel = lift(v);
    return b;
}

Vec2 random_velocity(Rng& rng, double lo, double hi) {
    const Vec2 d = rng.unit_circle();
    return d * rng.uniform(lo, hi);
}

/// Kick target relative to a forward direction.
Vec3 kick_target(Vec2 forward, double yaw, double pitch, double speed) {
    const Vec2 h = rotate(direction_from_angle(yaw), forward);
    return lift(h * std::cos(pitch), std::sin(pitch)) * speed;
}

struct Buffers {
    StiBuffer move;
    StiBuffer trap;
};

// Start-state buffers recorded from the protocol's own policies with a
// stream derived from the seed, so compared runs share them.
StiBuffers ensure_buffers(const PolicySet& pol, const ProtocolConfig& cfg, bool need_trap, std::optional<Buffers>& store) {
    StiBuffers b = cfg.buffers;
    if (b.move && (!need_trap || b.trap)) return b;
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    RolloutConfig rc;
    rc.sim = cfg.sim;
    rc.motion = cfg.motion;
    rc.reward = cfg.reward;
    rc.episode = cfg.episode;
    rc.episode.use_sti = true;
    rc.episode.trap_stage = 1;
    store.emplace();
    if (b.move == nullptr) {
        const DegclBuffer degcl = build_degcl_buffer(cfg.motion);
        store->move = build_sti_buffer(pol.move, 2000, {}, &degcl, rng, rc);
        b.move = &store->move;
    }
    if (need_trap && b.trap == nullptr) {
        store->trap = build_sti_buffer(pol.trap, 500, {b.move}, nullptr, rng, rc);
        b.trap = &store->trap;
    }
    return b;
}

// ---------------------------------------------------------------------------

void run_dribble_goals(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng rng(cfg.seed);
    const std::size_t goals = scaled_count(1000, cfg.scale) + kWarmupGoals;
    std::vector<Vec2> schedule;
    for (std::size_t g = 0; g < goals; ++g) schedule.push_back(random_velocity(rng, 1.0, 7.0));
    CharacterState c = rest_pose();
    World w = make_world(c, ball_at(rng.unit_circle()), rng);
    Stepper st(cfg);
    for (std::size_t g = 0; g < goals; ++g) {
        const SkillGoal goal = DribbleGoal{schedule[g]};
        for (int t = 0; t < kGoalTicks; ++t) {
            const Latent z = st.step(w, pol.dribble, goal);
            rec.record(w, FsmState::dribble, goal, z, static_cast<int>(g), g >= kWarmupGoals, false);
        }
    }
}

void run_dribble_speed(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng rng(cfg.seed);
    const int warm = 300;
    const int measure = static_cast<int>(scaled_count(900, cfg.scale));
    Stepper st(cfg);
    for (int v = 1; v <= 7; ++v) {
        World w = make_world(rest_pose(), ball_at({1.0, 0.0}), rng);
        const SkillGoal goal = DribbleGoal{{static_cast<double>(v), 0.0}};
        for (int t = 0; t < warm + measure; ++t) {
            const Latent z = st.step(w, pol.dribble, goal);
            rec.record(w, FsmState::dribble, goal, z, v - 1, t >= warm, false);
        }
        rec.traj.header.labels["segment." + std::to_string(v - 1)] = std::to_string(v) + " m/s";
    }
}

void run_move_goals(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng rng(cfg.seed);
    const std::size_t goals = scaled_count(1000, cfg.scale) + kWarmupGoals;
    std::vector<MoveGoal> schedule;
    for (std::size_t g = 0; g < goals; ++g) {
        const Vec2 face = rng.unit_circle();
        const Vec2 dir = rng.unit_circle();
        const bool backward = angle_between(dir, face) > kPi / 2.0;
        const double speed = backward ? rng.uniform(1.0, 2.5) : rng.uniform(1.0, 5.0);
        schedule.push_back({dir * speed, face});
    }
    World w = make_world(rest_pose(), std::nullopt, rng);
    Stepper st(cfg);
    for (std::size_t g = 0; g < goals; ++g) {
        const SkillGoal goal = schedule[g];
        for (int t = 0; t < kGoalTicks; ++t) {
            const Latent z = st.step(w, pol.move, goal);
            rec.record(w, FsmState::move, goal, z, static_cast<int>(g), g >= kWarmupGoals, false);
        }
    }
}

// Runs a trap attempt under the episode termination rules.
void trap_attempt(World& w, const SkillPolicy& p, const TrapGoal& goal, const std::optional<PassInit>& pass,
                  const ProtocolConfig& cfg, Recorder& rec, Stepper& st, int segment,
                  std::vector<TransitionRecord> opening = {}) {
    ContactLog log;
    EpisodeClock clock{0, cfg.sim.dt_control()};
    const RewardWindows windows{cfg.reward.trap_post_ticks, cfg.reward.kick_window_ticks};
    while (true) {
        const Latent z = st.step(w, p, goal);
        update_contact_log(log, w.events, ++clock.control_ticks);
        rec.record(w, FsmState::trap, goal, z, segment, true, log.first_contact_tick.has_value(), std::move(opening));
        opening.clear();
        if (check_termination(Skill::trap, w, clock, log, pass, cfg.episode, windows).done()) break;
    }
}

void run_trap(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng master(cfg.seed);
    const std::size_t n = scaled_count(1000, cfg.scale);
    Stepper st(cfg);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(master.next_u64());
        const TrapGoal goal{kBodyParts[rng.index(kBodyParts.size())]};
        const CharacterState c = rest_pose();
        const PassInit pass = init_lob_pass(c, rng, cfg.sim);
        World w = make_world(c, pass.ball, rng);
        trap_attempt(w, pol.trap, goal, pass, cfg, rec, st, static_cast<int>(i));
    }
}

// Kick attempt: ends a kick window after the first touch, after the
// contact timeout, or once the ball is out of possession range.
void kick_attempt(World& w, const SkillPolicy& p, const KickGoal& goal, const ProtocolConfig& cfg, Recorder& rec,
                  Stepper& st, int segment, std::vector<TransitionRecord> opening = {}) {
    const int timeout = static_cast<int>(std::lround(cfg.episode.kick_contact_timeout / cfg.sim.dt_control()));
    std::optional<int> contact;
    for (int t = 1;; ++t) {
        const Latent z = st.step(w, p, goal);
        if (!contact && touched(w)) contact = t;
        rec.record(w, FsmState::kick, goal, z, segment, true, contact.has_value(), std::move(opening));
        opening.clear();
        if (contact) {
            if (t - *contact >= cfg.reward.kick_window_ticks) break;
        } else if (t >= timeout || horizontal_distance(*w.ball, w.players[0]) > kPossessionRadius) {
            break;
        }
    }
}

void run_kick(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng master(cfg.seed);
    const std::size_t n = scaled_count(1000, cfg.scale);
    Stepper st(cfg);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(master.next_u64());
        const double yaw = rng.uniform(-kPi / 4.0, kPi / 4.0);
        const double pitch = rng.uniform(0.0, kPi / 4.0);
        const double speed = rng.uniform(5.0, 35.0);
        const CharacterState c = rest_pose();
        World w = make_world(c, ball_at(c.root_pos.xy() + c.facing), rng);
        kick_attempt(w, pol.kick, KickGoal{kick_target(c.facing, yaw, pitch, speed)}, cfg, rec, st, static_cast<int>(i));
    }
}

// Dribbles toward `u` until the goal criterion holds or the window closes.
void dribble_after(World& w, const SkillPolicy& p, Vec2 u, Recorder& rec, Stepper& st, int segment) {
    const SkillGoal goal = DribbleGoal{u};
    for (int t = 0; t < kTransitionWindowTicks; ++t) {
        const Latent z = st.step(w, p, goal);
        rec.record(w, FsmState::dribble, goal, z, segment, true, false);
        if (norm(w.ball->vel.xy() - u) <= 0.1 * norm(u)) break;
    }
}

void run_trap_to_dribble(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    std::optional<Buffers> store;
    const StiBuffers buffers = ensure_buffers(pol, cfg, false, store);
    Rng master(cfg.seed);
    const std::size_t n = scaled_count(1000, cfg.scale);
    Stepper st(cfg);
    EpisodeConfig ec = cfg.episode;
    ec.trap_stage = 1;
    ec.use_sti = true;
    const TrapGoal goal{BodyPart::foot_r};
    const RewardWindows windows{cfg.reward.trap_post_ticks, cfg.reward.kick_window_ticks};
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(master.next_u64());
        EpisodeInit init = init_episode(Skill::trap, buffers, rng, ec, cfg.sim);
        const Vec2 u = random_velocity(rng, 1.0, 7.0);
        World& w = init.world;
        ContactLog log;
        EpisodeClock clock{0, cfg.sim.dt_control()};
        bool switched = false;
        while (true) {
            const Latent z = st.step(w, pol.trap, goal);
            update_contact_log(log, w.events, ++clock.control_ticks);
            if (touched(w)) {
                rec.record(w, FsmState::trap, goal, z, static_cast<int>(i), true, true,
                           {{0, 0, FsmState::trap, FsmState::dribble, TransitionTrigger::collision}});
                switched = true;
                break;
            }
            rec.record(w, FsmState::trap, goal, z, static_cast<int>(i), true, false);
            if (check_termination(Skill::trap, w, clock, log, init.pass, ec, windows).done()) break;
        }
        if (switched) dribble_after(w, pol.dribble, u, rec, st, static_cast<int>(i));
    }
}

void run_move_to_dribble(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng master(cfg.seed);
    const std::size_t n = scaled_count(1000, cfg.scale);
    Stepper st(cfg);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(master.next_u64());
        const CharacterState c = rest_pose();
        const Vec2 bp = c.root_pos.xy() + rng.unit_circle() * rng.uniform(2.5, 3.5);
        const Vec2 bv = random_velocity(rng, 0.0, 1.0);
        const double speed = rng.uniform(1.0, 7.0);
        const Vec2 u = random_velocity(rng, 1.0, 7.0);
        World w = make_world(c, ball_at(bp, bv), rng);
        bool switched = false;
        for (int t = 0; t < kPrePhaseMaxTicks && !switched; ++t) {
            const Vec2 to_ball = normalized_or(w.ball->pos.xy() - w.players[0].root_pos.xy(), w.players[0].facing);
            const SkillGoal goal = MoveGoal{to_ball * speed, to_ball};
            const Latent z = st.step(w, pol.move, goal);
            const FsmStep s = next_state(FsmState::move, {}, fsm_predicates(w, 0, w.events));
            std::vector<TransitionRecord> tr;
            if (s.next == FsmState::dribble) {
                tr.push_back({0, 0, FsmState::move, FsmState::dribble, *s.trigger});
                switched = true;
            }
            rec.record(w, FsmState::move, goal, z, static_cast<int>(i), true, false, std::move(tr));
        }
        if (switched) dribble_after(w, pol.dribble, u, rec, st, static_cast<int>(i));
    }
}

void run_move_to_trap(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    Rng master(cfg.seed);
    const std::size_t n = scaled_count(1000, cfg.scale);
    Stepper st(cfg);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(master.next_u64());
        const CharacterState c = rest_pose();
        // The ball waits at the passer's spot until it is launched.
        const PassInit first = init_lob_pass(c, rng, cfg.sim);
        const double speed = rng.uniform(1.0, 7.0);
        const int launch_tick = static_cast<int>(std::lround(rng.uniform(1.0, 2.0) / cfg.sim.dt_control()));
        World w = make_world(c, ball_at(first.launch), rng);
        for (int t = 0; t < launch_tick; ++t) {
            const Vec2 to_ball = normalized_or(w.ball->pos.xy() - w.players[0].root_pos.xy(), w.players[0].facing);
            const SkillGoal goal = MoveGoal{to_ball * speed, to_ball};
            const Latent z = st.step(w, pol.move, goal);
            rec.record(w, FsmState::move, goal, z, static_cast<int>(i), true, false);
        }
        // Launch a lob at the character's current state; the user's trap
        // command switches control in the same tick.
        const PassInit pass = init_lob_pass(w.players[0], rng, cfg.sim);
        w.ball = pass.ball;
        rec.traj.frames.back().transitions.push_back(
            {rec.traj.frames.back().tick, 0, FsmState::move, FsmState::trap, TransitionTrigger::trap_start});
        trap_attempt(w, pol.trap, TrapGoal{BodyPart::foot_r}, pass, cfg, rec, st, static_cast<int>(i));
    }
}

void run_dribble_to_kick(const PolicySet& pol, const ProtocolConfig& cfg, Recorder& rec) {
    std::optional<Buffers> store;
    const StiBuffers buffers = ensure_buffers(pol, cfg, true, store);
    Rng master(cfg.seed);
    const std::size_t n = scaled_count(1000, cfg.scale);
    Stepper st(cfg);
    EpisodeConfig ec = cfg.episode;
    ec.use_sti = true;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(master.next_u64());
        EpisodeInit init = init_episode(Skill::dribble, buffers, rng, ec, cfg.sim);
        World& w = init.world;
        const CharacterState& c0 = w.players[0];
        w.ball = ball_at(c0.root_pos.xy() + c0.facing * 1.5);
        const SkillGoal dgoal = DribbleGoal{c0.facing * rng.uniform(1.0, 7.0)};
        const int switch_tick = static_cast<int>(std::lround(rng.uniform(3.0, 5.0) / cfg.sim.dt_control()));
        const double yaw = rng.uniform(-kPi / 4.0, kPi / 4.0);
        const double pitch = rng.uniform(0.0, kPi / 4.0);
        const double speed = rng.uniform(7.0, 30.0);
        for (int t = 0; t < switch_tick; ++t) {
            const Latent z = st.step(w, pol.dribble, dgoal);
            rec.record(w, FsmState::dribble, dgoal, z, static_cast<int>(i), true, false);
        }
        rec.traj.frames.back().transitions.push_back(
            {rec.traj.frames.back().tick, 0, FsmState::dribble, FsmState::kick, TransitionTrigger::kick_start});
        const KickGoal kg{kick_target(w.players[0].facing, yaw, pitch, speed)};
        kick_attempt(w, pol.kick, kg, cfg, rec, st, static_cast<int>(i));
    }
}

using Runner = void (*)(const PolicySet&, const ProtocolConfig&, Recorder&);

struct Entry {
    ProtocolInfo info;
    Runner run;
    std::optional<FsmState> after;
    bool per_segment{false};
};

const std::vector<Entry>& registry() {
    using M = Metric;
    static const std::vector<Entry> r{
        {{"dribble-ablation", "continuous dribbling over re-drawn goals every 5 s", {M::cbd, M::fbd, M::dgar}},
         run_dribble_goals, std::nullopt, false},
        {{"dribble-speed", "forward dribbling at fixed target speeds 1..7 m/s", {M::cs, M::cbd, M::fbd}},
         run_dribble_speed, std::nullopt, true},
        {{"trap", "trapping lob passes with a random target body part", {M::tsr, M::hrts, M::rbspt}}, run_trap,
         std::nullopt, false},
        {{"move", "continuous moving over re-drawn goals every 5 s", {M::mgar, M::gmls}}, run_move_goals,
         std::nullopt, false},
        {{"kick", "kicks from a standing pose toward random target velocities", {M::ksr, M::kdd, M::ksd}}, run_kick,
         std::nullopt, false},
        {{"trap-to-dribble", "lob trap then dribble toward a random goal", {M::tadg, M::dgar30}},
         run_trap_to_dribble, FsmState::dribble, false},
        {{"move-to-dribble", "run to a loose ball then dribble toward a random goal", {M::tadg, M::dgar30}},
         run_move_to_dribble, FsmState::dribble, false},
        {{"move-to-trap", "run toward the passer, then trap a lob launched mid-run", {M::tsr, M::rbspt}},
         run_move_to_trap, FsmState::trap, false},
        {{"dribble-to-kick", "dribble forward, then kick after 3-5 s", {M::ksr, M::ttk, M::kdd, M::ksd}},
         run_dribble_to_kick, FsmState::kick, false},
    };
    return r;
}

const Entry& entry(std::string_view id) {
    for (const Entry& e : registry()) {
        if (e.info.id == id) return e;
    }
    std::string known;
    for (const Entry& e : registry()) known += (known.empty() ? "" : ", ") + e.info.id;
    throw Error("unknown protocol '" + std::string(id) + "' (known: " + known + ")");
}

}  // namespace

const std::vector<ProtocolInfo>& protocols() {
    static const std::vector<ProtocolInfo> list = [] {
        std::vector<ProtocolInfo> v;
        for (const Entry& e : registry()) v.push_back(e.info);
        return v;
    }();
    return list;
}

const ProtocolInfo& protocol_info(std::string_view id) { return entry(id).info; }

std::vector<MetricReport> protocol_reports(const Trajectory& t, const DegclBuffer* degcl) {
    const std::string& src = t.header.source;
    if (src.rfind("protocol:", 0) != 0) throw Error("trajectory was not recorded by a protocol ('" + src + "')");
    const Entry& e = entry(std::string_view(src).substr(9));
    std::optional<DegclBuffer> own;
    if (degcl == nullptr) degcl = &own.emplace(build_degcl_buffer());
    MetricOptions opt;
    opt.degcl = degcl;
    opt.after_transition_to = e.after;
    const auto label_it = t.header.labels.find("label");
    const std::string label = label_it == t.header.labels.end() ? "" : label_it->second;

    std::vector<MetricReport> out;
    auto emit = [&](const Trajectory& part, const std::string& row) {
        for (Metric m : e.info.metrics) {
            MetricReport r = compute(m, part, opt);
            r.label = row;
            out.push_back(std::move(r));
        }
    };
    if (!e.per_segment) {
        emit(t, label);
        return out;
    }
    std::map<int, Trajectory> parts;
    for (const auto& f : t.frames) {
        Trajectory& p = parts[f.segment];
        p.header = t.header;
        p.frames.push_back(f);
    }
    for (const auto& [seg, part] : parts) {
        const auto it = t.header.labels.find("segment." + std::to_string(seg));
        const std::string name = it == t.header.labels.end() ? std::to_string(seg) : it->second;
        emit(part, label.empty() ? name : label + " " + name);
    }
    return out;
}

ProtocolRun run_protocol(std::string_view id, const PolicySet& policies, const ProtocolConfig& cfg) {
    cfg.validate();
    const Entry& e = entry(id);
    ProtocolRun run;
    TrajectoryHeader& h = run.trajectory.header;
    h.seed = cfg.seed;
    h.config_hash = cfg.config_hash;
    h.source = "protocol:" + e.info.id;
    h.dt_control = cfg.sim.dt_control();
    h.modules = {{"footsim", "1"}};
    std::ostringstream scale;
    scale << std::setprecision(17) << cfg.scale;
    h.labels = {{"label", cfg.label}, {"scale", scale.str()}};
    for (Skill s : kSkills) h.labels["policy." + std::string(to_string(s))] = std::string(to_string(policies[s].kind));

    Recorder rec{run.trajectory, cfg};
    e.run(policies, cfg, rec);
    run.reports = protocol_reports(run.trajectory, cfg.degcl);
    return run;
}

void write_reports_csv(std::ostream& os, const std::vector<MetricReport>& reports) {
    os << "protocol,label,metric,value,unit,count,seed,config_hash\n";
    for (const MetricReport& r : reports) {
        os << r.protocol << ',' << r.label << ',' << r.metric << ',';
        if (r.defined()) {
            std::ostringstream v;
            v << std::setprecision(17) << *r.value;
            os << v.str();
        }
        os << ',' << r.unit << ',' << r.count << ',' << r.seed << ',' << hex64(r.config_hash) << '\n';
    }
}

void write_reports_table(std::ostream& os, const std::vector<MetricReport>& reports) {
    std::vector<std::string> metrics, labels;
    std::map<std::pair<std::string, std::string>, const MetricReport*> cell;
    for (const MetricReport& r : reports) {
        if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
        if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
        cell[{r.label, r.metric}] = &r;
    }
    std::vector<std::string> head{""};
    for (const auto& m : metrics) {
        const auto metric = metric_from_string(m);
        std::string unit = metric ? std::string(unit_of(*metric)) : "";
        if (unit == "fraction") unit = "%";
        head.push_back(m + "(" + unit + ")" + (metric && lower_is_better(*metric) ? "↓" : "↑"));
    }
    std::vector<std::vector<std::string>> rows{head};
    for (const auto& l : labels) {
        std::vector<std::string> row{l.empty() ? "policy" : l};
        for (const auto& m : metrics) {
            const auto it = cell.find({l, m});
            std::string text = "-";
            if (it != cell.end() && it->second->defined()) {
                std::ostringstream v;
                const bool pct = it->second->unit == "fraction";
                v << std::fixed << std::setprecision(pct ? 1 : 2) << *it->second->value * (pct ? 100.0 : 1.0);
                text = v.str();
            }
            row.push_back(text);
        }
        rows.push_back(row);
    }
    // Display width: count code points, not bytes, so arrows align.
    auto width = [](const std::string& s) {
        return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
    };
    std::vector<std::size_t> w(head.size(), 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], width(row[i]));
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const std::string pad(w[i] - width(row[i]), ' ');
            os << (i == 0 ? row[i] + pad : "  " + pad + row[i]);
        }
        os << '\n';
    }
}

}  // namespace footsim
