#include "footsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace footsim {

// ---------------------------------------------------------------------------
// Passes.

Vec3 solve_pass(const PassRequest& req, double gravity) {
    if (!(gravity > 0.0)) throw Error("gravity must be positive");
    if (!is_finite(req.launch) || !is_finite(req.landing)) throw Error("pass endpoints must be finite");
    const Vec2 span = req.landing - req.launch.xy();
    const double d = norm(span);
    if (!(d > 1e-9)) throw Error("pass landing must differ from the launch point horizontally");
    if (req.launch.z < BallState{}.radius - 1e-6) throw Error("pass launch point is below the ball radius");
    if (!(req.phi >= kMinLobAngle - 1e-12 && req.phi <= kMaxLobAngle + 1e-12)) {
        throw Error("lob angle " + std::to_string(rad_to_deg(req.phi)) + " deg is outside [0.45, 45]");
    }
    const double v0 = std::sqrt(d * gravity / std::sin(2.0 * req.phi));
    const Vec2 dir = span / d;
    const double horizontal = v0 * std::cos(req.phi);
    const double vertical =
        req.kind == PassKind::lob ? v0 * std::sin(req.phi) : horizontal * std::tan(kGroundPassElevation);
    return lift(dir * horizontal, vertical);
}

// ---------------------------------------------------------------------------
// Player AI.

Vec2 chase_point(const BallState& ball, double lead_time) { return ball.pos.xy() + ball.vel.xy() * lead_time; }

namespace {

MoveGoal run_at(const CharacterState& c, Vec2 target, Vec2 face, double speed) {
    const Vec2 d = target - c.root_pos.xy();
    const double dist = norm(d);
    // Close to the target the full speed would overshoot it every tick.
    const double s = std::min(speed, 3.0 * dist);
    return {dist > 1e-6 ? d * (s / dist) : Vec2{}, face};
}

Vec2 face_ball(const World& w, const CharacterState& c) {
    return w.ball ? normalized_or(w.ball->pos.xy() - c.root_pos.xy(), c.facing, 1e-6) : c.facing;
}

const CharacterState& player(const World& w, int id) {
    if (id < 0 || static_cast<std::size_t>(id) >= w.players.size()) {
        throw Error("player index " + std::to_string(id) + " out of range");
    }
    return w.players[static_cast<std::size_t>(id)];
}

double ball_distance(const World& w, int id) {
    return w.ball ? horizontal_distance(*w.ball, player(w, id)) : std::numeric_limits<double>::infinity();
}

}  // namespace

MoveGoal opponent_chase_goal(const World& w, int me, int controlled, const ChaseConfig& cfg) {
    const CharacterState& c = player(w, me);
    if (!w.ball) return {{}, c.facing};
    const Vec2 face = face_ball(w, c);
    if (horizontal_distance(*w.ball, c) <= cfg.engage_radius) {
        return run_at(c, chase_point(*w.ball, cfg.lead_time), face, cfg.speed);
    }
    return run_at(c, player(w, controlled).root_pos.xy(), face, cfg.speed);
}

MoveGoal intercept_goal(const World& w, int me, const ChaseConfig& cfg) {
    const CharacterState& c = player(w, me);
    if (!w.ball) return {{}, c.facing};
    return run_at(c, chase_point(*w.ball, cfg.lead_time), face_ball(w, c), cfg.speed);
}

MoveGoal seek_goal(const CharacterState& c, Vec2 target, Vec2 face, double max_speed) {
    const Vec2 d = target - c.root_pos.xy();
    const double dist = norm(d);
    if (dist < 0.3) return {{}, face};
    const double s = std::min(max_speed, 1.2 * dist);
    return {d * (s / dist), face};
}

// ---------------------------------------------------------------------------
// Formation.

FormationSpec FormationSpec::standard(int players) {
    if (players < 1 || players > 11) throw Error("formation size must be in [1, 11], got " + std::to_string(players));
    struct Slot {
        const char* role;
        Vec2 anchor;
    };
    // Filled in the order small teams take them.
    static const Slot slots[] = {
        {"GK", {-50.0, 0.0}},   {"LS", {-3.0, 6.0}},    {"LCB", {-36.0, 8.0}}, {"RS", {-3.0, -6.0}},
        {"RCB", {-36.0, -8.0}}, {"CAM", {-9.0, 0.0}},   {"CM", {-20.0, 0.0}},  {"LB", {-32.0, 22.0}},
        {"RB", {-32.0, -22.0}}, {"LM", {-18.0, 15.0}},  {"RM", {-18.0, -15.0}},
    };
    FormationSpec f;
    for (int i = 0; i < players; ++i) {
        f.roles.emplace_back(slots[i].role);
        f.anchors.push_back(slots[i].anchor);
    }
    return f;
}

void FormationSpec::validate() const {
    if (anchors.empty()) throw Error("formation has no anchors");
    if (!roles.empty() && roles.size() != anchors.size()) throw Error("formation roles and anchors differ in count");
    for (const Vec2& a : anchors) {
        if (!is_finite(a) || std::abs(a.x) > kFieldLength / 2.0 || std::abs(a.y) > kFieldWidth / 2.0) {
            throw Error("formation anchor off the field");
        }
    }
    if (!std::isfinite(shift_gain) || shift_gain < 0.0 || shift_gain > 1.0) throw Error("shift gain must be in [0, 1]");
}

std::vector<Vec2> formation_positions(const FormationSpec& spec, TeamSide side, Vec2 ball) {
    const double margin = 0.5;
    std::vector<Vec2> out;
    out.reserve(spec.anchors.size());
    for (const Vec2& a : spec.anchors) {
        const Vec2 base = side == TeamSide::home ? a : Vec2{-a.x, -a.y};
        const Vec2 t{base.x + spec.shift_gain * ball.x, base.y};
        out.push_back({std::clamp(t.x, -kFieldLength / 2.0 + margin, kFieldLength / 2.0 - margin),
                       std::clamp(t.y, -kFieldWidth / 2.0 + margin, kFieldWidth / 2.0 - margin)});
    }
    return out;
}

int formation_chaser(const FormationSpec& spec, const World& w, std::span<const int> team,
                     std::span<const Vec2> targets) {
    if (team.empty()) throw Error("formation_chaser needs at least one player");
    if (targets.size() != team.size()) throw Error("one formation target per player required");
    int best_near = -1;
    int best_any = -1;
    double near_d = std::numeric_limits<double>::infinity();
    double any_d = near_d;
    for (std::size_t i = 0; i < team.size(); ++i) {
        const double d = ball_distance(w, team[i]);
        const double from_target = w.ball ? norm(w.ball->pos.xy() - targets[i]) : d;
        if (d < any_d) {
            any_d = d;
            best_any = team[i];
        }
        if (d <= spec.chase_ball_radius && from_target <= spec.chase_target_radius && d < near_d) {
            near_d = d;
            best_near = team[i];
        }
    }
    return best_near >= 0 ? best_near : best_any;
}

FormationOrders formation_targets(const FormationSpec& spec, const World& w, std::span<const int> team,
                                  TeamSide side, bool chase, const ChaseConfig& cc) {
    if (team.size() > spec.size()) throw Error("more players than formation slots");
    FormationOrders o;
    std::vector<Vec2> all = formation_positions(spec, side, w.ball ? w.ball->pos.xy() : Vec2{});
    o.targets.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(team.size()));
    if (chase) o.chaser = formation_chaser(spec, w, team, o.targets);
    for (std::size_t i = 0; i < team.size(); ++i) {
        const CharacterState& c = player(w, team[i]);
        if (team[i] == o.chaser) {
            o.goals.push_back(intercept_goal(w, team[i], cc));
            continue;
        }
        const Vec2 to_target = o.targets[i] - c.root_pos.xy();
        const Vec2 face = chase && norm(to_target) > 1.0 ? to_target / norm(to_target) : face_ball(w, c);
        o.goals.push_back(seek_goal(c, o.targets[i], face));
    }
    return o;
}

// ---------------------------------------------------------------------------
// Control switching.

int switch_control(const World& w, std::span<const int> team, std::span<const FsmState> states, int current,
                   const SwitchRequest& req) {
    if (team.empty()) return current;
    auto on_team = [&](int id) { return std::find(team.begin(), team.end(), id) != team.end(); };
    if (req.pass_target && on_team(*req.pass_target)) return *req.pass_target;

    auto closest_of = [&](auto&& keep) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int id : team) {
            if (!keep(id)) continue;
            const double d = ball_distance(w, id);
            if (best < 0 || d < best_d) {
                best = id;
                best_d = d;
            }
        }
        return best;
    };
    auto with_ball = [&](int id) {
        const auto i = static_cast<std::size_t>(id);
        return i < states.size() && (states[i] == FsmState::dribble || states[i] == FsmState::trap);
    };
    if (const int b = closest_of(with_ball); b >= 0) return b;
    if (req.closest) return closest_of([](int) { return true; });
    if (req.cycle != 0) {
        const auto it = std::find(team.begin(), team.end(), current);
        const auto n = static_cast<std::ptrdiff_t>(team.size());
        const std::ptrdiff_t at = it == team.end() ? 0 : it - team.begin();
        const std::ptrdiff_t step = req.cycle > 0 ? 1 : -1;
        return team[static_cast<std::size_t>(((at + step) % n + n) % n)];
    }
    return on_team(current) ? current : team.front();
}

// ---------------------------------------------------------------------------
// Gamepad.

PadInput PadInput::clamped() const {
    auto stick = [](Vec2 v) {
        if (!is_finite(v)) return Vec2{};
        const double n = norm(v);
        return n > 1.0 ? v / n : v;
    };
    auto trigger = [](double t) { return std::isfinite(t) ? std::clamp(t, 0.0, 1.0) : 0.0; };
    PadInput p = *this;
    p.left_stick = stick(left_stick);
    p.right_stick = stick(right_stick);
    p.left_trigger = trigger(left_trigger);
    p.right_trigger = trigger(right_trigger);
    p.dpad = dpad > 0 ? 1 : (dpad < 0 ? -1 : 0);
    return p;
}

double lob_angle_from_trigger(double t) {
    const double u = std::clamp((t - 0.01) / 0.99, 0.0, 1.0);
    return kMinLobAngle + u * (kMaxLobAngle - kMinLobAngle);
}

double kick_speed_from_trigger(double t) { return 5.0 + 30.0 * std::clamp(t, 0.0, 1.0); }

SkillGoal Intent::goal_for(FsmState s) const {
    switch (s) {
        case FsmState::move: return move;
        case FsmState::trap: return trap;
        case FsmState::dribble: return dribble;
        case FsmState::kick: return kick;
    }
    return move;
}

std::optional<int> pick_pass_target(const World& w, int me, Vec2 stick, std::span<const int> teammates) {
    const CharacterState& c = player(w, me);
    const CharacterFrame f = frame_of(c);
    // Stick up points along the character's facing.
    const Vec2 want = norm(stick) > 0.2 ? Vec2{stick.y, -stick.x} : Vec2{1.0, 0.0};
    std::optional<int> best;
    double best_angle = std::numeric_limits<double>::infinity();
    for (int id : teammates) {
        if (id == me) continue;
        const Vec2 rel = world_to_character(f, player(w, id).root_pos.xy(), VecKind::point);
        const double a = angle_between(rel, want);
        if (a < best_angle) {
            best_angle = a;
            best = id;
        }
    }
    return best;
}

void PadController::reset() { *this = PadController{}; }

Intent PadController::update(const PadInput& raw, const World& w, int me, FsmState state,
                             std::span<const int> teammates) {
    const PadInput p = raw.clamped();
    const CharacterState& c = player(w, me);
    Intent in;
    const Vec2 vel = p.left_stick * kMaxRunSpeed;
    Vec2 face = c.facing;
    if (norm(p.right_stick) > 0.2) {
        face = p.right_stick / norm(p.right_stick);
    } else if (norm(vel) > 0.1) {
        face = vel / norm(vel);
    }
    in.move = {vel, face};
    in.dribble = {vel};

    const bool can_pass = std::any_of(teammates.begin(), teammates.end(), [&](int id) { return id != me; });
    const bool lt_held = p.left_trigger > 0.01;
    const bool lt_rise = lt_held && last_left_trigger_ <= 0.01;
    switch (state) {
        case FsmState::move:
        case FsmState::trap:
            pass_mode_ = false;
            ground_pass_ = false;
            in.edges.trap_start = state == FsmState::move && p.left_bumper;
            in.edges.trap_end = state == FsmState::trap && p.b;
            break;
        case FsmState::dribble:
            if (can_pass && lt_held) {
                if (lt_rise) {
                    in.edges.kick_start = true;
                    pass_mode_ = true;
                    ground_pass_ = false;
                }
                if (p.right_bumper) ground_pass_ = !ground_pass_;
            } else if (lt_rise || p.right_bumper) {
                in.edges.kick_start = true;
                pass_mode_ = false;
            }
            if (in.edges.kick_start) kick_dir_ = c.facing;
            break;
        case FsmState::kick:
            in.edges.kick_end = p.b;
            if (pass_mode_ && p.right_bumper) ground_pass_ = !ground_pass_;
            break;
    }
    if (pass_mode_ && can_pass) pass_target_ = pick_pass_target(w, me, p.right_stick, teammates);

    const Vec3 ball = w.ball ? w.ball->pos : lift(c.root_pos.xy() + c.facing * 0.4, BallState{}.radius);
    if (pass_mode_ && pass_target_) {
        in.pass_target = pass_target_;
        in.pass_kind = ground_pass_ ? PassKind::ground : PassKind::lob;
        in.pass_phi = lob_angle_from_trigger(p.left_trigger);
        const Vec2 landing = player(w, *pass_target_).root_pos.xy();
        if (norm(landing - ball.xy()) > 0.5) {
            in.kick = {solve_pass({in.pass_kind, ball, landing, in.pass_phi})};
        }
    }
    if (!in.pass_target) {
        // Right stick: x turns the kick up to 45 degrees either way, y raises it.
        const double yaw = -p.right_stick.x * kPi / 4.0;
        const double pitch = std::max(0.0, p.right_stick.y) * kPi / 4.0;
        const Vec2 h = rotate(direction_from_angle(yaw), kick_dir_);
        in.kick = {lift(h * std::cos(pitch), std::sin(pitch)) * kick_speed_from_trigger(p.right_trigger)};
    }
    last_left_trigger_ = p.left_trigger;
    return in;
}

// ---------------------------------------------------------------------------
// Scenario base.

void ScenarioConfig::validate() const {
    if (team_size < 1 || team_size > 11) throw Error("team size must be in [1, 11]");
    if (!(time_limit > 0.0)) throw Error("time limit must be positive");
    if (!(launch_interval > 0.0)) throw Error("launch interval must be positive");
    if (!(teammate_run_speed > 0.0) || !(give_and_go_opponent_speed > 0.0) || !(chase.speed > 0.0)) {
        throw Error("scenario speeds must be positive");
    }
    if (!(shoot_distance > 0.0)) throw Error("shoot distance must be positive");
    if (!formation_anchors.empty() && static_cast<int>(formation_anchors.size()) != team_size) {
        throw Error("formation anchors must match the team size");
    }
    sim.validate();
    reward.validate();
}

Scenario::Scenario(const ScenarioConfig& cfg, const PolicySet& policies)
    : cfg_(cfg), policies_(policies), rng_(cfg.seed), ctx_{cfg.sim, cfg.motion} {
    cfg_.validate();
    world_.rng = rng_.fork();
}

int Scenario::add_agent(TeamSide side, std::string role, CharacterState c, FsmState initial) {
    const int id = static_cast<int>(agents_.size());
    refresh_body_points(c);
    world_.players.push_back(c);
    Agent a{id, side, std::move(role), PlayerFsm(id, initial), {}, {}, false};
    agents_.push_back(std::move(a));
    entered_.push_back(tick_);
    commands_.resize(agents_.size());
    return id;
}

std::vector<int> Scenario::team(TeamSide s) const {
    std::vector<int> ids;
    for (const Agent& a : agents_) {
        if (a.side == s) ids.push_back(a.id);
    }
    return ids;
}

std::vector<FsmState> Scenario::states() const {
    std::vector<FsmState> s;
    for (const Agent& a : agents_) s.push_back(a.fsm.state());
    return s;
}

void Scenario::note(std::string kind, int player_id, std::string detail) {
    events_.push_back({tick_, std::move(kind), player_id, std::move(detail)});
}

void Scenario::complete(std::string detail) {
    if (completed_) return;
    completed_ = true;
    note("complete", controlled_, std::move(detail));
}

void Scenario::set_controlled(int id) {
    if (id == controlled_) return;
    controlled_ = id;
    pad_.reset();
    note("control", id);
}

void Scenario::restart(BallState ball, std::string detail) {
    world_.ball = ball;
    for (Agent& a : agents_) {
        a.fsm.reset(FsmState::move);
        a.pending_pass.reset();
        entered_[static_cast<std::size_t>(a.id)] = tick_;
    }
    note("restart", -1, std::move(detail));
}

TrapGoal Scenario::random_trap_goal(bool lob) {
    if (!lob) return {rng_.bernoulli(0.5) ? BodyPart::foot_r : BodyPart::foot_l};
    static constexpr BodyPart parts[] = {BodyPart::torso, BodyPart::lower_leg_l, BodyPart::lower_leg_r,
                                         BodyPart::foot_l, BodyPart::foot_r};
    return {parts[rng_.index(5)]};
}

Intent Scenario::idle_intent(int id) const {
    const CharacterState& c = world_.players[static_cast<std::size_t>(id)];
    Intent in;
    in.move = {{}, face_ball(world_, c)};
    in.dribble = {{}};
    in.kick = {lift(c.facing * 10.0)};
    return in;
}

TrajectoryHeader Scenario::header(std::uint64_t config_hash) const {
    TrajectoryHeader h;
    h.config_hash = config_hash;
    h.seed = cfg_.seed;
    h.source = "scenario:" + cfg_.id;
    h.dt_control = cfg_.sim.dt_control();
    h.modules = {{"footsim", "1"}};
    for (const Agent& a : agents_) {
        h.labels["player." + std::to_string(a.id)] =
            std::string(a.side == TeamSide::home ? "home" : "away") + ":" + a.role;
    }
    h.labels["controlled"] = std::to_string(controlled_);
    return h;
}

void Scenario::step(const PadInput* pad) {
    events_.clear();
    const std::size_t n = agents_.size();
    const TeamSide my_side = agents_[static_cast<std::size_t>(controlled_)].side;
    std::vector<int> mates = team(my_side);

    std::optional<Intent> pad_intent;
    if (pad != nullptr) {
        const FsmState s = agents_[static_cast<std::size_t>(controlled_)].fsm.state();
        if (s == FsmState::move && (pad->dpad != 0 || pad->y) && mates.size() > 1) {
            SwitchRequest req;
            req.cycle = pad->clamped().dpad;
            req.closest = pad->y;
            set_controlled(switch_control(world_, mates, states(), controlled_, req));
        }
        const FsmState now = agents_[static_cast<std::size_t>(controlled_)].fsm.state();
        pad_intent = pad_.update(*pad, world_, controlled_, now, mates);
        if (pad_intent->edges.trap_start) {
            const bool lob = world_.ball && world_.ball->pos.z > 0.5;
            agents_[static_cast<std::size_t>(controlled_)].trap_goal = random_trap_goal(lob);
        }
    }

    intents_.assign(n, Intent{});
    for (std::size_t i = 0; i < n; ++i) intents_[i] = idle_intent(static_cast<int>(i));
    plan(intents_, pad_intent);
    // Scripted players give up a kick that has not connected in 3 s.
    const int kick_limit = static_cast<int>(std::lround(3.0 / cfg_.sim.dt_control()));
    for (const Agent& a : agents_) {
        if ((pad_intent && a.id == controlled_) || a.fsm.state() != FsmState::kick) continue;
        if (ticks_in_state(a.id) >= kick_limit) intents_[static_cast<std::size_t>(a.id)].edges.kick_end = true;
    }
    for (const auto& [from, to] : released_) {
        intents_[static_cast<std::size_t>(to)].edges.trap_start = true;
    }
    released_.clear();
    for (std::size_t i = 0; i < n; ++i) intents_[i].trap = agents_[i].trap_goal;

    ++tick_;
    std::vector<TransitionRecord> transitions;
    for (Agent& a : agents_) {
        const auto i = static_cast<std::size_t>(a.id);
        if (a.move_only || (tick_ < a.hold_move_until && a.fsm.state() == FsmState::move)) continue;
        const auto t = a.fsm.update(intents_[i].edges, fsm_predicates(world_, a.id, world_.events), tick_);
        if (!t) continue;
        transitions.push_back(*t);
        entered_[i] = tick_;
        a.collided_in_state = false;
        a.pending_pass = t->to == FsmState::kick ? intents_[i].pass_target : std::nullopt;
    }

    std::vector<Latent> latents(n);
    std::vector<SkillGoal> goals;
    goals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FsmState s = agents_[i].fsm.state();
        goals.push_back(intents_[i].goal_for(s));
        latents[i] = act(policies_[skill_of(s)], world_.players[i], world_.ball ? &*world_.ball : nullptr, goals[i], ctx_);
        commands_[i] = decode(latents[i], cfg_.motion);
    }
    step_control(world_, cfg_.sim, commands_);

    std::vector<bool> touched(n, false);
    for (const CollisionEvent& e : world_.events) {
        if (e.player >= 0 && e.kind != CollisionKind::ground) touched[static_cast<std::size_t>(e.player)] = true;
    }
    for (Agent& a : agents_) {
        const auto i = static_cast<std::size_t>(a.id);
        if (!touched[i]) continue;
        a.collided_in_state = true;
        if (a.fsm.state() == FsmState::kick && a.pending_pass) {
            released_.emplace_back(a.id, *a.pending_pass);
            note("pass", a.id, std::to_string(*a.pending_pass));
            a.pending_pass.reset();
            a.hold_move_until = tick_ + static_cast<std::uint64_t>(std::lround(1.0 / cfg_.sim.dt_control()));
        }
    }

    frame_ = TrajectoryFrame{};
    frame_.tick = tick_;
    frame_.ball = world_.ball;
    frame_.events = world_.events;
    frame_.transitions = std::move(transitions);
    for (std::size_t i = 0; i < n; ++i) {
        PlayerFrame p;
        p.id = static_cast<int>(i);
        p.character = world_.players[i];
        p.fsm = agents_[i].fsm.state();
        p.goal = goals[i];
        p.latent = latents[i];
        if (world_.ball || std::holds_alternative<MoveGoal>(goals[i])) {
            score_player(p, world_.ball, goals[i], agents_[i].collided_in_state, cfg_.reward);
        }
        frame_.players.push_back(std::move(p));
    }
    after_step();
}

// ---------------------------------------------------------------------------
// Scenarios.

namespace {

bool ball_in_play(const BallState& b) {
    return std::abs(b.pos.x) <= kFieldLength / 2.0 && std::abs(b.pos.y) <= kFieldWidth / 2.0;
}

/// Side whose attacked goal the ball entered, if any.
std::optional<TeamSide> goal_scored(const BallState& b) {
    if (std::abs(b.pos.x) <= kFieldLength / 2.0) return std::nullopt;
    if (std::abs(b.pos.y) > kGoalWidth / 2.0 || b.pos.z > kGoalHeight) return std::nullopt;
    return b.pos.x > 0.0 ? TeamSide::home : TeamSide::away;
}

BallState resting_ball(Vec2 p) {
    BallState b;
    b.pos = lift(p, b.radius);
    return b;
}

KickGoal shot_at(const CharacterState& c, TeamSide side, double speed, double pitch, double aim_y = 0.0) {
    const Vec2 goal{attacked_goal(side).x, aim_y};
    const Vec2 h = normalized_or(goal - c.root_pos.xy(), c.facing);
    return {lift(h * std::cos(pitch), std::sin(pitch)) * speed};
}

KickGoal pass_kick(const World& w, Vec2 landing, PassKind kind, double phi, const CharacterState& c) {
    const Vec3 from = w.ball->pos;
    if (norm(landing - from.xy()) < 0.5) return {lift(c.facing * 5.0)};
    return {solve_pass({kind, lift(from.xy(), std::max(from.z, BallState{}.radius)), landing, phi})};
}

/// Shared ball-carrier behavior for scripted and AI players.
void carry(Intent& in, const CharacterState& c, TeamSide side, double speed, double shoot_distance,
           bool may_shoot, double shot_speed, double pitch) {
    const Vec2 goal = attacked_goal(side);
    const Vec2 dir = normalized_or(goal - c.root_pos.xy(), {attack_sign(side), 0.0});
    in.dribble = {dir * speed};
    in.kick = shot_at(c, side, shot_speed, pitch);
    if (may_shoot && norm(goal - c.root_pos.xy()) < shoot_distance) in.edges.kick_start = true;
}

// One user-controlled player dribbling, shooting and chasing the ball.
class SingleScenario : public Scenario {
public:
    SingleScenario(const ScenarioConfig& cfg, const PolicySet& p) : Scenario(cfg, p) {
        add_agent(TeamSide::home, "player", rest_pose({0.0, 0.0}));
        world_.ball = resting_ball({1.0, 0.0});
        new_plan();
    }

protected:
    void plan(std::vector<Intent>& in, const std::optional<Intent>& pad) override {
        if (pad) {
            in[0] = *pad;
            return;
        }
        const CharacterState& c = world_.players[0];
        Intent& me = in[0];
        me.move = intercept_goal(world_, 0, cfg_.chase);
        me.dribble = {dribble_vel_};
        me.kick = kick_;
        if (agents_[0].fsm.state() == FsmState::dribble && ticks_in_state(0) >= dribble_ticks_) {
            me.edges.kick_start = true;
            const Vec2 h = rotate(direction_from_angle(kick_yaw_), c.facing);
            kick_ = {lift(h * std::cos(kick_pitch_), std::sin(kick_pitch_)) * kick_speed_};
            me.kick = kick_;
        }
    }

    void after_step() override {
        for (const TransitionRecord& t : frame().transitions) {
            if (t.from == FsmState::kick) new_plan();
        }
        if (!ball_in_play(*world_.ball)) restart(resting_ball(world_.players[0].root_pos.xy() + world_.players[0].facing), "out");
    }

private:
    void new_plan() {
        dribble_vel_ = rng_.unit_circle() * rng_.uniform(1.0, 5.0);
        dribble_ticks_ = static_cast<int>(rng_.uniform(2.0, 4.0) / cfg_.sim.dt_control());
        kick_yaw_ = rng_.uniform(-kPi / 4.0, kPi / 4.0);
        kick_pitch_ = rng_.uniform(0.0, deg_to_rad(30.0));
        kick_speed_ = rng_.uniform(8.0, 18.0);
    }

    Vec2 dribble_vel_;
    int dribble_ticks_{90};
    double kick_yaw_{0.0}, kick_pitch_{0.0}, kick_speed_{10.0};
    KickGoal kick_{{10.0, 0.0, 0.0}};
};

// Controlled player passes to a running teammate, runs on, receives a
// ground pass back and shoots.
class GiveAndGoScenario : public Scenario {
public:
    enum class Phase { dribble_out, first_pass, teammate_receive, return_pass, user_receive, shot };

    GiveAndGoScenario(const ScenarioConfig& cfg, const PolicySet& p) : Scenario(cfg, p) {
        const Vec2 start{-25.0 + rng_.uniform(-2.0, 2.0), -8.0 + rng_.uniform(-2.0, 2.0)};
        user_ = add_agent(TeamSide::home, "user", rest_pose(start), FsmState::dribble);
        mate_ = add_agent(TeamSide::home, "teammate", rest_pose({start.x + rng_.uniform(3.0, 7.0), 8.0 + rng_.uniform(-2.0, 2.0)}));
        interceptor_ = add_agent(TeamSide::away, "interceptor", rest_pose({12.0, 0.0}, {-1.0, 0.0}));
        cover_ = add_agent(TeamSide::away, "cover", rest_pose({20.0, 6.0}, {-1.0, 0.0}));
        agents_[static_cast<std::size_t>(interceptor_)].move_only = true;
        agents_[static_cast<std::size_t>(cover_)].move_only = true;
        world_.ball = resting_ball(start + Vec2{0.45, strike_station(Side::right).y});
        pass_after_ = static_cast<int>(rng_.uniform(1.0, 2.0) / cfg_.sim.dt_control());
        first_kind_ = rng_.bernoulli(0.5) ? PassKind::lob : PassKind::ground;
        first_phi_ = deg_to_rad(rng_.uniform(15.0, 35.0));
        return_after_ = static_cast<int>(rng_.uniform(0.7, 1.3) / cfg_.sim.dt_control());
        shoot_after_ = static_cast<int>(rng_.uniform(0.4, 0.8) / cfg_.sim.dt_control());
        agents_[static_cast<std::size_t>(user_)].trap_goal = random_trap_goal(false);
        agents_[static_cast<std::size_t>(mate_)].trap_goal = random_trap_goal(false);
    }

    Phase phase() const { return phase_; }

protected:
    void plan(std::vector<Intent>& in, const std::optional<Intent>& pad) override {
        const World& w = world_;
        const CharacterState& user = w.players[static_cast<std::size_t>(user_)];
        const CharacterState& mate = w.players[static_cast<std::size_t>(mate_)];
        const FsmState us = agents_[static_cast<std::size_t>(user_)].fsm.state();
        const FsmState ms = agents_[static_cast<std::size_t>(mate_)].fsm.state();
        const Vec2 fwd{1.0, 0.0};

        // User.
        Intent& u = in[static_cast<std::size_t>(user_)];
        if (pad) {
            u = *pad;
        } else {
            // After the first pass the user runs on to a spot ahead of the teammate.
            const Vec2 run_to{std::min(mate.root_pos.x + 10.0, 30.0), user.root_pos.y};
            u.move = phase_ == Phase::dribble_out || phase_ == Phase::user_receive || phase_ == Phase::shot
                         ? intercept_goal(w, user_, cfg_.chase)
                         : seek_goal(user, run_to, fwd, 5.0);
            u.dribble = {fwd * 3.0};
            u.kick = shot_at(user, TeamSide::home, 22.0, deg_to_rad(8.0));
            if (phase_ == Phase::dribble_out && us == FsmState::dribble &&
                ticks_in_state(user_) >= pass_after_) {
                u.edges.kick_start = true;
                u.pass_target = mate_;
                phase_ = Phase::first_pass;
            }
            if (phase_ == Phase::first_pass) {
                u.pass_target = mate_;
                u.kick = pass_kick(w, mate.root_pos.xy(), first_kind_, first_phi_, user);
            }
            if ((phase_ == Phase::user_receive || phase_ == Phase::shot) && us == FsmState::dribble &&
                ticks_in_state(user_) >= shoot_after_) {
                u.edges.kick_start = true;
                phase_ = Phase::shot;
            }
        }

        // Teammate.
        Intent& m = in[static_cast<std::size_t>(mate_)];
        const bool mate_has_ball = phase_ == Phase::teammate_receive || phase_ == Phase::return_pass;
        const Vec2 mate_run{std::min(mate.root_pos.x + 10.0, 35.0), mate.root_pos.y};
        m.move = mate_has_ball ? intercept_goal(w, mate_, cfg_.chase)
                               : seek_goal(mate, mate_run, fwd, cfg_.teammate_run_speed);
        const double gap = user.root_pos.x - mate.root_pos.x;
        m.dribble = {fwd * std::clamp(gap, 2.0, 3.0)};
        const Vec2 ahead = user.root_pos.xy() + normalized_or(user.root_vel.xy(), fwd, 0.2);
        m.kick = pass_kick(w, ahead, PassKind::ground, deg_to_rad(20.0), mate);
        if (mate_has_ball) m.pass_target = user_;
        if (phase_ == Phase::teammate_receive && ms == FsmState::dribble && ticks_in_state(mate_) >= return_after_) {
            m.edges.kick_start = true;
            phase_ = Phase::return_pass;
        }

        // Whoever the play is not with keeps running instead of taking the ball.
        const bool mate_phase = phase_ == Phase::first_pass || phase_ == Phase::teammate_receive ||
                                phase_ == Phase::return_pass;
        Agent& off_ball = agents_[static_cast<std::size_t>(mate_phase ? user_ : mate_)];
        if (!pad || off_ball.id != user_) off_ball.hold_move_until = std::max(off_ball.hold_move_until, tick_ + 2);

        // Opponents.
        ChaseConfig slow = cfg_.chase;
        slow.speed = cfg_.give_and_go_opponent_speed;
        // The interceptor presses the ball but stops short of it.
        const CharacterState& ic = w.players[static_cast<std::size_t>(interceptor_)];
        const Vec2 cp = chase_point(*w.ball, slow.lead_time);
        const Vec2 press = cp - normalized_or(cp - ic.root_pos.xy(), {-1.0, 0.0}, 1e-6) * kPressStandoff;
        in[static_cast<std::size_t>(interceptor_)].move = seek_goal(ic, press, face_ball(w, ic), slow.speed);
        const Vec2 lead = w.ball->pos.x > mate.root_pos.x ? w.ball->pos.xy() : mate.root_pos.xy();
        in[static_cast<std::size_t>(cover_)].move =
            run_at(w.players[static_cast<std::size_t>(cover_)], lead + fwd * 8.0,
                   face_ball(w, w.players[static_cast<std::size_t>(cover_)]), slow.speed);
        for (int o : {interceptor_, cover_}) {
            const CharacterState& c = w.players[static_cast<std::size_t>(o)];
            in[static_cast<std::size_t>(o)].dribble = {
                normalized_or(attacked_goal(TeamSide::away) - c.root_pos.xy(), {-1.0, 0.0}) * 3.0};
        }
    }

    void after_step() override {
        for (const auto& [from, to] : released_) {
            if (from == user_ && phase_ == Phase::first_pass) phase_ = Phase::teammate_receive;
            if (from == mate_ && phase_ == Phase::return_pass) phase_ = Phase::user_receive;
        }
        for (const TransitionRecord& t : frame().transitions) {
            // Kicks that never touched the ball fall back to recovering it.
            if (t.from == FsmState::kick && t.trigger != TransitionTrigger::collision) {
                // Includes kick_end, which returns the kicker to Dribble.

                if (t.player == user_ && phase_ == Phase::first_pass) phase_ = Phase::dribble_out;
                if (t.player == mate_ && phase_ == Phase::return_pass) phase_ = Phase::teammate_receive;
            }
            if (t.player == user_ && t.from == FsmState::kick && t.trigger == TransitionTrigger::collision &&
                phase_ == Phase::shot) {
                shot_done_ = true;
            }
            if (t.player == user_ && t.from == FsmState::kick && t.trigger != TransitionTrigger::collision &&
                phase_ == Phase::shot) {
                phase_ = Phase::user_receive;
            }
        }
        if (shot_done_) {
            // The scripted pair must have left their ball skills.
            const bool settled = std::all_of(agents_.begin(), agents_.begin() + 2, [](const Agent& a) {
                return a.fsm.state() == FsmState::move || a.fsm.state() == FsmState::kick;
            });
            if (settled) complete("give-and-go");
        }
    }

private:
    static constexpr double kPressStandoff = 1.5;
    int user_{0}, mate_{1}, interceptor_{2}, cover_{3};
    Phase phase_{Phase::dribble_out};
    int pass_after_{45}, return_after_{30}, shoot_after_{15};
    PassKind first_kind_{PassKind::lob};
    double first_phi_{deg_to_rad(25.0)};
    bool shot_done_{false};
};

// Balls launched at intervals; the controlled player and one opponent both
// try to trap, then dribble at the other's goal.
class CompetitiveScenario : public Scenario {
public:
    CompetitiveScenario(const ScenarioConfig& cfg, const PolicySet& p) : Scenario(cfg, p) {
        add_agent(TeamSide::home, "user", rest_pose({-4.0, 0.0}));
        add_agent(TeamSide::away, "opponent", rest_pose({4.0, 0.0}, {-1.0, 0.0}));
        world_.ball = resting_ball({0.0, 20.0});
        interval_ = std::max(1, static_cast<int>(std::lround(cfg_.launch_interval / cfg_.sim.dt_control())));
    }

protected:
    void plan(std::vector<Intent>& in, const std::optional<Intent>& pad) override {
        const bool launch = (tick_ % static_cast<std::uint64_t>(interval_)) == 0;
        if (launch) {
            const CharacterState target = rest_pose({rng_.uniform(-3.0, 3.0), rng_.uniform(-3.0, 3.0)},
                                                    rng_.unit_circle());
            const bool lob = rng_.bernoulli(0.5);
            const PassInit pass = lob ? init_lob_pass(target, rng_, cfg_.sim) : init_ground_pass(target, rng_, cfg_.sim);
            world_.ball = pass.ball;
            for (Agent& a : agents_) {
                a.fsm.reset(FsmState::move);
                a.trap_goal = random_trap_goal(lob);
            }
            note("launch", -1, std::string(to_string(pass.kind)));
        }
        for (const Agent& a : agents_) {
            const auto i = static_cast<std::size_t>(a.id);
            Intent& it = in[i];
            const CharacterState& c = world_.players[i];
            if (a.id == controlled_ && pad) {
                it = *pad;
            } else {
                it.move = a.id == controlled_ ? intercept_goal(world_, a.id, cfg_.chase)
                                              : opponent_chase_goal(world_, a.id, controlled_, cfg_.chase);
                carry(it, c, a.side, kMaxRunSpeed, cfg_.shoot_distance, a.fsm.state() == FsmState::dribble,
                      20.0, deg_to_rad(10.0));
            }
            if (launch) it.edges.trap_start = true;
        }
    }

    void after_step() override {
        const BallState& b = *world_.ball;
        if (const auto side = goal_scored(b)) {
            note("goal", -1, side == TeamSide::home ? "home" : "away");
            restart(resting_ball({0.0, 20.0}), "goal");
        } else if (!ball_in_play(b)) {
            restart(resting_ball({0.0, 20.0}), "out");
        }
    }

private:
    int interval_{240};
};

// N against N in formation with player switching on the home side.
class MatchScenario : public Scenario {
public:
    MatchScenario(const ScenarioConfig& cfg, const PolicySet& p) : Scenario(cfg, p) {
        spec_ = FormationSpec::standard(cfg_.team_size);
        if (!cfg_.formation_anchors.empty()) spec_.anchors = cfg_.formation_anchors;
        spec_.shift_gain = cfg_.formation_shift_gain;
        spec_.validate();
        const auto home = formation_positions(spec_, TeamSide::home, {});
        const auto away = formation_positions(spec_, TeamSide::away, {});
        for (std::size_t i = 0; i < spec_.size(); ++i) add_agent(TeamSide::home, spec_.roles[i], rest_pose(home[i]));
        for (std::size_t i = 0; i < spec_.size(); ++i) {
            add_agent(TeamSide::away, spec_.roles[i], rest_pose(away[i], {-1.0, 0.0}));
        }
        world_.ball = resting_ball({0.0, 0.0});
        const auto mates = team(TeamSide::home);
        controlled_ = switch_control(world_, mates, states(), 0, {std::nullopt, 0, true});
    }

protected:
    void plan(std::vector<Intent>& in, const std::optional<Intent>& pad) override {
        const auto home = team(TeamSide::home);
        const auto away = team(TeamSide::away);
        const FormationOrders ho = formation_targets(spec_, world_, home, TeamSide::home, false, cfg_.chase);
        const FormationOrders ao = formation_targets(spec_, world_, away, TeamSide::away, true, cfg_.chase);
        for (std::size_t k = 0; k < home.size(); ++k) in[static_cast<std::size_t>(home[k])].move = ho.goals[k];
        for (std::size_t k = 0; k < away.size(); ++k) in[static_cast<std::size_t>(away[k])].move = ao.goals[k];
        for (const Agent& a : agents_) {
            const auto i = static_cast<std::size_t>(a.id);
            carry(in[i], world_.players[i], a.side, 5.0, cfg_.shoot_distance,
                  a.side == TeamSide::away && a.fsm.state() == FsmState::dribble, 20.0, deg_to_rad(8.0));
        }

        auto& me = in[static_cast<std::size_t>(controlled_)];
        if (pad) {
            me = *pad;
            return;
        }
        // Script for the controlled player: recover loose balls, carry,
        // pass ahead after a while, shoot when close.
        const Agent& a = agents_[static_cast<std::size_t>(controlled_)];
        const CharacterState& c = world_.players[static_cast<std::size_t>(controlled_)];
        const bool nobody_home_has_it = std::none_of(home.begin(), home.end(), [&](int id) {
            const FsmState s = agents_[static_cast<std::size_t>(id)].fsm.state();
            return s == FsmState::dribble || s == FsmState::trap;
        });
        if (nobody_home_has_it) me.move = intercept_goal(world_, controlled_, cfg_.chase);
        if (a.fsm.state() == FsmState::kick && pass_) {
            me.pass_target = pass_;
            me.kick = pass_kick(world_, world_.players[static_cast<std::size_t>(*pass_)].root_pos.xy(), PassKind::lob,
                                deg_to_rad(25.0), c);
        }
        if (a.fsm.state() != FsmState::dribble) return;
        const double to_goal = norm(attacked_goal(TeamSide::home) - c.root_pos.xy());
        if (to_goal < cfg_.shoot_distance) {
            me.edges.kick_start = true;
            pass_.reset();
        } else if (ticks_in_state(controlled_) >= static_cast<int>(3.0 / cfg_.sim.dt_control()) && home.size() > 1) {
            const auto target = pick_pass_target(world_, controlled_, {}, home);
            if (target && norm(world_.players[static_cast<std::size_t>(*target)].root_pos.xy() - c.root_pos.xy()) > 5.0) {
                me.edges.kick_start = true;
                me.pass_target = target;
                pass_ = target;
                me.kick = pass_kick(world_, world_.players[static_cast<std::size_t>(*target)].root_pos.xy(),
                                    PassKind::lob, deg_to_rad(25.0), c);
            }
        }
    }

    void after_step() override {
        const auto home = team(TeamSide::home);
        for (const auto& [from, to] : released_) {
            if (agents_[static_cast<std::size_t>(from)].side == TeamSide::home) {
                set_controlled(switch_control(world_, home, states(), controlled_, {to, 0, false}));
                const auto i = static_cast<std::size_t>(to);
                agents_[i].trap_goal = random_trap_goal(world_.ball->vel.z > 1.0);
                pass_.reset();
            }
        }
        if (released_.empty()) set_controlled(switch_control(world_, home, states(), controlled_, {}));
        const BallState& b = *world_.ball;
        if (const auto side = goal_scored(b)) {
            note("goal", -1, side == TeamSide::home ? "home" : "away");
            restart(resting_ball({0.0, 0.0}), "goal");
        } else if (!ball_in_play(b)) {
            const Vec2 p{std::clamp(b.pos.x, -kFieldLength / 2.0 + 1.0, kFieldLength / 2.0 - 1.0),
                         std::clamp(b.pos.y, -kFieldWidth / 2.0 + 1.0, kFieldWidth / 2.0 - 1.0)};
            restart(resting_ball(p), "out");
        }
    }

private:
    FormationSpec spec_;
    std::optional<int> pass_;
};

}  // namespace

const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids{"single", "give-and-go", "competitive", "match"};
    return ids;
}

std::unique_ptr<Scenario> make_scenario(const ScenarioConfig& cfg, const PolicySet& policies) {
    if (cfg.id == "single") return std::make_unique<SingleScenario>(cfg, policies);
    if (cfg.id == "give-and-go") return std::make_unique<GiveAndGoScenario>(cfg, policies);
    if (cfg.id == "competitive") return std::make_unique<CompetitiveScenario>(cfg, policies);
    if (cfg.id == "match") return std::make_unique<MatchScenario>(cfg, policies);
    std::string known;
    for (const auto& id : scenario_ids()) known += (known.empty() ? "" : ", ") + id;
    throw Error("unknown scenario '" + cfg.id + "' (known: " + known + ")");
}

}  // namespace footsim
