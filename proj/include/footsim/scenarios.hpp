#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "footsim/fsm.hpp"
#include "footsim/protocols.hpp"

namespace footsim {

// Field coordinates: x runs along the length with the home goal line at
// x = -52.5, y across the width. The home team attacks +x.
inline constexpr double kFieldLength = 105.0;
inline constexpr double kFieldWidth = 68.0;
inline constexpr double kGoalWidth = 7.32;
inline constexpr double kGoalHeight = 2.44;
inline constexpr double kMaxRunSpeed = 7.0;

enum class TeamSide : std::uint8_t { home, away };
/// +1 for home (attacks +x), -1 for away.
constexpr double attack_sign(TeamSide s) { return s == TeamSide::home ? 1.0 : -1.0; }
/// Center of the goal the side attacks.
constexpr Vec2 attacked_goal(TeamSide s) { return {attack_sign(s) * kFieldLength / 2.0, 0.0}; }

// ---------------------------------------------------------------------------
// Passes.

inline constexpr double kMinLobAngle = deg_to_rad(0.45);
inline constexpr double kMaxLobAngle = deg_to_rad(45.0);
inline constexpr double kGroundPassElevation = deg_to_rad(3.0);

struct PassRequest {
    PassKind kind{PassKind::lob};
    Vec3 launch;
    Vec2 landing;
    /// Lob elevation; ignored for ground passes.
    double phi{kMaxLobAngle};
};

/// Kick velocity that carries the ball from `launch` to `landing` along a
/// drag-free parabola. Ground passes keep the lob's horizontal velocity and
/// lower the elevation to about 3 degrees.
Vec3 solve_pass(const PassRequest& req, double gravity = SimConfig{}.gravity);

// ---------------------------------------------------------------------------
// Player AI.

struct ChaseConfig {
    /// Lead of the chase point along the ball's motion, per m/s of ball speed.
    double lead_time{0.3};
    double speed{kMaxRunSpeed};
    /// Within this distance of the ball an opponent chases it; otherwise it
    /// runs at the controlled player.
    double engage_radius{10.0};
};

/// Ball position pushed ahead along its horizontal velocity.
Vec2 chase_point(const BallState& ball, double lead_time);

/// Competitive opponent: chase the ball when close, else the controlled player; always face the ball.
MoveGoal opponent_chase_goal(const World& w, int me, int controlled, const ChaseConfig& cfg = {});
/// Runs straight at the chase point; faces the ball.
MoveGoal intercept_goal(const World& w, int me, const ChaseConfig& cfg = {});
/// Runs to `target`, slowing within a few meters.
MoveGoal seek_goal(const CharacterState& c, Vec2 target, Vec2 face, double max_speed = kMaxRunSpeed);

// ---------------------------------------------------------------------------
// Formation.

struct FormationSpec {
    std::string shape{"4-3-1-2"};
    /// Targets for the home side with the ball on the halfway line. The
    /// away side mirrors them through the halfway line.
    std::vector<Vec2> anchors;
    std::vector<std::string> roles;
    /// Shift of every target along x per meter of ball x.
    double shift_gain{0.3};
    double chase_ball_radius{10.0};
    double chase_target_radius{15.0};

    /// Goalkeeper plus 4-3-1-2 for 11 players; smaller teams keep the
    /// goalkeeper and then the roles in order striker, center back,
    /// striker, center back, attacking mid, ...
    static FormationSpec standard(int players);
    std::size_t size() const { return anchors.size(); }
    void validate() const;
};

/// Formation targets for one side given the ball position, clamped on field.
std::vector<Vec2> formation_positions(const FormationSpec& spec, TeamSide side, Vec2 ball);

/// Player (world index) sent after the ball: the closest to the ball among
/// those within the chase radius of the ball and of their own target, else
/// the closest overall.
int formation_chaser(const FormationSpec& spec, const World& w, std::span<const int> team,
                     std::span<const Vec2> targets);

struct FormationOrders {
    std::vector<Vec2> targets;
    std::vector<MoveGoal> goals;
    /// World index of the chaser, or -1 when `chase` was false.
    int chaser{-1};
};

/// Move goals for a side. With `chase`, one player intercepts the ball and
/// the rest face along their run; without it everyone faces the ball.
FormationOrders formation_targets(const FormationSpec& spec, const World& w, std::span<const int> team,
                                  TeamSide side, bool chase, const ChaseConfig& cc = {});

// ---------------------------------------------------------------------------
// Control switching.

struct SwitchRequest {
    /// Set on the tick a pass to this player leaves the passer's foot.
    std::optional<int> pass_target;
    /// Directional pad: +1 next player, -1 previous.
    int cycle{0};
    /// Give control to the teammate closest to the ball.
    bool closest{false};
};

/// Controlled player after applying the switching rules in order: pass
/// release, teammates in Dribble or Trap, the closest button, then cycling.
int switch_control(const World& w, std::span<const int> team, std::span<const FsmState> states, int current,
                   const SwitchRequest& req);

// ---------------------------------------------------------------------------
// Gamepad.

/// One sample of the user's gamepad. Sticks lie in the unit disc and
/// triggers in [0, 1]; buttons are press edges.
struct PadInput {
    Vec2 left_stick;
    Vec2 right_stick;
    double left_trigger{0.0};
    double right_trigger{0.0};
    bool left_bumper{false};
    bool right_bumper{false};
    bool b{false};
    bool y{false};
    int dpad{0};

    /// Copy with sticks clipped to the unit disc and triggers to [0, 1].
    PadInput clamped() const;
};

/// Lob elevation for a held left trigger, mapping (0.01, 1] onto (0.45, 45] degrees.
double lob_angle_from_trigger(double t);
double kick_speed_from_trigger(double t);

/// What a player asks of the FSM and the policies this tick.
struct Intent {
    CommandSet edges;
    MoveGoal move;
    DribbleGoal dribble;
    TrapGoal trap;
    KickGoal kick;
    /// Teammate the kick is aimed at, when the kick is a pass.
    std::optional<int> pass_target;
    PassKind pass_kind{PassKind::lob};
    double pass_phi{deg_to_rad(25.0)};

    SkillGoal goal_for(FsmState s) const;
};

/// Translates gamepad samples into intents for the controlled player.
class PadController {
public:
    /// Intent for player `me` in state `state`. `teammates` enables passing.
    Intent update(const PadInput& pad, const World& w, int me, FsmState state, std::span<const int> teammates);
    void reset();

private:
    double last_left_trigger_{0.0};
    bool ground_pass_{false};
    bool pass_mode_{false};
    std::optional<int> pass_target_;
    Vec2 kick_dir_{1.0, 0.0};
};

/// Teammate closest to the stick direction, measured in the controlled
/// player's character frame.
std::optional<int> pick_pass_target(const World& w, int me, Vec2 stick, std::span<const int> teammates);

// ---------------------------------------------------------------------------
// Scenarios.

struct ScenarioConfig {
    std::string id{"give-and-go"};
    std::uint64_t seed{1};
    /// Players per side in the match scenario.
    int team_size{3};
    /// Overrides the standard formation anchors when non-empty.
    std::vector<Vec2> formation_anchors;
    double formation_shift_gain{0.3};
    ChaseConfig chase;
    /// Give-and-go opponents run slower than the competitive chaser.
    double give_and_go_opponent_speed{4.0};
    double teammate_run_speed{3.5};
    double shoot_distance{15.0};
    /// Seconds between ball launches in the competitive scenario.
    double launch_interval{8.0};
    /// Scenario time limit in seconds.
    double time_limit{60.0};
    SimConfig sim;
    MotionConfig motion;
    RewardConfig reward;

    void validate() const;
};

struct Agent {
    int id{0};
    TeamSide side{TeamSide::home};
    std::string role;
    PlayerFsm fsm;
    TrapGoal trap_goal;
    /// Pass target recorded when this player's kick started.
    std::optional<int> pending_pass;
    bool collided_in_state{false};
    /// Stays in Move: the player runs and blocks but never takes the ball.
    bool move_only{false};
    /// A passer stays in Move until this tick instead of chasing its own pass.
    std::uint64_t hold_move_until{0};
};

/// Scenario-level happening, reported alongside FSM transitions.
struct ScenarioEvent {
    std::uint64_t tick{0};
    std::string kind;  // pass, control, goal, restart, launch, complete
    int player{-1};
    std::string detail;
};

class Scenario {
public:
    Scenario(const ScenarioConfig& cfg, const PolicySet& policies);
    virtual ~Scenario() = default;
    Scenario(const Scenario&) = delete;
    Scenario& operator=(const Scenario&) = delete;

    /// Advances one control tick. `pad` drives the controlled player; when it
    /// is null the scenario's own script plays for the user.
    void step(const PadInput* pad = nullptr);

    const World& world() const { return world_; }
    const std::vector<Agent>& agents() const { return agents_; }
    int controlled() const { return controlled_; }
    std::uint64_t tick() const { return tick_; }
    double time() const { return static_cast<double>(tick_) * cfg_.sim.dt_control(); }
    const ScenarioConfig& config() const { return cfg_; }
    std::string_view id() const { return cfg_.id; }
    /// True when the script completed or the time limit passed.
    bool finished() const { return completed_ || time() >= cfg_.time_limit; }
    bool completed() const { return completed_; }

    /// Frame of the most recent tick.
    const TrajectoryFrame& frame() const { return frame_; }
    const std::vector<ScenarioEvent>& events() const { return events_; }
    TrajectoryHeader header(std::uint64_t config_hash = 0) const;

    std::vector<int> team(TeamSide s) const;
    std::vector<FsmState> states() const;

protected:
    /// Fills one intent per agent. `pad_intent` is set when a user pad drives the controlled player.
    virtual void plan(std::vector<Intent>& intents, const std::optional<Intent>& pad_intent) = 0;
    virtual void after_step() {}

    int add_agent(TeamSide side, std::string role, CharacterState c, FsmState initial = FsmState::move);
    void note(std::string kind, int player, std::string detail = {});
    void complete(std::string detail);
    void set_controlled(int id);
    /// Puts the ball somewhere and resets every FSM to Move.
    void restart(BallState ball, std::string detail);
    /// Ticks the agent has spent in its current FSM state.
    int ticks_in_state(int id) const { return static_cast<int>(tick_ - entered_[id]); }
    /// Home-side intent fallback for uncontrolled players.
    Intent idle_intent(int id) const;
    TrapGoal random_trap_goal(bool lob);

    ScenarioConfig cfg_;
    PolicySet policies_;
    World world_;
    std::vector<Agent> agents_;
    Rng rng_;
    int controlled_{0};
    std::uint64_t tick_{0};
    /// Per-agent pass released this tick (passer id -> target).
    std::vector<std::pair<int, int>> released_;

private:
    void detect_releases(const std::vector<TransitionRecord>& transitions);

    ActContext ctx_;
    PadController pad_;
    std::vector<std::uint64_t> entered_;
    std::vector<GaitParams> commands_;
    std::vector<Intent> intents_;
    TrajectoryFrame frame_;
    std::vector<ScenarioEvent> events_;
    bool completed_{false};
};

/// Scenario ids: single, give-and-go, competitive, match.
const std::vector<std::string>& scenario_ids();
std::unique_ptr<Scenario> make_scenario(const ScenarioConfig& cfg, const PolicySet& policies = {});

}  // namespace footsim
