#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "footsim/episodes.hpp"
#include "footsim/goals.hpp"
#include "footsim/motion.hpp"
#include "footsim/rewards.hpp"
#include "footsim/sim.hpp"

namespace footsim {

enum class PolicyKind : std::uint8_t { analytic, parametric };
std::string_view to_string(PolicyKind k);

/// Which observation blocks a policy consumes. All blocks are expressed in
/// the character frame.
struct FeatureSpec {
    bool character{true};
    bool ball{false};
    bool goal{true};

    static FeatureSpec for_skill(Skill s);
    std::size_t dim(Skill s) const;
};

struct SkillPolicy {
    Skill skill{Skill::move};
    PolicyKind kind{PolicyKind::analytic};
    FeatureSpec features;
    /// Layer widths including input and output, e.g. {in, 32, 8}.
    std::vector<std::size_t> layers;
    std::vector<double> params;
    /// Adds the analytic controller's latent before normalization.
    bool residual{false};
    std::uint64_t seed{0};

    static SkillPolicy analytic(Skill s);
    /// Zero-initialized parametric policy with one hidden layer.
    static SkillPolicy parametric(Skill s, bool residual, std::size_t hidden = 32, std::size_t latent_dim = 8);
    static std::size_t param_count(const std::vector<std::size_t>& layers);
};

/// Configuration shared by the controllers.
struct ActContext {
    SimConfig sim;
    MotionConfig motion;
};

/// Observation vector for a parametric policy.
std::vector<double> policy_features(const SkillPolicy& p, const CharacterState& c, const BallState* ball,
                                    const SkillGoal& goal);

Latent act(const SkillPolicy& p, const CharacterState& c, const BallState* ball, const SkillGoal& goal,
           const ActContext& ctx = {});

/// Gait that drives the root toward a world-frame velocity while turning toward `face`.
GaitParams velocity_command(const CharacterState& c, Vec2 world_vel, Vec2 face);

namespace analytic {
inline constexpr double kMoveCorrectionGain = 0.5;
inline constexpr double kDribbleBehind = 0.45;
/// Foot velocity that launches a ball moving at `ball_normal_speed` along
/// the strike direction to `target_speed`, for a normal restitution `e`.
constexpr double strike_speed_for(double target_speed, double ball_normal_speed, double e) {
    return (target_speed + e * ball_normal_speed) / (1.0 + e);
}

/// Tracks the goal velocity with a proportional correction on the velocity
/// error. Equals encode(goal) when the character already tracks the goal.
Latent move(const CharacterState& c, const MoveGoal& g, const ActContext& ctx = {});
/// Pursues a point behind the ball and taps it along the target direction.
Latent dribble(const CharacterState& c, const BallState& b, const DribbleGoal& g, const ActContext& ctx = {});
/// Moves the target body part onto the predicted ball path, then matches the ball velocity.
Latent trap(const CharacterState& c, const BallState& b, const TrapGoal& g, const ActContext& ctx = {});
/// Lines the ball up with the strike station and fires a strike that
/// inverts the contact model.
Latent kick(const CharacterState& c, const BallState& b, const KickGoal& g, const ActContext& ctx = {});
/// Target root position for the trap controller and the intercept it aims at.
struct TrapPlan {
    Vec2 intercept;
    Vec2 root_target;
    Vec2 face;
    double time_to_intercept{0.0};
};
TrapPlan trap_plan(const CharacterState& c, const BallState& b, const TrapGoal& g, const ActContext& ctx = {});
}  // namespace analytic

struct BallPrediction {
    Vec2 point;
    double time{0.0};
    bool found{false};
};

/// Where the ball center first descends through `height`, found by running
/// the ball integrator forward. Falls back to the first ground impact.
BallPrediction predict_descent(const BallState& b, double height, const SimConfig& sim, double horizon = 6.0);
/// Height at which the ball center meets the given body part.
double contact_height(BodyPart part);

// ---------------------------------------------------------------------------
// Episodes under a policy.

struct RolloutConfig {
    EpisodeConfig episode;
    RewardConfig reward;
    SimConfig sim;
    MotionConfig motion;
    /// Move episodes: probability that the episode draws its goals from the DEGCL buffer.
    double degcl_fraction{0.8};
};

struct EpisodeStats {
    double episode_return{0.0};
    int control_ticks{0};
    Termination termination;
    ContactLog contacts;
    GoalMode mode{GoalMode::general};
    InitSource source{InitSource::rest};
};

/// Called after every control tick with the world and the tick index.
using TickObserver = std::function<void(const World&, int control_tick)>;

EpisodeStats run_episode(const SkillPolicy& p, const StiBuffers& buffers, const DegclBuffer* degcl, Rng& rng,
                         const RolloutConfig& cfg = {}, const TickObserver& observer = {});

/// Rolls out episodes with training-distribution goals and records snapshots
/// per the source skill's recording rule until `count` are collected.
StiBuffer build_sti_buffer(const SkillPolicy& p, std::size_t count, const StiBuffers& buffers,
                           const DegclBuffer* degcl, Rng& rng, const RolloutConfig& cfg = {});

// ---------------------------------------------------------------------------
// Training.

struct TrainConfig {
    int population{32};
    int elites{8};
    int iterations{20};
    int episodes_per_candidate{4};
    double init_stddev{0.3};
    double min_stddev{0.005};
    std::uint64_t seed{0};
    std::size_t hidden{32};
    /// Residual on top of the analytic controller. Defaults to on for every skill but Move.
    std::optional<bool> residual;
    RolloutConfig rollout;
    /// Worker threads for candidate evaluation; results do not depend on it.
    unsigned threads{1};

    void validate() const;
};

struct TrainLogRow {
    int iteration{0};
    double mean{0.0};
    double max{0.0};
    double elite_mean{0.0};
    double best_so_far{0.0};
};

struct TrainResult {
    SkillPolicy policy;
    std::vector<TrainLogRow> log;
    /// Mean fitness of the initial population.
    double baseline_mean{0.0};
    double best_fitness{0.0};
};

/// Ensures the predecessor buffers required by the training order exist.
void require_training_order(Skill s, const StiBuffers& buffers, const RolloutConfig& cfg);

TrainResult train(Skill s, const TrainConfig& cfg, const StiBuffers& buffers, const DegclBuffer* degcl);

/// Mean return over `episodes` episodes seeded from `seed`.
double evaluate_policy(const SkillPolicy& p, int episodes, std::uint64_t seed, const StiBuffers& buffers,
                       const DegclBuffer* degcl, const RolloutConfig& cfg = {});

void write_train_log_csv(std::ostream& os, const std::vector<TrainLogRow>& log);

/// Versioned file: one text header line, then little-endian parameters.
void write_policy(std::ostream& os, const SkillPolicy& p);
SkillPolicy read_policy(std::istream& is);

}  // namespace footsim
