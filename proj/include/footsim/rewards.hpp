#pragma once

#include "footsim/core.hpp"
#include "footsim/goals.hpp"
#include "footsim/motion.hpp"

namespace footsim {

struct RewardConfig {
    double epsilon{0.01};
    /// When false, velocity errors are left unnormalized.
    bool nts_enabled{true};

    double dribble_ball_vel_weight{0.6};
    double dribble_ball_root_pos_weight{0.2};
    double dribble_root_vel_weight{0.2};
    double move_vel_weight{0.7};
    double move_dir_weight{0.3};
    double degcl_task_weight{0.5};
    double degcl_similarity_weight{0.5};

    double dribble_coeff{10.0};
    double trap_coeff{10.0};
    double move_coeff{0.25};
    /// Relative weight of the speed error inside each exponent.
    double speed_term_weight{0.1};

    /// Post-collision windows in control ticks (1/6 s and 1/3 s at 30 Hz).
    int trap_post_ticks{5};
    int kick_window_ticks{10};

    void validate() const;
};

struct NtsError {
    double vel_err{0.0};
    double speed_err{0.0};
};

/// Velocity and speed error normalized by (||target|| + eps).
NtsError nts_error(Vec2 target, Vec2 actual, double eps);
NtsError nts_error(Vec3 target, Vec3 actual, double eps);

struct DribbleRewardTerms {
    double ball_vel{0.0};
    double ball_root_pos{0.0};
    double root_vel{0.0};
    double total{0.0};
    /// Ball exactly above the root: facing was used as the root-to-ball direction.
    bool degenerate_r2b{false};
};

DribbleRewardTerms dribble_reward(const DribbleGoal& goal, const BallState& ball, const CharacterState& c,
                                  const RewardConfig& cfg = {});

/// Two-phase trap reward; `collided_yet` selects the post-collision form.
double trap_reward(const TrapGoal& goal, const BallState& ball, const CharacterState& c, bool collided_yet,
                   const RewardConfig& cfg = {});

struct MoveTaskTerms {
    double vel{0.0};
    double dir{0.0};
    double total{0.0};
};

MoveTaskTerms move_task_reward(const MoveGoal& goal, const CharacterState& c, const RewardConfig& cfg = {});

double latent_similarity(const Latent& ref, const Latent& out);

/// DEGCL episodes mix the task reward with latent similarity; `ref_latent`
/// must be given exactly when `is_degcl` is set.
double move_reward(const MoveGoal& goal, const CharacterState& c, bool is_degcl, const Latent* ref_latent,
                   const Latent& out_latent, const RewardConfig& cfg = {});

double kick_reward(const KickGoal& goal, const BallState& ball, const RewardConfig& cfg = {});

}  // namespace footsim
