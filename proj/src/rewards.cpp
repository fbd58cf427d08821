#include "footsim/rewards.hpp"

#include <cmath>

namespace footsim {

void RewardConfig::validate() const {
    if (!(epsilon >= 0.0)) throw Error("reward epsilon must be >= 0");
    auto sums_to_one = [](double a, double b) { return std::abs(a + b - 1.0) < 1e-12; };
    if (std::abs(dribble_ball_vel_weight + dribble_ball_root_pos_weight + dribble_root_vel_weight - 1.0) > 1e-12 ||
        !sums_to_one(move_vel_weight, move_dir_weight) ||
        !sums_to_one(degcl_task_weight, degcl_similarity_weight))
        throw Error("reward weights of each equation must sum to 1");
    if (trap_post_ticks < 1 || kick_window_ticks < 1) throw Error("reward windows must be positive");
}

namespace {

template <class V>
NtsError nts_impl(V target, V actual, double eps) {
    const double tn = norm(target);
    const double denom = tn + eps;
    return {norm(target - actual) / denom, (tn - norm(actual)) / denom};
}

template <class V>
NtsError velocity_error(V target, V actual, const RewardConfig& cfg) {
    if (cfg.nts_enabled) return nts_impl(target, actual, cfg.epsilon);
    return {norm(target - actual), norm(target) - norm(actual)};
}

double tracking_term(const NtsError& e, double coeff, double speed_weight) {
    return std::exp(-coeff * (e.vel_err * e.vel_err + speed_weight * e.speed_err * e.speed_err));
}

}  // namespace

NtsError nts_error(Vec2 target, Vec2 actual, double eps) { return nts_impl(target, actual, eps); }
NtsError nts_error(Vec3 target, Vec3 actual, double eps) { return nts_impl(target, actual, eps); }

DribbleRewardTerms dribble_reward(const DribbleGoal& goal, const BallState& ball, const CharacterState& c,
                                  const RewardConfig& cfg) {
    validate(ball);
    validate(c);
    DribbleRewardTerms r;
    const Vec2 root = c.root_pos.xy();
    const Vec2 offset = ball.pos.xy() - root;

    r.ball_vel = tracking_term(velocity_error(goal.vel, ball.vel.xy(), cfg), cfg.dribble_coeff,
                               cfg.speed_term_weight);
    r.ball_root_pos = std::exp(-cfg.dribble_coeff * norm_sq(offset));

    const double dist = norm(offset);
    Vec2 r2b = c.facing;
    if (dist > 0.0) {
        r2b = offset / dist;
    } else {
        r.degenerate_r2b = true;
    }
    r.root_vel = tracking_term(velocity_error(r2b * norm(goal.vel), c.root_vel.xy(), cfg), cfg.dribble_coeff,
                               cfg.speed_term_weight);
    r.total = cfg.dribble_ball_vel_weight * r.ball_vel + cfg.dribble_ball_root_pos_weight * r.ball_root_pos +
              cfg.dribble_root_vel_weight * r.root_vel;
    return r;
}

double trap_reward(const TrapGoal& goal, const BallState& ball, const CharacterState& c, bool collided_yet,
                   const RewardConfig& cfg) {
    const auto i = index_of(goal.part);
    if (i >= c.body_points.size()) throw Error("unknown trap body part");
    if (!collided_yet) return std::exp(-cfg.trap_coeff * norm_sq(ball.pos - c.body_points[i]));
    return std::exp(-cfg.trap_coeff * norm_sq(ball.vel - c.root_vel));
}

MoveTaskTerms move_task_reward(const MoveGoal& goal, const CharacterState& c, const RewardConfig& cfg) {
    MoveTaskTerms r;
    r.vel = tracking_term(velocity_error(goal.vel, c.root_vel.xy(), cfg), cfg.move_coeff, cfg.speed_term_weight);
    r.dir = dot(normalized_or(goal.face, {1.0, 0.0}), c.facing);
    r.total = cfg.move_vel_weight * r.vel + cfg.move_dir_weight * r.dir;
    return r;
}

double latent_similarity(const Latent& ref, const Latent& out) { return dot(ref, out); }

double move_reward(const MoveGoal& goal, const CharacterState& c, bool is_degcl, const Latent* ref_latent,
                   const Latent& out_latent, const RewardConfig& cfg) {
    const double task = move_task_reward(goal, c, cfg).total;
    if (!is_degcl) {
        if (ref_latent != nullptr) throw Error("reference latent given for a general episode");
        return task;
    }
    if (ref_latent == nullptr) throw Error("DEGCL episode requires a reference latent");
    return cfg.degcl_task_weight * task + cfg.degcl_similarity_weight * latent_similarity(*ref_latent, out_latent);
}

double kick_reward(const KickGoal& goal, const BallState& ball, const RewardConfig& cfg) {
    const NtsError e = velocity_error(goal.vel, ball.vel, cfg);
    return std::exp(-(e.vel_err * e.vel_err));
}

}  // namespace footsim
