#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "footsim/core.hpp"
#include "footsim/motion.hpp"
#include "footsim/rng.hpp"

namespace footsim {

struct SimConfig {
    double dt_sim{1.0 / 60.0};
    int control_divisor{2};
    double gravity{9.8};
    double ball_friction{0.2};
    double ball_rolling_friction{0.2};
    double ball_restitution{0.8};
    double ball_linear_damping{0.1};
    double ball_angular_damping{0.05};
    double ground_friction{1.0};
    double ground_restitution{0.2};
    double character_friction{1.0};
    double character_restitution{0.0};
    double penetration_tol{1e-4};
    std::uint64_t seed{0};

    /// Impacts slower than this settle into resting contact.
    double bounce_threshold{0.5};
    /// Character root acceleration limit.
    double max_root_accel{9.0};

    double dt_control() const { return dt_sim * control_divisor; }
    /// Ball-character friction (average of the two bodies).
    double ball_character_friction() const { return 0.5 * (ball_friction + character_friction); }
    /// Ball-character restitution (average of the two bodies).
    double ball_character_restitution() const {
        return 0.5 * (ball_restitution + character_restitution);
    }
    double ball_ground_friction() const { return 0.5 * (ball_friction + ground_friction); }

    void validate() const;
};

/// Collider on the character surrogate. The first six mirror BodyPart.
enum class ContactPart : std::uint8_t {
    head,
    torso,
    lower_leg_l,
    lower_leg_r,
    foot_l,
    foot_r,
    pelvis,
    arm_l,
    arm_r,
    ground,
};
std::string_view to_string(ContactPart p);
std::optional<ContactPart> contact_part_from_string(std::string_view s);
std::optional<BodyPart> as_body_part(ContactPart p);
constexpr bool is_foot(ContactPart p) { return p == ContactPart::foot_l || p == ContactPart::foot_r; }

enum class CollisionKind : std::uint8_t { ground, body, handball };
std::string_view to_string(CollisionKind k);

struct CollisionEvent {
    std::uint64_t tick{0};
    int player{-1};  // -1 for ball-ground impacts
    ContactPart part{ContactPart::ground};
    CollisionKind kind{CollisionKind::ground};
    Vec3 pre_vel;
    Vec3 post_vel;
    bool degenerate{false};

    bool operator==(const CollisionEvent&) const = default;
};

struct World {
    std::optional<BallState> ball;
    std::vector<CharacterState> players;
    std::uint64_t tick{0};
    Rng rng;
    /// Events of the most recent control step (cleared by step_control).
    std::vector<CollisionEvent> events;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

struct ContactResult {
    BallState ball;
    bool impulse{false};
    bool degenerate{false};
    Vec3 pre_vel;
    Vec3 post_vel;
};

/// Kinematic-striker impulse between the ball and one body sphere. The body
/// is not affected. `fallback_axis` is used as contact normal when the two
/// centers coincide.
ContactResult resolve_ball_body(const BallState& ball, Vec3 body_pos, Vec3 body_vel,
                                double body_radius, double restitution, double friction,
                                Vec2 fallback_axis);

/// Integrates a lone ball by one simulation tick, including ground contact.
/// Returns the ground impact event, if one occurred.
std::optional<CollisionEvent> step_ball(BallState& ball, const SimConfig& cfg, std::uint64_t tick);

/// One simulation tick. `commands` holds one decoded gait per player.
void step(World& world, const SimConfig& cfg, std::span<const GaitParams> commands);

/// One control tick: clears the event list, then runs `control_divisor`
/// simulation ticks with the commands latched.
void step_control(World& world, const SimConfig& cfg, std::span<const GaitParams> commands);

/// Strike station: where a ball should sit (character frame) for the given foot.
Vec3 strike_station(Side foot);
/// Distance the striking foot travels before reaching a ball at the station.
inline constexpr double kStrikeWindupGap = 0.12;

}  // namespace footsim
