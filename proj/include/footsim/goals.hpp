#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "footsim/core.hpp"

namespace footsim {

enum class Skill : std::uint8_t { move, trap, dribble, kick };
inline constexpr std::array<Skill, 4> kSkills{Skill::move, Skill::trap, Skill::dribble, Skill::kick};
std::string_view to_string(Skill s);
std::optional<Skill> skill_from_string(std::string_view s);

/// Target horizontal ball velocity, world frame.
struct DribbleGoal {
    Vec2 vel;
    bool operator==(const DribbleGoal&) const = default;
};

/// Body part that should receive the ball.
struct TrapGoal {
    BodyPart part{BodyPart::foot_r};
    bool operator==(const TrapGoal&) const = default;
};

/// Target root velocity and facing direction, world frame.
struct MoveGoal {
    Vec2 vel;
    Vec2 face{1.0, 0.0};
    bool operator==(const MoveGoal&) const = default;
};

/// Target initial ball velocity, world frame.
struct KickGoal {
    Vec3 vel;
    bool operator==(const KickGoal&) const = default;
};

using SkillGoal = std::variant<DribbleGoal, TrapGoal, MoveGoal, KickGoal>;

Skill skill_of(const SkillGoal& g);

}  // namespace footsim
