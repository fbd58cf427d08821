#include "footsim/goals.hpp"

namespace footsim {

std::string_view to_string(Skill s) {
    switch (s) {
        case Skill::move: return "move";
        case Skill::trap: return "trap";
        case Skill::dribble: return "dribble";
        case Skill::kick: return "kick";
    }
    return "?";
}

std::optional<Skill> skill_from_string(std::string_view s) {
    for (Skill k : kSkills) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

Skill skill_of(const SkillGoal& g) {
    struct Visitor {
        Skill operator()(const DribbleGoal&) const { return Skill::dribble; }
        Skill operator()(const TrapGoal&) const { return Skill::trap; }
        Skill operator()(const MoveGoal&) const { return Skill::move; }
        Skill operator()(const KickGoal&) const { return Skill::kick; }
    };
    return std::visit(Visitor{}, g);
}

}  // namespace footsim
