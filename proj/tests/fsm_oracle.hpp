#pragma once

#include "footsim/fsm.hpp"

namespace footsim::fsm_oracle {

// Independent reading of the transition rules, written as one boolean
// expression per outgoing edge with physical facts ranked above commands.
inline FsmStep oracle(FsmState s, const CommandSet& c, const FsmPredicates& p) {
    using T = TransitionTrigger;
    const bool far = !p.within;
    if (s == FsmState::move) {
        const bool to_dribble = p.within && p.approaching;
        const bool to_trap = c.trap_start && p.approaching;
        if (to_dribble) return {FsmState::dribble, T::ball_near};
        if (to_trap) return {FsmState::trap, T::trap_start};
    } else if (s == FsmState::dribble) {
        if (far) return {FsmState::move, T::ball_far};
        if (c.kick_start) return {FsmState::kick, T::kick_start};
    } else if (s == FsmState::trap) {
        if (p.collision) return {FsmState::dribble, T::collision};
        if (!p.approaching || c.trap_end)
            return {FsmState::move, !p.approaching ? T::ball_receding : T::trap_end};
    } else {
        if (p.collision || far) return {FsmState::move, p.collision ? T::collision : T::ball_far};
        if (c.kick_end) return {FsmState::dribble, T::kick_end};
    }
    return {s, std::nullopt};
}

}  // namespace footsim::fsm_oracle
