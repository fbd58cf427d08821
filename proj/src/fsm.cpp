#include "footsim/fsm.hpp"

#include <algorithm>
#include <functional>

namespace footsim {

std::string_view to_string(FsmState s) {
    switch (s) {
        case FsmState::move: return "move";
        case FsmState::trap: return "trap";
        case FsmState::dribble: return "dribble";
        case FsmState::kick: return "kick";
    }
    return "?";
}

std::optional<FsmState> fsm_state_from_string(std::string_view s) {
    for (FsmState f : kFsmStates) {
        if (to_string(f) == s) return f;
    }
    return std::nullopt;
}

Skill skill_of(FsmState s) {
    switch (s) {
        case FsmState::move: return Skill::move;
        case FsmState::trap: return Skill::trap;
        case FsmState::dribble: return Skill::dribble;
        case FsmState::kick: return Skill::kick;
    }
    return Skill::move;
}

std::string_view to_string(TransitionTrigger t) {
    switch (t) {
        case TransitionTrigger::trap_start: return "trap_start";
        case TransitionTrigger::ball_near: return "ball_near";
        case TransitionTrigger::kick_start: return "kick_start";
        case TransitionTrigger::ball_far: return "ball_far";
        case TransitionTrigger::collision: return "collision";
        case TransitionTrigger::trap_end: return "trap_end";
        case TransitionTrigger::ball_receding: return "ball_receding";
        case TransitionTrigger::kick_end: return "kick_end";
    }
    return "?";
}

std::uint8_t CommandSet::bits() const {
    return static_cast<std::uint8_t>((trap_start ? 1 : 0) | (trap_end ? 2 : 0) | (kick_start ? 4 : 0) |
                                     (kick_end ? 8 : 0));
}

CommandSet CommandSet::from_bits(std::uint8_t b) {
    return {(b & 1) != 0, (b & 2) != 0, (b & 4) != 0, (b & 8) != 0};
}

FsmStep next_state(FsmState current, const CommandSet& cmds, const FsmPredicates& p) {
    using T = TransitionTrigger;
    switch (current) {
        case FsmState::move:
            if (p.within && p.approaching) return {FsmState::dribble, T::ball_near};
            if (cmds.trap_start && p.approaching) return {FsmState::trap, T::trap_start};
            break;
        case FsmState::dribble:
            if (!p.within) return {FsmState::move, T::ball_far};
            if (cmds.kick_start) return {FsmState::kick, T::kick_start};
            break;
        case FsmState::trap:
            if (p.collision) return {FsmState::dribble, T::collision};
            if (!p.approaching) return {FsmState::move, T::ball_receding};
            if (cmds.trap_end) return {FsmState::move, T::trap_end};
            break;
        case FsmState::kick:
            if (p.collision) return {FsmState::move, T::collision};
            if (!p.within) return {FsmState::move, T::ball_far};
            if (cmds.kick_end) return {FsmState::dribble, T::kick_end};
            break;
    }
    return {current, std::nullopt};
}

FsmPredicates fsm_predicates(const World& world, int player, std::span<const CollisionEvent> events) {
    if (player < 0 || static_cast<std::size_t>(player) >= world.players.size())
        throw Error("fsm: player index out of range");
    FsmPredicates p;
    if (!world.ball) return p;
    const CharacterState& c = world.players[static_cast<std::size_t>(player)];
    p.within = horizontal_distance(*world.ball, c) <= kPossessionRadius;
    p.approaching = approaching(*world.ball, c);
    p.collision = std::any_of(events.begin(), events.end(), [&](const CollisionEvent& e) {
        return e.player == player && e.kind != CollisionKind::ground;
    });
    return p;
}

namespace {

struct Rule {
    FsmState from;
    std::function<bool(const CommandSet&, const FsmPredicates&)> guard;
    FsmState to;
    TransitionTrigger trigger;
};

// Rules in evaluation order; the first whose guard holds fires.
const std::vector<Rule>& rules() {
    using S = FsmState;
    using T = TransitionTrigger;
    using C = const CommandSet&;
    using P = const FsmPredicates&;
    static const std::vector<Rule> r{
        {S::move, [](C, P p) { return p.within && p.approaching; }, S::dribble, T::ball_near},
        {S::move, [](C c, P p) { return c.trap_start && p.approaching; }, S::trap, T::trap_start},
        {S::dribble, [](C, P p) { return !p.within; }, S::move, T::ball_far},
        {S::dribble, [](C c, P) { return c.kick_start; }, S::kick, T::kick_start},
        {S::trap, [](C, P p) { return p.collision; }, S::dribble, T::collision},
        {S::trap, [](C, P p) { return !p.approaching; }, S::move, T::ball_receding},
        {S::trap, [](C c, P) { return c.trap_end; }, S::move, T::trap_end},
        {S::kick, [](C, P p) { return p.collision; }, S::move, T::collision},
        {S::kick, [](C, P p) { return !p.within; }, S::move, T::ball_far},
        {S::kick, [](C c, P) { return c.kick_end; }, S::dribble, T::kick_end},
    };
    return r;
}

}  // namespace

std::vector<TransitionRow> transition_table() {
    std::vector<TransitionRow> rows;
    rows.reserve(4 * 16 * 8);
    for (FsmState s : kFsmStates) {
        for (std::uint8_t bits = 0; bits < 16; ++bits) {
            for (int pb = 0; pb < 8; ++pb) {
                TransitionRow row;
                row.from = s;
                row.cmds = CommandSet::from_bits(bits);
                row.predicates = {(pb & 1) != 0, (pb & 2) != 0, (pb & 4) != 0};
                row.step = {s, std::nullopt};
                for (const Rule& rule : rules()) {
                    if (rule.from == s && rule.guard(row.cmds, row.predicates)) {
                        row.step = {rule.to, rule.trigger};
                        break;
                    }
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

CommandLatch::CommandLatch(int expiry_ticks) : expiry_(expiry_ticks) {
    if (expiry_ticks < 1) throw Error("command expiry must be at least one tick");
}

void CommandLatch::press(const CommandSet& edges, std::uint64_t tick) {
    const std::array<bool, 4> on{edges.trap_start, edges.trap_end, edges.kick_start, edges.kick_end};
    for (std::size_t i = 0; i < 4; ++i) {
        if (on[i]) pressed_[i] = tick;
    }
}

CommandSet CommandLatch::active(std::uint64_t tick) const {
    std::array<bool, 4> on{};
    for (std::size_t i = 0; i < 4; ++i) {
        on[i] = pressed_[i] && *pressed_[i] <= tick && tick - *pressed_[i] < static_cast<std::uint64_t>(expiry_);
    }
    return {on[0], on[1], on[2], on[3]};
}

void CommandLatch::clear() { pressed_.fill(std::nullopt); }

PlayerFsm::PlayerFsm(int player, FsmState initial, int expiry_ticks)
    : player_(player), state_(initial), latch_(expiry_ticks) {}

std::optional<TransitionRecord> PlayerFsm::update(const CommandSet& edges, const FsmPredicates& p,
                                                  std::uint64_t tick) {
    latch_.press(edges, tick);
    const FsmStep step = next_state(state_, latch_.active(tick), p);
    if (!step.trigger) return std::nullopt;
    TransitionRecord rec{tick, player_, state_, step.next, *step.trigger};
    state_ = step.next;
    latch_.clear();
    return rec;
}

std::optional<TransitionRecord> PlayerFsm::update(const CommandSet& edges, const World& world, std::uint64_t tick) {
    return update(edges, fsm_predicates(world, player_, world.events), tick);
}

void PlayerFsm::reset(FsmState s) {
    state_ = s;
    latch_.clear();
}

}  // namespace footsim
