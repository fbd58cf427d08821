#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "footsim/goals.hpp"
#include "footsim/sim.hpp"

namespace footsim {

enum class FsmState : std::uint8_t { move, trap, dribble, kick };
inline constexpr std::array<FsmState, 4> kFsmStates{FsmState::move, FsmState::trap, FsmState::dribble,
                                                    FsmState::kick};
std::string_view to_string(FsmState s);
std::optional<FsmState> fsm_state_from_string(std::string_view s);
/// Skill whose policy acts while the FSM is in `s`.
Skill skill_of(FsmState s);

/// User command edges seen at a control tick.
struct CommandSet {
    bool trap_start{false};
    bool trap_end{false};
    bool kick_start{false};
    bool kick_end{false};

    bool any() const { return trap_start || trap_end || kick_start || kick_end; }
    bool operator==(const CommandSet&) const = default;
    /// Bit i set for the i-th field in declaration order.
    std::uint8_t bits() const;
    static CommandSet from_bits(std::uint8_t bits);
};

/// World facts the transition rules read.
struct FsmPredicates {
    /// Horizontal ball-root distance is at most the possession radius.
    bool within{false};
    bool approaching{false};
    /// The ball touched the character (any collider) during this tick.
    bool collision{false};

    bool operator==(const FsmPredicates&) const = default;
};

enum class TransitionTrigger : std::uint8_t {
    trap_start,
    ball_near,
    kick_start,
    ball_far,
    collision,
    trap_end,
    ball_receding,
    kick_end,
};
std::string_view to_string(TransitionTrigger t);

struct TransitionRecord {
    std::uint64_t tick{0};
    int player{0};
    FsmState from{FsmState::move};
    FsmState to{FsmState::move};
    TransitionTrigger trigger{TransitionTrigger::ball_near};

    bool operator==(const TransitionRecord&) const = default;
};

struct FsmStep {
    FsmState next{FsmState::move};
    std::optional<TransitionTrigger> trigger;
};

inline constexpr double kPossessionRadius = 2.0;

/// Transition rules. Physical facts are checked before user commands.
FsmStep next_state(FsmState current, const CommandSet& cmds, const FsmPredicates& p);

/// Reads the predicates for `player` from the world and this tick's events.
FsmPredicates fsm_predicates(const World& world, int player, std::span<const CollisionEvent> events);

struct TransitionRow {
    FsmState from{FsmState::move};
    CommandSet cmds;
    FsmPredicates predicates;
    FsmStep step;
};

/// Every (state, command combination, predicate combination) with its
/// outcome, built from the declarative rule list rather than `next_state`.
std::vector<TransitionRow> transition_table();

/// Holds command edges for a limited number of control ticks so a press
/// that arrives slightly early still counts.
class CommandLatch {
public:
    static constexpr int kDefaultExpiryTicks = 10;
    explicit CommandLatch(int expiry_ticks = kDefaultExpiryTicks);

    void press(const CommandSet& edges, std::uint64_t tick);
    /// Commands pressed within the last `expiry_ticks` ticks (inclusive of `tick`).
    CommandSet active(std::uint64_t tick) const;
    void clear();
    int expiry_ticks() const { return expiry_; }

private:
    int expiry_;
    std::array<std::optional<std::uint64_t>, 4> pressed_;
};

/// One player's state machine.
class PlayerFsm {
public:
    explicit PlayerFsm(int player = 0, FsmState initial = FsmState::move, int expiry_ticks = CommandLatch::kDefaultExpiryTicks);

    /// Registers this tick's command edges, evaluates the rules and, on a
    /// transition, consumes every latched command.
    std::optional<TransitionRecord> update(const CommandSet& edges, const FsmPredicates& p, std::uint64_t tick);
    std::optional<TransitionRecord> update(const CommandSet& edges, const World& world, std::uint64_t tick);

    FsmState state() const { return state_; }
    int player() const { return player_; }
    void reset(FsmState s);
    const CommandLatch& latch() const { return latch_; }

private:
    int player_;
    FsmState state_;
    CommandLatch latch_;
};

}  // namespace footsim
