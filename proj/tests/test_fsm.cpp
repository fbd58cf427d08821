#include "doctest.h"

#include <set>

#include "footsim/fsm.hpp"
#include "fsm_oracle.hpp"

using namespace footsim;
using footsim::fsm_oracle::oracle;

namespace {

World world_with(Vec2 ball_pos, Vec2 ball_vel) {
    World w;
    w.players.push_back(rest_pose());
    BallState b;
    b.pos = lift(ball_pos, b.radius);
    b.vel = lift(ball_vel);
    w.ball = b;
    return w;
}

}  // namespace

TEST_CASE("exhaustive enumeration matches the transition table") {
    const auto table = transition_table();
    REQUIRE(table.size() == 4 * 16 * 8);
    std::size_t mismatches = 0;
    std::set<std::pair<int, int>> edges;
    std::set<std::pair<int, TransitionTrigger>> rules;
    for (const auto& row : table) {
        const FsmStep direct = next_state(row.from, row.cmds, row.predicates);
        const FsmStep expect = oracle(row.from, row.cmds, row.predicates);
        if (direct.next != row.step.next || direct.trigger != row.step.trigger) ++mismatches;
        if (expect.next != row.step.next || expect.trigger != row.step.trigger) ++mismatches;
        if (!row.step.trigger) continue;
        edges.insert({static_cast<int>(row.from), static_cast<int>(row.step.next)});
        rules.insert({static_cast<int>(row.from), *row.step.trigger});
    }
    CHECK(mismatches == 0);
    CHECK(edges.size() == 8);
    // Trap and Kick each reach Move through two different triggers.
    CHECK(rules.size() == 10);
}

TEST_CASE("no transition fires without its predicate") {
    for (const auto& row : transition_table()) {
        if (!row.step.trigger) continue;
        const auto& c = row.cmds;
        const auto& p = row.predicates;
        switch (*row.step.trigger) {
            case TransitionTrigger::trap_start: CHECK((c.trap_start && p.approaching)); break;
            case TransitionTrigger::ball_near: CHECK((p.within && p.approaching)); break;
            case TransitionTrigger::kick_start: CHECK(c.kick_start); break;
            case TransitionTrigger::ball_far: CHECK_FALSE(p.within); break;
            case TransitionTrigger::collision: CHECK(p.collision); break;
            case TransitionTrigger::trap_end: CHECK(c.trap_end); break;
            case TransitionTrigger::ball_receding: CHECK_FALSE(p.approaching); break;
            case TransitionTrigger::kick_end: CHECK(c.kick_end); break;
        }
        // Toggling the deciding input off removes that trigger.
        FsmPredicates q = p;
        CommandSet d = c;
        switch (*row.step.trigger) {
            case TransitionTrigger::trap_start: d.trap_start = false; break;
            case TransitionTrigger::kick_start: d.kick_start = false; break;
            case TransitionTrigger::trap_end: d.trap_end = false; break;
            case TransitionTrigger::kick_end: d.kick_end = false; break;
            case TransitionTrigger::collision: q.collision = false; break;
            case TransitionTrigger::ball_far: q.within = true; break;
            case TransitionTrigger::ball_receding: q.approaching = true; break;
            case TransitionTrigger::ball_near: q.approaching = false; break;
        }
        CHECK(next_state(row.from, d, q).trigger != row.step.trigger);
    }
}

TEST_CASE("documented transition examples") {
    using S = FsmState;
    CHECK(next_state(S::move, {}, {true, true, false}).next == S::dribble);
    CHECK(next_state(S::trap, {}, {true, true, true}).next == S::dribble);
    CHECK(next_state(S::dribble, {}, {false, false, false}).next == S::move);
    // Collision outranks kick_end.
    const FsmStep k = next_state(S::kick, {false, false, false, true}, {true, true, true});
    CHECK(k.next == S::move);
    CHECK(k.trigger == TransitionTrigger::collision);
    // trap_start with a receding ball does nothing.
    CHECK_FALSE(next_state(S::move, {true, false, false, false}, {false, false, false}).trigger);
    CHECK(next_state(S::trap, {}, {true, false, false}).trigger == TransitionTrigger::ball_receding);
    CHECK(next_state(S::trap, {false, true, false, false}, {true, true, false}).trigger == TransitionTrigger::trap_end);
    CHECK(next_state(S::kick, {false, false, false, true}, {true, true, false}).next == S::dribble);
    CHECK(next_state(S::dribble, {false, false, true, false}, {true, false, false}).next == S::kick);
}

TEST_CASE("predicates from the world") {
    World w = world_with({1.5, 0.0}, {-1.0, 0.0});
    FsmPredicates p = fsm_predicates(w, 0, w.events);
    CHECK(p.within);
    CHECK(p.approaching);
    CHECK_FALSE(p.collision);
    CHECK(next_state(FsmState::move, {}, p).next == FsmState::dribble);

    // Exactly two meters is inside for entry; just beyond is outside.
    w = world_with({2.0, 0.0}, {-1.0, 0.0});
    CHECK(fsm_predicates(w, 0, w.events).within);
    w = world_with({2.2, 0.0}, {0.0, 0.0});
    CHECK(next_state(FsmState::dribble, {}, fsm_predicates(w, 0, w.events)).next == FsmState::move);

    w.events.push_back({0, 0, ContactPart::foot_r, CollisionKind::body, {}, {}, false});
    w.events.push_back({0, -1, ContactPart::ground, CollisionKind::ground, {}, {}, false});
    CHECK(fsm_predicates(w, 0, w.events).collision);
    w.events.front().player = 1;
    CHECK_FALSE(fsm_predicates(w, 0, w.events).collision);
    CHECK_THROWS_AS(fsm_predicates(w, 3, w.events), Error);
}

TEST_CASE("commands latch for ten ticks and are consumed on transition") {
    PlayerFsm fsm(0, FsmState::move);
    const FsmPredicates receding{false, false, false};
    const FsmPredicates incoming{false, true, false};
    CHECK_FALSE(fsm.update({true, false, false, false}, receding, 100));
    // Still latched nine ticks later.
    CHECK(fsm.latch().active(109).trap_start);
    CHECK_FALSE(fsm.latch().active(110).trap_start);
    const auto rec = fsm.update({}, incoming, 109);
    REQUIRE(rec);
    CHECK(rec->from == FsmState::move);
    CHECK(rec->to == FsmState::trap);
    CHECK(rec->tick == 109);
    CHECK_FALSE(fsm.latch().active(109).any());

    PlayerFsm late(0, FsmState::move);
    late.update({true, false, false, false}, receding, 100);
    CHECK_FALSE(late.update({}, incoming, 110));
    CHECK(late.state() == FsmState::move);

    // A kick press consumed by one transition does not fire a second one.
    PlayerFsm d(0, FsmState::move);
    CHECK(d.update({false, false, true, false}, FsmPredicates{true, true, false}, 5)->to == FsmState::dribble);
    CHECK_FALSE(d.update({}, FsmPredicates{true, false, false}, 6));
    CHECK(d.state() == FsmState::dribble);
    CHECK_THROWS_AS(CommandLatch(0), Error);
}

TEST_CASE("state names round trip") {
    for (FsmState s : kFsmStates) CHECK(fsm_state_from_string(to_string(s)) == s);
    CHECK_FALSE(fsm_state_from_string("idle"));
    for (std::uint8_t b = 0; b < 16; ++b) CHECK(CommandSet::from_bits(b).bits() == b);
}
