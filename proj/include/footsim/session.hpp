#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "footsim/scenarios.hpp"

namespace footsim {

// WebSocket message schema. Every message is a JSON object with a "type".
//
// client -> server
//   {"type":"input", "seq":n, "move":[x,y], "face":[x,y],
//    "triggers":[left,right], "buttons":["lb","rb","b","y"], "switch":-1|0|1}
//   Sticks are world-frame axes; "face" is the right stick. Buttons are press
//   edges; "switch" cycles the controlled player and the "y" button asks
//   for the teammate closest to the ball.
//
// server -> client
//   {"type":"frame", "tick", "time", "controlled", "input_seq",
//    "input_received_tick", "ball":{"pos","vel"} | null,
//    "players":[{"id","side","role","pos","vel","facing","feet","state","color"}]}
//   {"type":"event", "tick", "kind":"transition", "player", "from", "to", "trigger"}
//   {"type":"event", "tick", "kind":<scenario event>, "player", "detail"}
//   {"type":"metrics", "tick", "time", "window_ticks", "mean_reward":[...],
//    "state_ticks":{"move":n,...}, "completed"}

/// Display color of an FSM state: red Move, yellow Trap, green Dribble, blue Kick.
std::string_view fsm_color(FsmState s);

struct InputMessage {
    std::uint64_t seq{0};
    PadInput pad;
};

/// Parses an input message; throws Error on malformed JSON or fields.
InputMessage parse_input_message(std::string_view text);
std::string input_message_json(const InputMessage& m);

std::string frame_message(const Scenario& sc, std::uint64_t input_seq, std::optional<std::uint64_t> received_tick);
std::string transition_message(const TransitionRecord& t);
std::string scenario_event_message(const ScenarioEvent& e);

/// One scenario driven by client inputs. Inputs may arrive from any thread;
/// tick() runs on the simulation thread. Until the first input the
/// scenario's own script plays the controlled player.
class Session {
public:
    Session(const ScenarioConfig& cfg, const PolicySet& policies = {});

    /// Queues an input for the next tick. Axes and triggers are latest-wins;
    /// button edges accumulate until a tick consumes them.
    void submit(const InputMessage& m);
    /// Parses and queues a raw client message. Returns an error message to
    /// send back, if any.
    std::optional<std::string> submit_text(std::string_view text);

    /// Advances one control tick and returns the outgoing messages: the
    /// frame, then events, then a metrics snippet once per second.
    std::vector<std::string> tick();

    const Scenario& scenario() const { return *scenario_; }
    std::uint64_t current_tick() const { return tick_.load(); }

private:
    std::unique_ptr<Scenario> scenario_;
    std::atomic<std::uint64_t> tick_{0};
    std::mutex mu_;
    std::optional<InputMessage> pending_;
    std::optional<std::uint64_t> pending_received_;
    PadInput held_;
    bool human_{false};
    std::uint64_t applied_seq_{0};
    std::optional<std::uint64_t> applied_received_;

    int metrics_every_{30};
    std::vector<double> reward_sum_;
    std::vector<std::uint64_t> state_ticks_;
    int window_{0};
};

}  // namespace footsim
