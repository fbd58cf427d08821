#include "footsim/session.hpp"

#include <cmath>

#include "json.hpp"

namespace footsim {

using nlohmann::json;

namespace {

json vec(Vec2 v) { return json::array({v.x, v.y}); }
json vec(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec2 read_pair(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw Error(std::string("input field '") + key + "' must be a pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

std::string_view fsm_color(FsmState s) {
    switch (s) {
        case FsmState::move: return "red";
        case FsmState::trap: return "yellow";
        case FsmState::dribble: return "green";
        case FsmState::kick: return "blue";
    }
    return "red";
}

InputMessage parse_input_message(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error&) {
        throw Error("input message is not valid JSON");
    }
    if (!j.is_object() || j.value("type", "") != "input") throw Error("expected a message of type 'input'");
    InputMessage m;
    if (j.contains("seq")) {
        if (!j["seq"].is_number_unsigned()) throw Error("input seq must be a non-negative integer");
        m.seq = j["seq"].get<std::uint64_t>();
    }
    m.pad.left_stick = read_pair(j, "move");
    m.pad.right_stick = read_pair(j, "face");
    const Vec2 trig = read_pair(j, "triggers");
    m.pad.left_trigger = trig.x;
    m.pad.right_trigger = trig.y;
    if (j.contains("buttons")) {
        if (!j["buttons"].is_array()) throw Error("input buttons must be an array");
        for (const json& b : j["buttons"]) {
            const std::string name = b.is_string() ? b.get<std::string>() : "";
            if (name == "lb") {
                m.pad.left_bumper = true;
            } else if (name == "rb") {
                m.pad.right_bumper = true;
            } else if (name == "b") {
                m.pad.b = true;
            } else if (name == "y") {
                m.pad.y = true;
            } else {
                throw Error("unknown button '" + b.dump() + "'");
            }
        }
    }
    if (j.contains("switch")) {
        if (!j["switch"].is_number_integer()) throw Error("input switch must be -1, 0 or 1");
        m.pad.dpad = j["switch"].get<int>();
    }
    m.pad = m.pad.clamped();
    return m;
}

std::string input_message_json(const InputMessage& m) {
    json buttons = json::array();
    if (m.pad.left_bumper) buttons.push_back("lb");
    if (m.pad.right_bumper) buttons.push_back("rb");
    if (m.pad.b) buttons.push_back("b");
    if (m.pad.y) buttons.push_back("y");
    return json{{"type", "input"},
                {"seq", m.seq},
                {"move", vec(m.pad.left_stick)},
                {"face", vec(m.pad.right_stick)},
                {"triggers", json::array({m.pad.left_trigger, m.pad.right_trigger})},
                {"buttons", buttons},
                {"switch", m.pad.dpad}}
        .dump();
}

std::string frame_message(const Scenario& sc, std::uint64_t input_seq, std::optional<std::uint64_t> received_tick) {
    const World& w = sc.world();
    json players = json::array();
    for (const Agent& a : sc.agents()) {
        const CharacterState& c = w.players[static_cast<std::size_t>(a.id)];
        const FsmState s = a.fsm.state();
        players.push_back({{"id", a.id},
                           {"side", a.side == TeamSide::home ? "home" : "away"},
                           {"role", a.role},
                           {"pos", vec(c.root_pos)},
                           {"vel", vec(c.root_vel)},
                           {"facing", vec(c.facing)},
                           {"feet", json::array({vec(c.foot(Side::left).pos), vec(c.foot(Side::right).pos)})},
                           {"state", std::string(to_string(s))},
                           {"color", std::string(fsm_color(s))}});
    }
    json ball = nullptr;
    if (w.ball) ball = {{"pos", vec(w.ball->pos)}, {"vel", vec(w.ball->vel)}};
    return json{{"type", "frame"},
                {"tick", sc.tick()},
                {"time", sc.time()},
                {"controlled", sc.controlled()},
                {"input_seq", input_seq},
                {"input_received_tick", received_tick ? json(*received_tick) : json(nullptr)},
                {"ball", ball},
                {"players", players}}
        .dump();
}

std::string transition_message(const TransitionRecord& t) {
    return json{{"type", "event"},
                {"kind", "transition"},
                {"tick", t.tick},
                {"player", t.player},
                {"from", std::string(to_string(t.from))},
                {"to", std::string(to_string(t.to))},
                {"trigger", std::string(to_string(t.trigger))}}
        .dump();
}

std::string scenario_event_message(const ScenarioEvent& e) {
    return json{{"type", "event"}, {"kind", e.kind}, {"tick", e.tick}, {"player", e.player}, {"detail", e.detail}}
        .dump();
}

Session::Session(const ScenarioConfig& cfg, const PolicySet& policies) : scenario_(make_scenario(cfg, policies)) {
    metrics_every_ = std::max(1, static_cast<int>(std::lround(1.0 / cfg.sim.dt_control())));
    reward_sum_.assign(scenario_->agents().size(), 0.0);
    state_ticks_.assign(4, 0);
}

void Session::submit(const InputMessage& m) {
    std::lock_guard lock(mu_);
    if (pending_) {
        // Keep edges from an input the loop has not consumed yet.
        InputMessage merged = m;
        merged.pad.left_bumper |= pending_->pad.left_bumper;
        merged.pad.right_bumper |= pending_->pad.right_bumper;
        merged.pad.b |= pending_->pad.b;
        merged.pad.y |= pending_->pad.y;
        if (merged.pad.dpad == 0) merged.pad.dpad = pending_->pad.dpad;
        pending_ = merged;
    } else {
        pending_ = m;
        pending_received_ = tick_.load();
    }
}

std::optional<std::string> Session::submit_text(std::string_view text) {
    try {
        submit(parse_input_message(text));
        return std::nullopt;
    } catch (const Error& e) {
        return json{{"type", "error"}, {"message", e.what()}}.dump();
    }
}

std::vector<std::string> Session::tick() {
    std::optional<InputMessage> in;
    std::optional<std::uint64_t> received;
    {
        std::lock_guard lock(mu_);
        in.swap(pending_);
        received = pending_received_;
        pending_received_.reset();
    }
    if (in) {
        human_ = true;
        held_ = in->pad;
        applied_seq_ = in->seq;
        applied_received_ = received;
    }
    if (human_) {
        scenario_->step(&held_);
        // Edges fire once; sticks and triggers stay held.
        held_.left_bumper = held_.right_bumper = held_.b = held_.y = false;
        held_.dpad = 0;
    } else {
        scenario_->step(nullptr);
    }

    tick_.store(scenario_->tick());

    std::vector<std::string> out;
    out.push_back(frame_message(*scenario_, applied_seq_, applied_received_));
    for (const TransitionRecord& t : scenario_->frame().transitions) out.push_back(transition_message(t));
    for (const ScenarioEvent& e : scenario_->events()) out.push_back(scenario_event_message(e));

    for (const PlayerFrame& p : scenario_->frame().players) {
        reward_sum_[static_cast<std::size_t>(p.id)] += p.reward;
        if (p.id == scenario_->controlled()) ++state_ticks_[static_cast<std::size_t>(p.fsm)];
    }
    if (++window_ >= metrics_every_) {
        json mean = json::array();
        for (double& r : reward_sum_) {
            mean.push_back(r / window_);
            r = 0.0;
        }
        json states = json::object();
        for (FsmState s : {FsmState::move, FsmState::trap, FsmState::dribble, FsmState::kick}) {
            states[std::string(to_string(s))] = state_ticks_[static_cast<std::size_t>(s)];
            state_ticks_[static_cast<std::size_t>(s)] = 0;
        }
        out.push_back(json{{"type", "metrics"},
                           {"tick", scenario_->tick()},
                           {"time", scenario_->time()},
                           {"window_ticks", window_},
                           {"mean_reward", mean},
                           {"state_ticks", states},
                           {"completed", scenario_->completed()}}
                          .dump());
        window_ = 0;
    }
    return out;
}

}  // namespace footsim
