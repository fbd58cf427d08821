#include "footsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace footsim {

using nlohmann::json;

namespace {

// Reads or writes one section. Each config struct lists its fields once in
// a `fields` overload below and both directions go through it.
class Section {
public:
    Section(json& j, std::string name, bool reading) : j_(j), name_(std::move(name)), reading_(reading) {
        if (reading_ && !j_.is_object()) throw Error("config section '" + name_ + "' must be an object");
    }

    template <typename T>
    void field(const char* key, T& value) {
        seen_.insert(key);
        if (!reading_) {
            j_[key] = value;
            return;
        }
        if (!j_.contains(key)) return;
        try {
            value = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error("config key '" + name_ + "." + key + "' has the wrong type");
        }
    }

    void field(const char* key, std::optional<bool>& value) {
        seen_.insert(key);
        if (!reading_) {
            j_[key] = value ? json(*value) : json(nullptr);
            return;
        }
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        if (v.is_null()) {
            value.reset();
        } else if (v.is_boolean()) {
            value = v.get<bool>();
        } else {
            throw Error("config key '" + name_ + "." + key + "' must be a boolean or null");
        }
    }

    void field(const char* key, std::vector<Vec2>& value) {
        seen_.insert(key);
        if (!reading_) {
            json arr = json::array();
            for (const Vec2& v : value) arr.push_back({v.x, v.y});
            j_[key] = arr;
            return;
        }
        if (!j_.contains(key)) return;
        const json& arr = j_.at(key);
        if (!arr.is_array()) throw Error("config key '" + name_ + "." + key + "' must be an array");
        value.clear();
        for (const json& p : arr) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                throw Error("config key '" + name_ + "." + key + "' must hold [x, y] pairs");
            }
            value.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }

    template <typename F>
    void nested(const char* key, F&& fill) {
        seen_.insert(key);
        if (!reading_) {
            json sub = json::object();
            Section s(sub, name_ + "." + key, false);
            fill(s);
            j_[key] = sub;
            return;
        }
        if (!j_.contains(key)) return;
        Section s(j_.at(key), name_ + "." + key, true);
        fill(s);
        s.finish();
    }

    /// Rejects keys no field claimed.
    void finish() const {
        if (!reading_) return;
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw Error("unknown config key '" + name_ + "." + k + "'");
        }
    }

private:
    json& j_;
    std::string name_;
    bool reading_;
    std::set<std::string> seen_;
};

void fields(Section& s, SimConfig& c) {
    s.field("dt_sim", c.dt_sim);
    s.field("control_divisor", c.control_divisor);
    s.field("gravity", c.gravity);
    s.field("ball_friction", c.ball_friction);
    s.field("ball_rolling_friction", c.ball_rolling_friction);
    s.field("ball_restitution", c.ball_restitution);
    s.field("ball_linear_damping", c.ball_linear_damping);
    s.field("ball_angular_damping", c.ball_angular_damping);
    s.field("ground_friction", c.ground_friction);
    s.field("ground_restitution", c.ground_restitution);
    s.field("character_friction", c.character_friction);
    s.field("character_restitution", c.character_restitution);
    s.field("penetration_tol", c.penetration_tol);
    s.field("seed", c.seed);
    s.field("bounce_threshold", c.bounce_threshold);
    s.field("max_root_accel", c.max_root_accel);
}

void fields(Section& s, MotionConfig& c) {
    s.field("latent_dim", c.latent_dim);
    s.field("facing_gain", c.facing_gain);
    s.field("min_face_channel", c.min_face_channel);
    s.field("strike_threshold", c.strike_threshold);
    s.field("left_foot_code_offset", c.left_foot_code_offset);
}

void fields(Section& s, RewardConfig& c) {
    s.field("epsilon", c.epsilon);
    s.field("nts_enabled", c.nts_enabled);
    s.field("dribble_ball_vel_weight", c.dribble_ball_vel_weight);
    s.field("dribble_ball_root_pos_weight", c.dribble_ball_root_pos_weight);
    s.field("dribble_root_vel_weight", c.dribble_root_vel_weight);
    s.field("move_vel_weight", c.move_vel_weight);
    s.field("move_dir_weight", c.move_dir_weight);
    s.field("degcl_task_weight", c.degcl_task_weight);
    s.field("degcl_similarity_weight", c.degcl_similarity_weight);
    s.field("dribble_coeff", c.dribble_coeff);
    s.field("trap_coeff", c.trap_coeff);
    s.field("move_coeff", c.move_coeff);
    s.field("speed_term_weight", c.speed_term_weight);
    s.field("trap_post_ticks", c.trap_post_ticks);
    s.field("kick_window_ticks", c.kick_window_ticks);
}

void fields(Section& s, EpisodeConfig& c) {
    s.field("trap_stage", c.trap_stage);
    s.field("trap_lob_fraction", c.trap_lob_fraction);
    s.field("dribble_trap_fraction", c.dribble_trap_fraction);
    s.field("kick_dribble_fraction", c.kick_dribble_fraction);
    s.field("dribble_ball_radius", c.dribble_ball_radius);
    s.field("dribble_ball_max_speed", c.dribble_ball_max_speed);
    s.field("kick_ball_radius", c.kick_ball_radius);
    s.field("max_episode_time", c.max_episode_time);
    s.field("kick_contact_timeout", c.kick_contact_timeout);
    s.field("dribble_lost_distance", c.dribble_lost_distance);
    s.field("ground_pass_beyond_margin", c.ground_pass_beyond_margin);
    s.field("use_sti", c.use_sti);
}

void fields(Section& s, TrainConfig& c) {
    s.field("population", c.population);
    s.field("elites", c.elites);
    s.field("iterations", c.iterations);
    s.field("episodes_per_candidate", c.episodes_per_candidate);
    s.field("init_stddev", c.init_stddev);
    s.field("min_stddev", c.min_stddev);
    s.field("seed", c.seed);
    s.field("hidden", c.hidden);
    s.field("residual", c.residual);
    s.field("threads", c.threads);
}

void fields(Section& s, ChaseConfig& c) {
    s.field("lead_time", c.lead_time);
    s.field("speed", c.speed);
    s.field("engage_radius", c.engage_radius);
}

void fields(Section& s, ScenarioConfig& c) {
    s.field("id", c.id);
    s.field("seed", c.seed);
    s.field("team_size", c.team_size);
    s.field("formation_anchors", c.formation_anchors);
    s.field("formation_shift_gain", c.formation_shift_gain);
    s.nested("chase", [&](Section& sub) { fields(sub, c.chase); });
    s.field("give_and_go_opponent_speed", c.give_and_go_opponent_speed);
    s.field("teammate_run_speed", c.teammate_run_speed);
    s.field("shoot_distance", c.shoot_distance);
    s.field("launch_interval", c.launch_interval);
    s.field("time_limit", c.time_limit);
}

void all_fields(Section& root, RunConfig& c) {
    root.nested("sim", [&](Section& s) { fields(s, c.sim); });
    root.nested("motion", [&](Section& s) { fields(s, c.motion); });
    root.nested("reward", [&](Section& s) { fields(s, c.reward); });
    root.nested("episode", [&](Section& s) { fields(s, c.episode); });
    root.nested("rollout", [&](Section& s) { s.field("degcl_fraction", c.degcl_fraction); });
    root.nested("train", [&](Section& s) { fields(s, c.train); });
    root.nested("scenario", [&](Section& s) { fields(s, c.scenario); });
    root.nested("protocol", [&](Section& s) { s.field("scale", c.protocol_scale); });
}

}  // namespace

void RunConfig::validate() const {
    sim.validate();
    reward.validate();
    episode.validate();
    if (!(degcl_fraction >= 0.0 && degcl_fraction <= 1.0)) throw Error("rollout.degcl_fraction must be in [0, 1]");
    if (!(protocol_scale > 0.0)) throw Error("protocol.scale must be positive");
    train_config().validate();
    scenario_config().validate();
}

RolloutConfig RunConfig::rollout() const {
    RolloutConfig r;
    r.episode = episode;
    r.reward = reward;
    r.sim = sim;
    r.motion = motion;
    r.degcl_fraction = degcl_fraction;
    return r;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t = train;
    t.rollout = rollout();
    return t;
}

ScenarioConfig RunConfig::scenario_config() const {
    ScenarioConfig s = scenario;
    s.sim = sim;
    s.motion = motion;
    s.reward = reward;
    return s;
}

ProtocolConfig RunConfig::protocol_config() const {
    ProtocolConfig p;
    p.scale = protocol_scale;
    p.seed = sim.seed;
    p.config_hash = config_hash(*this);
    p.sim = sim;
    p.motion = motion;
    p.reward = reward;
    p.episode = episode;
    return p;
}

RunConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    Section root(j, "config", true);
    all_fields(root, cfg);
    root.finish();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const RunConfig& cfg) {
    json j = json::object();
    RunConfig copy = cfg;
    Section root(j, "config", false);
    all_fields(root, copy);
    return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& cfg) {
    json j = json::parse(to_json(cfg));
    return fnv1a64(j.dump());
}

}  // namespace footsim
