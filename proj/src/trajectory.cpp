#include "footsim/trajectory.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"

namespace footsim {

using nlohmann::json;

namespace {

json vec(Vec2 v) { return json::array({v.x, v.y}); }
json vec(Vec3 v) { return json::array({v.x, v.y, v.z}); }

const json& field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw Error(std::string("trajectory record is missing field '") + key + "'");
    return *it;
}

Vec2 vec2(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error("expected a 2-vector");
    return {j[0].get<double>(), j[1].get<double>()};
}
Vec3 vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw Error("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::optional<CollisionKind> collision_kind_from_string(std::string_view s) {
    for (CollisionKind k : {CollisionKind::ground, CollisionKind::body, CollisionKind::handball}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::optional<TransitionTrigger> trigger_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(TransitionTrigger::kick_end); ++i) {
        const auto t = static_cast<TransitionTrigger>(i);
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

template <class T>
T require(std::optional<T> v, const std::string& what, const std::string& name) {
    if (!v) throw Error("unknown " + what + " '" + name + "'");
    return *v;
}

json ball_json(const BallState& b) {
    return {{"pos", vec(b.pos)}, {"vel", vec(b.vel)}, {"ang_vel", vec(b.ang_vel)}, {"radius", b.radius}, {"mass", b.mass}};
}

BallState ball_from(const json& j) {
    BallState b;
    b.pos = vec3(field(j, "pos"));
    b.vel = vec3(field(j, "vel"));
    b.ang_vel = vec3(field(j, "ang_vel"));
    b.radius = field(j, "radius").get<double>();
    b.mass = field(j, "mass").get<double>();
    return b;
}

json character_json(const CharacterState& c) {
    json feet = json::array();
    for (const FootState& f : c.feet)
        feet.push_back({{"pos", vec(f.pos)}, {"vel", vec(f.vel)}, {"contact", f.contact}, {"offset", vec(f.offset)}});
    const StrikeState& s = c.strike;
    return {{"root_pos", vec(c.root_pos)},
            {"root_vel", vec(c.root_vel)},
            {"facing", vec(c.facing)},
            {"facing_rate", c.facing_rate},
            {"gait_phase", c.gait_phase},
            {"feet", feet},
            {"strike",
             {{"active", s.active},
              {"foot", s.foot == Side::left ? "L" : "R"},
              {"direction", vec(s.direction)},
              {"speed", s.speed},
              {"travelled", s.travelled},
              {"ticks", s.ticks},
              {"cooldown_ticks", s.cooldown_ticks}}}};
}

CharacterState character_from(const json& j) {
    CharacterState c;
    c.root_pos = vec3(field(j, "root_pos"));
    c.root_vel = vec3(field(j, "root_vel"));
    c.facing = vec2(field(j, "facing"));
    c.facing_rate = field(j, "facing_rate").get<double>();
    c.gait_phase = field(j, "gait_phase").get<double>();
    const json& feet = field(j, "feet");
    if (!feet.is_array() || feet.size() != 2) throw Error("trajectory record must list two feet");
    refresh_body_points(c);
    for (std::size_t i = 0; i < 2; ++i) {
        c.feet[i].pos = vec3(field(feet[i], "pos"));
        c.feet[i].vel = vec3(field(feet[i], "vel"));
        c.feet[i].contact = field(feet[i], "contact").get<bool>();
        c.feet[i].offset = vec3(field(feet[i], "offset"));
    }
    const json& s = field(j, "strike");
    c.strike.active = field(s, "active").get<bool>();
    c.strike.foot = field(s, "foot").get<std::string>() == "L" ? Side::left : Side::right;
    c.strike.direction = vec3(field(s, "direction"));
    c.strike.speed = field(s, "speed").get<double>();
    c.strike.travelled = field(s, "travelled").get<double>();
    c.strike.ticks = field(s, "ticks").get<int>();
    c.strike.cooldown_ticks = field(s, "cooldown_ticks").get<int>();
    return c;
}

json goal_json(const SkillGoal& g) {
    json j{{"skill", std::string(to_string(skill_of(g)))}};
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DribbleGoal>) {
                j["vel"] = vec(v.vel);
            } else if constexpr (std::is_same_v<T, TrapGoal>) {
                j["part"] = std::string(to_string(v.part));
            } else if constexpr (std::is_same_v<T, MoveGoal>) {
                j["vel"] = vec(v.vel);
                j["face"] = vec(v.face);
            } else {
                j["vel"] = vec(v.vel);
            }
        },
        g);
    return j;
}

SkillGoal goal_from(const json& j) {
    const std::string name = field(j, "skill").get<std::string>();
    switch (require(skill_from_string(name), "skill", name)) {
        case Skill::dribble: return DribbleGoal{vec2(field(j, "vel"))};
        case Skill::trap: {
            const std::string part = field(j, "part").get<std::string>();
            return TrapGoal{require(body_part_from_string(part), "body part", part)};
        }
        case Skill::move: return MoveGoal{vec2(field(j, "vel")), vec2(field(j, "face"))};
        case Skill::kick: return KickGoal{vec3(field(j, "vel"))};
    }
    throw Error("unknown goal");
}

json header_json(const TrajectoryHeader& h) {
    return {{"type", "header"},          {"format", "footsim-trajectory"}, {"version", h.version},
            {"config_hash", hex64(h.config_hash)}, {"seed", h.seed}, {"source", h.source},
            {"dt_control", h.dt_control}, {"modules", h.modules}, {"labels", h.labels}};
}

TrajectoryHeader header_from(const json& j) {
    if (field(j, "type").get<std::string>() != "header" || field(j, "format").get<std::string>() != "footsim-trajectory")
        throw Error("trajectory file must start with a footsim-trajectory header");
    TrajectoryHeader h;
    h.version = field(j, "version").get<int>();
    if (h.version != kTrajectoryFormatVersion)
        throw Error("unsupported trajectory format version " + std::to_string(h.version));
    h.config_hash = parse_hex64(field(j, "config_hash").get<std::string>());
    h.seed = field(j, "seed").get<std::uint64_t>();
    h.source = field(j, "source").get<std::string>();
    h.dt_control = field(j, "dt_control").get<double>();
    h.modules = field(j, "modules").get<std::map<std::string, std::string>>();
    h.labels = field(j, "labels").get<std::map<std::string, std::string>>();
    return h;
}

json frame_json(const TrajectoryFrame& f) {
    json players = json::array();
    for (const PlayerFrame& p : f.players) {
        json pj{{"id", p.id},
                {"character", character_json(p.character)},
                {"fsm", std::string(to_string(p.fsm))},
                {"goal", p.goal ? goal_json(*p.goal) : json(nullptr)},
                {"latent", nullptr},
                {"reward", p.reward},
                {"reward_terms", p.reward_terms}};
        if (p.latent) pj["latent"] = std::vector<double>(p.latent->values().begin(), p.latent->values().end());
        players.push_back(std::move(pj));
    }
    json events = json::array();
    for (const CollisionEvent& e : f.events) {
        events.push_back({{"tick", e.tick},
                          {"player", e.player},
                          {"part", std::string(to_string(e.part))},
                          {"kind", std::string(to_string(e.kind))},
                          {"pre_vel", vec(e.pre_vel)},
                          {"post_vel", vec(e.post_vel)},
                          {"degenerate", e.degenerate}});
    }
    json transitions = json::array();
    for (const TransitionRecord& t : f.transitions) {
        transitions.push_back({{"tick", t.tick},
                               {"player", t.player},
                               {"from", std::string(to_string(t.from))},
                               {"to", std::string(to_string(t.to))},
                               {"trigger", std::string(to_string(t.trigger))}});
    }
    return {{"type", "tick"},
            {"tick", f.tick},
            {"segment", f.segment},
            {"measured", f.measured},
            {"ball", f.ball ? ball_json(*f.ball) : json(nullptr)},
            {"players", players},
            {"events", events},
            {"transitions", transitions}};
}

TrajectoryFrame frame_from(const json& j) {
    if (field(j, "type").get<std::string>() != "tick") throw Error("expected a tick record");
    TrajectoryFrame f;
    f.tick = field(j, "tick").get<std::uint64_t>();
    f.segment = field(j, "segment").get<int>();
    f.measured = field(j, "measured").get<bool>();
    if (const json& b = field(j, "ball"); !b.is_null()) f.ball = ball_from(b);
    for (const json& pj : field(j, "players")) {
        PlayerFrame p;
        p.id = field(pj, "id").get<int>();
        p.character = character_from(field(pj, "character"));
        const std::string fsm = field(pj, "fsm").get<std::string>();
        p.fsm = require(fsm_state_from_string(fsm), "FSM state", fsm);
        if (const json& g = field(pj, "goal"); !g.is_null()) p.goal = goal_from(g);
        if (const json& z = field(pj, "latent"); !z.is_null()) p.latent = Latent::from_unit(z.get<std::vector<double>>());
        p.reward = field(pj, "reward").get<double>();
        p.reward_terms = field(pj, "reward_terms").get<std::map<std::string, double>>();
        f.players.push_back(std::move(p));
    }
    for (const json& ej : field(j, "events")) {
        CollisionEvent e;
        e.tick = field(ej, "tick").get<std::uint64_t>();
        e.player = field(ej, "player").get<int>();
        const std::string part = field(ej, "part").get<std::string>();
        e.part = require(contact_part_from_string(part), "contact part", part);
        const std::string kind = field(ej, "kind").get<std::string>();
        e.kind = require(collision_kind_from_string(kind), "collision kind", kind);
        e.pre_vel = vec3(field(ej, "pre_vel"));
        e.post_vel = vec3(field(ej, "post_vel"));
        e.degenerate = field(ej, "degenerate").get<bool>();
        f.events.push_back(e);
    }
    for (const json& tj : field(j, "transitions")) {
        TransitionRecord t;
        t.tick = field(tj, "tick").get<std::uint64_t>();
        t.player = field(tj, "player").get<int>();
        const std::string from = field(tj, "from").get<std::string>();
        const std::string to = field(tj, "to").get<std::string>();
        const std::string trig = field(tj, "trigger").get<std::string>();
        t.from = require(fsm_state_from_string(from), "FSM state", from);
        t.to = require(fsm_state_from_string(to), "FSM state", to);
        t.trigger = require(trigger_from_string(trig), "transition trigger", trig);
        f.transitions.push_back(t);
    }
    return f;
}

}  // namespace

void validate(const Trajectory& t) {
    for (std::size_t i = 1; i < t.frames.size(); ++i) {
        if (t.frames[i].tick <= t.frames[i - 1].tick)
            throw Error("trajectory ticks must strictly increase (tick " + std::to_string(t.frames[i].tick) + ")");
    }
}

std::string frame_to_json(const TrajectoryFrame& f) { return frame_json(f).dump(); }

TrajectoryFrame frame_from_json(const std::string& line) {
    try {
        return frame_from(json::parse(line));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed trajectory record: ") + e.what());
    }
}

TrajectoryWriter::TrajectoryWriter(std::ostream& os, const TrajectoryHeader& header) : os_(os) {
    os_ << header_json(header).dump() << '\n';
}

void TrajectoryWriter::write(const TrajectoryFrame& f) {
    if (last_tick_ && f.tick <= *last_tick_)
        throw Error("trajectory ticks must strictly increase (tick " + std::to_string(f.tick) + ")");
    last_tick_ = f.tick;
    os_ << frame_to_json(f) << '\n';
    ++count_;
}

void write_jsonl(std::ostream& os, const Trajectory& t) {
    TrajectoryWriter w(os, t.header);
    for (const auto& f : t.frames) w.write(f);
    if (!os) throw Error("failed to write trajectory");
}

Trajectory read_jsonl(std::istream& is) {
    Trajectory t;
    std::string line;
    if (!std::getline(is, line)) throw Error("empty trajectory file");
    try {
        t.header = header_from(json::parse(line));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed trajectory header: ") + e.what());
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        t.frames.push_back(frame_from_json(line));
    }
    validate(t);
    return t;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

std::uint64_t parse_hex64(std::string_view s) {
    if (s.empty() || s.size() > 16) throw Error("bad hex value '" + std::string(s) + "'");
    std::uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint64_t>(c - 'A' + 10);
        else throw Error("bad hex value '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace footsim
