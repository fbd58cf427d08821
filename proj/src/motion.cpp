#include "footsim/motion.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace footsim {

namespace {
std::atomic<std::size_t> g_normalization_warnings{0};
constexpr const char* kDegclMagic = "footsim-degcl";
constexpr int kDegclVersion = 1;
}  // namespace

Latent Latent::from_raw(std::vector<double> raw) {
    double sq = 0.0;
    for (double v : raw) sq += v * v;
    const double n = std::sqrt(sq);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error("latent has zero or non-finite norm");
    for (double& v : raw) v /= n;
    Latent z;
    z.z_ = std::move(raw);
    return z;
}

Latent Latent::from_unit(std::vector<double> unit) {
    double sq = 0.0;
    for (double v : unit) sq += v * v;
    if (!(std::abs(std::sqrt(sq) - 1.0) <= 1e-9)) throw Error("latent is not unit length");
    Latent z;
    z.z_ = std::move(unit);
    return z;
}

double dot(const Latent& a, const Latent& b) {
    if (a.dim() != b.dim()) throw Error("latent dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

std::size_t decode_normalization_warnings() { return g_normalization_warnings.load(); }

GaitParams decode(std::span<const double> raw, const MotionConfig& cfg) {
    if (raw.size() < channel::kUsed) throw Error("latent dimension below decoder channel count");
    double sq = 0.0;
    for (double v : raw) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-9) g_normalization_warnings.fetch_add(1);

    const double face_c = raw[channel::kFaceCos];
    const double face_s = raw[channel::kFaceSin];
    const double scale = std::max(std::hypot(face_c, face_s), cfg.min_face_channel);
    auto read = [&](std::size_t ch) { return raw[ch] / scale; };

    GaitParams g;
    const Vec2 vel{read(channel::kVelX), read(channel::kVelY)};
    g.heading = norm(vel) > 1e-12 ? angle_of(vel) : 0.0;
    g.target_speed = std::clamp(read(channel::kSpeed), 0.0, gait_limits::kMaxSpeed);
    const double face_err = (face_c == 0.0 && face_s == 0.0) ? 0.0 : std::atan2(face_s, face_c);
    g.facing_rate = std::clamp(cfg.facing_gain * face_err, -gait_limits::kMaxFacingRate,
                               gait_limits::kMaxFacingRate);
    g.step_frequency = std::clamp(1.2 + 0.3 * g.target_speed, gait_limits::kMinStepFrequency,
                                  gait_limits::kMaxStepFrequency);
    g.step_length_scale = std::clamp(g.target_speed / 4.0, 0.0, 1.0);

    if (read(channel::kStrikeTrigger) > cfg.strike_threshold) {
        g.kick.active = true;
        g.kick.speed = std::clamp(read(channel::kStrikeSpeed), 0.0, gait_limits::kMaxStrikeSpeed);
        const double code = read(channel::kStrikeElevation);
        double elevation = code;
        if (code < 0.0) {
            g.kick.foot = Side::left;
            elevation = -code - cfg.left_foot_code_offset;
        } else {
            g.kick.foot = Side::right;
        }
        elevation = std::clamp(elevation, 0.0, gait_limits::kMaxStrikeElevation);
        const double ce = std::cos(elevation);
        g.kick.direction = {ce * std::cos(g.heading), ce * std::sin(g.heading), std::sin(elevation)};
    }
    return g;
}

GaitParams decode(const Latent& z, const MotionConfig& cfg) { return decode(z.values(), cfg); }

Latent encode_gait(const GaitParams& g, const MotionConfig& cfg) {
    std::vector<double> f(std::max(cfg.latent_dim, channel::kUsed), 0.0);
    const double speed = std::clamp(g.target_speed, 0.0, gait_limits::kMaxSpeed);
    // A small floor keeps the heading readable at zero speed; the strike yaw
    // is read from it.
    const double reach = std::max(speed, 1e-3);
    f[channel::kVelX] = reach * std::cos(g.heading);
    f[channel::kVelY] = reach * std::sin(g.heading);
    const double face_err =
        std::clamp(g.facing_rate, -gait_limits::kMaxFacingRate, gait_limits::kMaxFacingRate) /
        cfg.facing_gain;
    f[channel::kFaceCos] = std::cos(face_err);
    f[channel::kFaceSin] = std::sin(face_err);
    f[channel::kSpeed] = speed;
    if (g.kick.active) {
        f[channel::kStrikeTrigger] = 1.0;
        f[channel::kStrikeSpeed] = std::clamp(g.kick.speed, 0.0, gait_limits::kMaxStrikeSpeed);
        const Vec3 d = normalized_or(g.kick.direction, {1.0, 0.0, 0.0});
        const double elevation = std::clamp(std::atan2(d.z, norm(d.xy())), 0.0,
                                            gait_limits::kMaxStrikeElevation);
        f[channel::kStrikeElevation] =
            g.kick.foot == Side::right ? elevation : -(elevation + cfg.left_foot_code_offset);
    }
    return Latent::from_raw(std::move(f));
}

Latent encode(const MoveRefGoal& goal, const MotionConfig& cfg) {
    const double fn = norm(goal.face_dir);
    if (!(fn > 1e-12) || !is_finite(goal.move_vel)) throw Error("degenerate goal");
    const Vec2 face = goal.face_dir / fn;
    std::vector<double> f(std::max(cfg.latent_dim, channel::kUsed), 0.0);
    f[channel::kVelX] = goal.move_vel.x;
    f[channel::kVelY] = goal.move_vel.y;
    f[channel::kFaceCos] = face.x;
    f[channel::kFaceSin] = face.y;
    f[channel::kSpeed] = norm(goal.move_vel);
    return Latent::from_raw(std::move(f));
}

DegclBuffer build_degcl_buffer(const MotionConfig& cfg) {
    struct Primitive {
        const char* name;
        double speed;
        double direction_deg;
    };
    // Mirrored on-axis clips have the same direction as their originals; their
    // average speeds differ so every reference goal stays distinct.
    static constexpr Primitive kPrimitives[] = {
        {"forward_walk", 1.5, 0.0},            {"forward_jog", 3.0, 0.0},
        {"forward_run", 5.0, 0.0},             {"backward_walk", 1.2, 180.0},
        {"backward_jog", 2.5, 180.0},          {"lateral_walk_left", 1.2, 90.0},
        {"forward_diag_jog_left", 3.0, 45.0},  {"backward_diag_jog_left", 2.5, 135.0},
        {"forward_walk_mirror", 1.6, 0.0},     {"forward_jog_mirror", 3.2, 0.0},
        {"forward_run_mirror", 5.4, 0.0},      {"backward_walk_mirror", 1.3, 180.0},
        {"backward_jog_mirror", 2.7, 180.0},   {"lateral_walk_right", 1.2, -90.0},
        {"forward_diag_jog_right", 3.0, -45.0}, {"backward_diag_jog_right", 2.5, -135.0},
    };
    DegclBuffer buf;
    for (const auto& p : kPrimitives) {
        DegclPair pair;
        pair.name = p.name;
        const double a = deg_to_rad(p.direction_deg);
        // Exact axis values keep the lateral primitives exactly perpendicular to facing.
        Vec2 dir = direction_from_angle(a);
        if (p.direction_deg == 90.0) dir = {0.0, 1.0};
        if (p.direction_deg == -90.0) dir = {0.0, -1.0};
        if (p.direction_deg == 180.0) dir = {-1.0, 0.0};
        pair.ref_goal = {dir * p.speed, {1.0, 0.0}};
        pair.ref_latent = encode(pair.ref_goal, cfg);
        buf.pairs.push_back(std::move(pair));
    }
    return buf;
}

void write_degcl(std::ostream& os, const DegclBuffer& buf) {
    const std::size_t dim = buf.pairs.empty() ? 0 : buf.pairs.front().ref_latent.dim();
    os << kDegclMagic << ' ' << kDegclVersion << ' ' << buf.size() << ' ' << dim << '\n';
    os.precision(17);
    for (const auto& p : buf.pairs) {
        os << p.name << ' ' << p.ref_goal.move_vel.x << ' ' << p.ref_goal.move_vel.y << ' '
           << p.ref_goal.face_dir.x << ' ' << p.ref_goal.face_dir.y;
        for (double v : p.ref_latent.values()) os << ' ' << v;
        os << '\n';
    }
}

DegclBuffer read_degcl(std::istream& is) {
    std::string magic;
    int version = 0;
    std::size_t count = 0;
    std::size_t dim = 0;
    if (!(is >> magic >> version >> count >> dim) || magic != kDegclMagic)
        throw Error("not a DEGCL buffer file");
    if (version != kDegclVersion) throw Error("unsupported DEGCL buffer version");
    DegclBuffer buf;
    for (std::size_t i = 0; i < count; ++i) {
        DegclPair p;
        if (!(is >> p.name >> p.ref_goal.move_vel.x >> p.ref_goal.move_vel.y >>
              p.ref_goal.face_dir.x >> p.ref_goal.face_dir.y))
            throw Error("truncated DEGCL buffer file");
        std::vector<double> z(dim);
        for (double& v : z) {
            if (!(is >> v)) throw Error("truncated DEGCL buffer file");
        }
        p.ref_latent = Latent::from_unit(std::move(z));
        buf.pairs.push_back(std::move(p));
    }
    return buf;
}

}  // namespace footsim
