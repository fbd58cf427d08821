#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace footsim {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// ---------------------------------------------------------------------------
// Planar and spatial vectors. z is the global up axis.

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(Vec3 o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(Vec3 o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr Vec2 xy() const { return {x, y}; }
};

constexpr Vec3 operator*(double s, Vec3 v) { return v * s; }
constexpr Vec3 lift(Vec2 v, double z = 0.0) { return {v.x, v.y, z}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
constexpr double norm_sq(Vec2 v) { return dot(v, v); }
constexpr double norm_sq(Vec3 v) { return dot(v, v); }

/// Unit vector in the direction of v, or `fallback` when v is (nearly) zero.
Vec2 normalized_or(Vec2 v, Vec2 fallback, double min_norm = 1e-12);
Vec3 normalized_or(Vec3 v, Vec3 fallback, double min_norm = 1e-12);

constexpr Vec2 rotate(Vec2 v, Vec2 unit_axis) {
    return {unit_axis.x * v.x - unit_axis.y * v.y, unit_axis.y * v.x + unit_axis.x * v.y};
}
inline Vec2 direction_from_angle(double rad) { return {std::cos(rad), std::sin(rad)}; }
inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }
/// Unsigned angle between two vectors in [0, pi]; zero if either is degenerate.
double angle_between(Vec2 a, Vec2 b);
double angle_between(Vec3 a, Vec3 b);
/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

bool is_finite(Vec2 v);
bool is_finite(Vec3 v);

// ---------------------------------------------------------------------------
// Character surrogate.

enum class BodyPart : std::uint8_t { head, torso, lower_leg_l, lower_leg_r, foot_l, foot_r };
inline constexpr std::array<BodyPart, 6> kBodyParts{BodyPart::head,        BodyPart::torso,
                                                    BodyPart::lower_leg_l, BodyPart::lower_leg_r,
                                                    BodyPart::foot_l,      BodyPart::foot_r};
std::string_view to_string(BodyPart part);
std::optional<BodyPart> body_part_from_string(std::string_view name);
constexpr std::size_t index_of(BodyPart part) { return static_cast<std::size_t>(part); }

enum class Side : std::uint8_t { left = 0, right = 1 };
constexpr std::size_t index_of(Side s) { return static_cast<std::size_t>(s); }
constexpr BodyPart foot_part(Side s) { return s == Side::left ? BodyPart::foot_l : BodyPart::foot_r; }

/// Fixed surrogate geometry. Offsets are expressed in the character frame
/// (x forward, y left) with z measured from the ground for an upright root.
namespace geometry {
inline constexpr double kPelvisHeight = 0.9;
inline constexpr Vec3 kHeadOffset{0.0, 0.0, 1.6};
inline constexpr Vec3 kTorsoOffset{0.0, 0.0, 1.2};
inline constexpr Vec3 kLowerLegOffset{0.0, 0.12, 0.35};  // mirrored in y for the right leg
inline constexpr Vec3 kFootOffset{0.0, 0.12, 0.05};      // before the gait offset
inline constexpr Vec3 kHandballOffset{0.0, 0.25, 1.25};  // mirrored in y for the right arm
inline constexpr double kHandballRadius = 0.12;

inline constexpr double kHeadRadius = 0.11;
inline constexpr double kTorsoRadius = 0.15;
inline constexpr double kPelvisRadius = 0.15;
inline constexpr double kLowerLegRadius = 0.08;
inline constexpr double kFootRadius = 0.08;
inline constexpr double kBodyClearance = 0.35;  // player-player horizontal separation radius

/// Base offset of a foot before gait motion.
constexpr Vec3 foot_base(Side s) {
    return {kFootOffset.x, s == Side::left ? kFootOffset.y : -kFootOffset.y, kFootOffset.z};
}
}  // namespace geometry

struct FootState {
    Vec3 pos;
    Vec3 vel;
    bool contact{true};
    /// Current gait displacement of the foot from its base, character frame.
    Vec3 offset;
};

/// Kinematic kick swing in progress.
struct StrikeState {
    bool active{false};
    Side foot{Side::right};
    Vec3 direction;  // world frame, unit
    double speed{0.0};
    double travelled{0.0};
    int ticks{0};
    int cooldown_ticks{0};
};

struct CharacterState {
    Vec3 root_pos{0.0, 0.0, geometry::kPelvisHeight};
    Vec3 root_vel;
    Vec2 facing{1.0, 0.0};
    double facing_rate{0.0};
    double gait_phase{0.0};
    std::array<FootState, 2> feet;
    std::array<Vec3, 6> body_points;
    std::array<Vec3, 2> handball_zones;
    double handball_radius{geometry::kHandballRadius};
    StrikeState strike;

    const Vec3& body_point(BodyPart part) const { return body_points[index_of(part)]; }
    const FootState& foot(Side s) const { return feet[index_of(s)]; }
    FootState& foot(Side s) { return feet[index_of(s)]; }
};

struct BallState {
    Vec3 pos{0.0, 0.0, 0.11};
    Vec3 vel;
    Vec3 ang_vel;
    double radius{0.11};
    double mass{0.45};
};

struct CharacterFrame {
    Vec2 origin;
    Vec2 x_axis{1.0, 0.0};
    Vec2 y_axis{0.0, 1.0};
};

enum class VecKind : std::uint8_t { point, vector };

/// Frame with the given origin and forward axis; the axis is normalized.
CharacterFrame make_frame(Vec2 origin, Vec2 facing);
CharacterFrame frame_of(const CharacterState& c);

Vec3 world_to_character(const CharacterFrame& frame, Vec3 v, VecKind kind);
Vec3 character_to_world(const CharacterFrame& frame, Vec3 v, VecKind kind);
Vec2 world_to_character(const CharacterFrame& frame, Vec2 v, VecKind kind);
Vec2 character_to_world(const CharacterFrame& frame, Vec2 v, VecKind kind);

/// Recomputes body points, feet positions and handball zones from the root,
/// facing and per-foot gait offsets. A striking foot keeps its position.
void refresh_body_points(CharacterState& c);

/// Upright, motionless character standing at `position` facing `facing`.
CharacterState rest_pose(Vec2 position = {}, Vec2 facing = {1.0, 0.0});

/// True if the horizontal ball-root distance is strictly decreasing.
/// Returns false when the two are horizontally colocated (within 1e-6 m).
bool approaching(const BallState& ball, const CharacterState& c);

double horizontal_distance(const BallState& ball, const CharacterState& c);

void validate(const CharacterState& c);
void validate(const BallState& b, double penetration_tol = 1e-4);

}  // namespace footsim
