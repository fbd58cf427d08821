#include "footsim/core.hpp"

#include <algorithm>

namespace footsim {

Vec2 normalized_or(Vec2 v, Vec2 fallback, double min_norm) {
    const double n = norm(v);
    return n > min_norm ? v / n : fallback;
}

Vec3 normalized_or(Vec3 v, Vec3 fallback, double min_norm) {
    const double n = norm(v);
    return n > min_norm ? v / n : fallback;
}

double angle_between(Vec2 a, Vec2 b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

double angle_between(Vec3 a, Vec3 b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

double wrap_angle(double rad) {
    double r = std::remainder(rad, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }
bool is_finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

std::string_view to_string(BodyPart part) {
    switch (part) {
        case BodyPart::head: return "head";
        case BodyPart::torso: return "torso";
        case BodyPart::lower_leg_l: return "lower_leg_L";
        case BodyPart::lower_leg_r: return "lower_leg_R";
        case BodyPart::foot_l: return "foot_L";
        case BodyPart::foot_r: return "foot_R";
    }
    return "?";
}

std::optional<BodyPart> body_part_from_string(std::string_view name) {
    for (BodyPart p : kBodyParts) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

CharacterFrame make_frame(Vec2 origin, Vec2 facing) {
    const Vec2 x = normalized_or(facing, {1.0, 0.0});
    return {origin, x, {-x.y, x.x}};
}

CharacterFrame frame_of(const CharacterState& c) { return make_frame(c.root_pos.xy(), c.facing); }

Vec3 world_to_character(const CharacterFrame& f, Vec3 v, VecKind kind) {
    Vec2 d = v.xy();
    if (kind == VecKind::point) d -= f.origin;
    return {dot(d, f.x_axis), dot(d, f.y_axis), v.z};
}

Vec3 character_to_world(const CharacterFrame& f, Vec3 v, VecKind kind) {
    Vec2 d = f.x_axis * v.x + f.y_axis * v.y;
    if (kind == VecKind::point) d += f.origin;
    return {d.x, d.y, v.z};
}

Vec2 world_to_character(const CharacterFrame& f, Vec2 v, VecKind kind) {
    return world_to_character(f, lift(v), kind).xy();
}

Vec2 character_to_world(const CharacterFrame& f, Vec2 v, VecKind kind) {
    return character_to_world(f, lift(v), kind).xy();
}

namespace {

Vec3 mirror_y(Vec3 v) { return {v.x, -v.y, v.z}; }

Vec3 place(const CharacterState& c, const CharacterFrame& f, Vec3 offset) {
    const double dz = c.root_pos.z - geometry::kPelvisHeight;
    Vec3 p = character_to_world(f, offset, VecKind::point);
    p.z += dz;
    return p;
}

}  // namespace

void refresh_body_points(CharacterState& c) {
    const CharacterFrame f = frame_of(c);
    c.body_points[index_of(BodyPart::head)] = place(c, f, geometry::kHeadOffset);
    c.body_points[index_of(BodyPart::torso)] = place(c, f, geometry::kTorsoOffset);
    c.body_points[index_of(BodyPart::lower_leg_l)] = place(c, f, geometry::kLowerLegOffset);
    c.body_points[index_of(BodyPart::lower_leg_r)] = place(c, f, mirror_y(geometry::kLowerLegOffset));
    for (Side s : {Side::left, Side::right}) {
        FootState& foot = c.foot(s);
        const bool striking = c.strike.active && c.strike.foot == s;
        if (!striking) {
            Vec3 p = place(c, f, geometry::foot_base(s) + foot.offset);
            p.z = std::max(0.0, p.z);
            foot.pos = p;
        }
        c.body_points[index_of(foot_part(s))] = foot.pos;
    }
    c.handball_zones[0] = place(c, f, geometry::kHandballOffset);
    c.handball_zones[1] = place(c, f, mirror_y(geometry::kHandballOffset));
}

CharacterState rest_pose(Vec2 position, Vec2 facing) {
    CharacterState c;
    c.root_pos = {position.x, position.y, geometry::kPelvisHeight};
    c.facing = normalized_or(facing, {1.0, 0.0});
    for (auto& foot : c.feet) {
        foot.offset = {};
        foot.contact = true;
    }
    refresh_body_points(c);
    return c;
}

bool approaching(const BallState& ball, const CharacterState& c) {
    const Vec2 d = ball.pos.xy() - c.root_pos.xy();
    if (norm(d) <= 1e-6) return false;
    const Vec2 w = ball.vel.xy() - c.root_vel.xy();
    return dot(d, w) < 0.0;
}

double horizontal_distance(const BallState& ball, const CharacterState& c) {
    return norm(ball.pos.xy() - c.root_pos.xy());
}

void validate(const CharacterState& c) {
    if (!is_finite(c.root_pos) || !is_finite(c.root_vel) || !is_finite(c.facing))
        throw Error("character state is not finite");
    if (std::abs(norm(c.facing) - 1.0) > 1e-9) throw Error("character facing is not a unit vector");
    if (c.root_pos.z < 0.0) throw Error("character root below ground");
}

void validate(const BallState& b, double penetration_tol) {
    if (!is_finite(b.pos) || !is_finite(b.vel) || !is_finite(b.ang_vel))
        throw Error("ball state is not finite");
    if (b.radius <= 0.0 || b.mass <= 0.0) throw Error("ball radius and mass must be positive");
    if (b.pos.z < b.radius - penetration_tol) throw Error("ball penetrates the ground");
}

}  // namespace footsim
