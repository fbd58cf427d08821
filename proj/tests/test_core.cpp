#include "doctest.h"

#include "footsim/core.hpp"
#include "footsim/rng.hpp"

using namespace footsim;

namespace {
void check_close(Vec3 a, Vec3 b, double tol) {
    CHECK(std::abs(a.x - b.x) <= tol);
    CHECK(std::abs(a.y - b.y) <= tol);
    CHECK(std::abs(a.z - b.z) <= tol);
}
}  // namespace

TEST_CASE("frame transforms on hand-checked inputs") {
    const CharacterFrame id = make_frame({0, 0}, {1, 0});
    CHECK(world_to_character(id, Vec3{2, 0, 1}, VecKind::point) == Vec3{2, 0, 1});

    const CharacterFrame left = make_frame({0, 0}, {0, 1});
    const Vec3 v = world_to_character(left, Vec3{0, 1, 0}, VecKind::vector);
    CHECK(std::abs(v.x - 1.0) < 1e-15);
    CHECK(std::abs(v.y) < 1e-15);

    const CharacterFrame shifted = make_frame({3, 4}, {1, 0});
    CHECK(world_to_character(shifted, Vec3{3, 4, 0.9}, VecKind::point) == Vec3{0, 0, 0.9});

    const Vec3 w = character_to_world(left, Vec3{1, 0, 0}, VecKind::vector);
    CHECK(std::abs(w.x) < 1e-15);
    CHECK(std::abs(w.y - 1.0) < 1e-15);

    // Vectors ignore the origin.
    CHECK(world_to_character(shifted, Vec3{1, 0, 0}, VecKind::vector) == Vec3{1, 0, 0});
}

TEST_CASE("frame round trips on random frames") {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const CharacterFrame f = make_frame(rng.in_disc(50.0), rng.unit_circle());
        const Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0, 3)};
        const VecKind kind = (i % 2) ? VecKind::point : VecKind::vector;
        const Vec3 back = world_to_character(f, character_to_world(f, p, kind), kind);
        REQUIRE(norm(back - p) < 1e-9);
    }
    const CharacterFrame f = make_frame({0, 0}, {0.6, 0.8});
    const Vec3 p{1.3, -0.2, 0.5};
    check_close(character_to_world(f, world_to_character(f, p, VecKind::point), VecKind::point), p, 1e-9);
}

TEST_CASE("approaching predicate") {
    BallState b;
    b.pos = {5, 0, 0.11};
    b.vel = {-1, 0, 0};
    CharacterState c = rest_pose();
    CHECK(approaching(b, c));
    b.vel = {0, 1, 0};
    CHECK_FALSE(approaching(b, c));
    b.vel = {-1, 0, 0};
    c.root_vel = {-2, 0, 0};
    CHECK_FALSE(approaching(b, c));

    SUBCASE("colocated ball is never approaching") {
        b.pos = {0, 0, 0.11};
        c.root_vel = {};
        CHECK_FALSE(approaching(b, c));
    }
    SUBCASE("negating the relative velocity flips the answer") {
        Rng rng(3);
        for (int i = 0; i < 1000; ++i) {
            BallState bb;
            bb.pos = lift(rng.in_disc(10.0), 0.11);
            bb.vel = lift(rng.in_disc(10.0));
            CharacterState cc = rest_pose(rng.in_disc(10.0), rng.unit_circle());
            cc.root_vel = lift(rng.in_disc(5.0));
            const Vec2 d = bb.pos.xy() - cc.root_pos.xy();
            const Vec2 w = bb.vel.xy() - cc.root_vel.xy();
            if (std::abs(dot(d, w)) < 1e-9) continue;
            BallState flipped = bb;
            flipped.vel = lift(cc.root_vel.xy() - w);
            CHECK(approaching(bb, cc) != approaching(flipped, cc));
        }
    }
}

TEST_CASE("body points are rigid under rotation") {
    Rng rng(5);
    const CharacterState ref = rest_pose();
    for (int i = 0; i < 500; ++i) {
        const CharacterState c = rest_pose(rng.in_disc(30.0), rng.unit_circle());
        for (BodyPart p : kBodyParts) {
            const double d_ref = norm(ref.body_point(p) - ref.root_pos);
            const double d = norm(c.body_point(p) - c.root_pos);
            REQUIRE(std::abs(d - d_ref) < 1e-9);
        }
    }
    CHECK(ref.body_point(BodyPart::head).z == doctest::Approx(1.6));
    CHECK(ref.body_point(BodyPart::foot_l).y == doctest::Approx(0.12));
    CHECK(ref.body_point(BodyPart::foot_r).y == doctest::Approx(-0.12));
}

TEST_CASE("body part names") {
    for (BodyPart p : kBodyParts) CHECK(body_part_from_string(to_string(p)) == p);
    CHECK_FALSE(body_part_from_string("elbow").has_value());
}

TEST_CASE("state validation") {
    CharacterState c = rest_pose();
    CHECK_NOTHROW(validate(c));
    c.facing = {2, 0};
    CHECK_THROWS_AS(validate(c), Error);
    BallState b;
    CHECK_NOTHROW(validate(b));
    b.pos.z = 0.05;
    CHECK_THROWS_AS(validate(b), Error);
}

TEST_CASE("rng is reproducible and serializable") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    const std::string s = a.state();
    const double x = a.uniform();
    Rng c;
    c.set_state(s);
    CHECK(c.uniform() == x);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = a.index(7);
        CHECK(k < 7);
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
