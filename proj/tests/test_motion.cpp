#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "crowddiff/motion.hpp"
#include "crowddiff/rng.hpp"

using namespace crowddiff;

TEST(Pursuit, RegionIUnitVector) {
    const Vec2 va = pursuit_avoidance_velocity({0.0, 0.0}, {3.0, 4.0}, Region::I, {0.0, -1.0}, 1.0,
                                               2.0, 2.0);
    EXPECT_DOUBLE_EQ(va.x, 0.6);
    EXPECT_DOUBLE_EQ(va.y, 0.8);
    EXPECT_NEAR(va.norm(), 1.0, 1e-12);
}

TEST(Pursuit, RegionIIBlend) {
    // pursuit (1,0), wall point straight below at distance 1, d=2, eta=2
    const Vec2 va = pursuit_avoidance_velocity({0.0, 1.0}, {10.0, 1.0}, Region::II, {0.0, 0.0}, 1.0,
                                               2.0, 2.0);
    EXPECT_DOUBLE_EQ(va.x, 0.5);
    EXPECT_DOUBLE_EQ(va.y, 1.0);
}

TEST(Pursuit, RegionIIIZero) {
    const Vec2 va = pursuit_avoidance_velocity({1.0, 1.0}, {1.0, 1.0}, Region::III, {1.0, 1.0}, 0.0,
                                               2.0, 2.0);
    EXPECT_DOUBLE_EQ(va.x, 0.0);
    EXPECT_DOUBLE_EQ(va.y, 0.0);
}

TEST(Pursuit, DegenerateInputsThrow) {
    EXPECT_THROW(pursuit_avoidance_velocity({1.0, 1.0}, {1.0, 1.0}, Region::I, {0.0, 0.0}, 1.0, 2.0, 2.0),
                 GeometryError);
    EXPECT_THROW(pursuit_avoidance_velocity({1.0, 1.0}, {5.0, 1.0}, Region::II, {1.0, 1.0}, 0.0, 2.0, 2.0),
                 GeometryError);
}

TEST(Delta, EquilibriumAtDesiredDistance) {
    const std::vector<Vec2> pos = {{0.0, 0.0}, {3.0, 0.0}};
    const std::vector<int> nbrs = {0, 1};
    const Vec2 d0 = local_distance_term(0, pos, nbrs, 3.0);
    const Vec2 d1 = local_distance_term(1, pos, nbrs, 3.0);
    EXPECT_LE(d0.norm(), 1e-12);
    EXPECT_LE(d1.norm(), 1e-12);
}

TEST(Delta, RepulsionWhenClose) {
    const std::vector<Vec2> pos = {{0.0, 0.0}, {1.5, 0.0}};
    const std::vector<int> nbrs = {0, 1};
    const Vec2 d = local_distance_term(0, pos, nbrs, 3.0);
    EXPECT_DOUBLE_EQ(d.x, -1.5);
    EXPECT_DOUBLE_EQ(d.y, 0.0);
}

TEST(Delta, AttractionWhenFar) {
    const std::vector<Vec2> pos = {{0.0, 0.0}, {6.0, 0.0}};
    const std::vector<int> nbrs = {0, 1};
    const Vec2 d = local_distance_term(0, pos, nbrs, 3.0);
    EXPECT_DOUBLE_EQ(d.x, 3.0);
    EXPECT_DOUBLE_EQ(d.y, 0.0);
}

TEST(Delta, IsolatedAgentZero) {
    const std::vector<Vec2> pos = {{0.0, 0.0}};
    const std::vector<int> nbrs = {0};
    const Vec2 d = local_distance_term(0, pos, nbrs, 3.0);
    EXPECT_DOUBLE_EQ(d.x, 0.0);
    EXPECT_DOUBLE_EQ(d.y, 0.0);
}

TEST(Delta, CoincidentNeighborsThrow) {
    const std::vector<Vec2> pos = {{1.0, 1.0}, {1.0, 1.0}};
    const std::vector<int> nbrs = {0, 1};
    EXPECT_THROW(local_distance_term(0, pos, nbrs, 3.0), GeometryError);
}

TEST(Avid, StandardTermsAtBoundary) {
    const AvidPair p = avid_update(16.0, 16.0, 3.0, 2.0, 2.0, 4.0);
    EXPECT_DOUBLE_EQ(p.r, 3.0);
    EXPECT_DOUBLE_EQ(p.alpha, 2.0);
}

TEST(Avid, MidpointInterpolation) {
    const AvidPair p = avid_update(8.0, 16.0, 3.0, 2.0, 2.0, 4.0);
    EXPECT_DOUBLE_EQ(p.r, 2.5);
    EXPECT_DOUBLE_EQ(p.alpha, 3.0);
}

TEST(Avid, VanishingWidthEndpoint) {
    const AvidPair p = avid_update(1e-300, 16.0, 3.0, 2.0, 2.0, 4.0);
    EXPECT_DOUBLE_EQ(p.r, 2.0);
    EXPECT_DOUBLE_EQ(p.alpha, 4.0);
}

TEST(Avid, MonotoneAndBoundedOnGrid) {
    constexpr int kPoints = 1000;
    const double ls = 16.0;
    double prev_r = -1e300;
    double prev_a = 1e300;
    for (int i = 1; i <= kPoints; ++i) {
        const double lc = 2.0 * ls * i / kPoints;
        const AvidPair p = avid_update(lc, ls, 3.0, 2.0, 2.0, 4.0);
        EXPECT_GE(p.r + 1e-15, prev_r);
        EXPECT_LE(p.alpha - 1e-15, prev_a);
        EXPECT_GE(p.r, 2.0);
        EXPECT_LE(p.r, 3.0);
        EXPECT_GE(p.alpha, 2.0);
        EXPECT_LE(p.alpha, 4.0);
        prev_r = p.r;
        prev_a = p.alpha;
    }
    // continuity at the standard width
    const AvidPair just_below = avid_update(ls - 1e-9, ls, 3.0, 2.0, 2.0, 4.0);
    EXPECT_NEAR(just_below.r, 3.0, 1e-9);
    EXPECT_NEAR(just_below.alpha, 2.0, 1e-9);
}

TEST(Compose, ReferenceExample) {
    const Vec2 v = compose_velocity({1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, 0.5, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(v.x, 1.0);
    EXPECT_DOUBLE_EQ(v.y, 0.5);
}

TEST(Compose, AllZero) {
    const Vec2 v = compose_velocity({0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, 0.5, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(v.x, 0.0);
    EXPECT_DOUBLE_EQ(v.y, 0.0);
}

TEST(Compose, LambdaOneDropsCoherence) {
    const Vec2 v = compose_velocity({1.0, 0.0}, {5.0, 5.0}, {0.5, -0.5}, 1.0, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(v.x, 2.0 + 1.0);
    EXPECT_DOUBLE_EQ(v.y, -1.0);
}

TEST(Compose, LinearSuperposition) {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        auto rv = [&rng]() { return Vec2{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}; };
        const Vec2 va1 = rv(), va2 = rv(), vg = rv(), del = rv();
        const Vec2 lhs = compose_velocity(va1 + va2, vg, del, 0.5, 2.0, 2.0);
        const Vec2 rhs = compose_velocity(va1, vg, del, 0.5, 2.0, 2.0) +
                         compose_velocity(va2, {0.0, 0.0}, {0.0, 0.0}, 0.5, 2.0, 2.0);
        EXPECT_NEAR(lhs.x, rhs.x, 1e-12);
        EXPECT_NEAR(lhs.y, rhs.y, 1e-12);
    }
}

TEST(Integrate, ForwardStepInside) {
    const Corridor c(make_wall({6.0}, WallSide::Upper), make_wall({0.0}, WallSide::Lower), -10.0, 10.0);
    const IntegrationResult res = integrate_position({0.0, 0.0}, {2.0, 2.0}, 0.5, c);
    EXPECT_DOUBLE_EQ(res.position.x, 1.0);
    EXPECT_DOUBLE_EQ(res.position.y, 1.0);
    EXPECT_FALSE(res.frozen);
    EXPECT_DOUBLE_EQ(res.velocity.x, 2.0);
}

TEST(Integrate, BlockedStepFreezes) {
    const Corridor c(make_wall({6.0}, WallSide::Upper), make_wall({0.0}, WallSide::Lower), -10.0, 10.0);
    const IntegrationResult res = integrate_position({0.0, 5.0}, {0.0, 4.0}, 0.5, c);
    EXPECT_DOUBLE_EQ(res.position.x, 0.0);
    EXPECT_DOUBLE_EQ(res.position.y, 5.0);
    EXPECT_TRUE(res.frozen);
    EXPECT_DOUBLE_EQ(res.velocity.x, 0.0);
    EXPECT_DOUBLE_EQ(res.velocity.y, 0.0);
}

TEST(Integrate, ZeroVelocityIdentity) {
    const Corridor c(make_wall({6.0}, WallSide::Upper), make_wall({0.0}, WallSide::Lower), -10.0, 10.0);
    const IntegrationResult res = integrate_position({2.0, 3.0}, {0.0, 0.0}, 0.5, c);
    EXPECT_DOUBLE_EQ(res.position.x, 2.0);
    EXPECT_DOUBLE_EQ(res.position.y, 3.0);
    EXPECT_FALSE(res.frozen);
}
