#include <gtest/gtest.h>

#include <cmath>

#include "parabolica/annulus.hpp"
#include "parabolica/error.hpp"
#include "parabolica/unfolding.hpp"

using namespace parabolica;
using namespace parabolica::annulus;

namespace {

double mod1_distance(double v) { return std::abs(v - std::round(v)); }

// Closed-form flow of x' = x^2 + eps.
double riccati_flow(double eps, double x0, double t) {
    if (eps == 0.0) {
        return x0 / (1.0 - x0 * t);
    }
    double s = std::sqrt(eps);
    return s * std::tan(s * t + std::atan(x0 / s));
}

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::IOError;
}

AnnulusField field_at(double eps, double a = 0.0) { return {eps, a, 1e-12}; }

} // namespace

TEST(FirstHit, StartOnSection) {
    EXPECT_EQ(first_hit(field_at(0.01), {Loop::Minus, 0.0}), -1.0);
    EXPECT_EQ(first_hit(field_at(0.01), {Loop::Plus, 0.0}), 1.0);
}

TEST(FirstHit, MatchesClosedFormFlow) {
    for (double theta : {0.5, 0.1, 0.9}) {
        EXPECT_NEAR(first_hit(field_at(0.01), {Loop::Minus, theta}), riccati_flow(0.01, -1.0, 1.0 - theta), 1e-10);
        EXPECT_NEAR(first_hit(field_at(0.01), {Loop::Plus, theta}), riccati_flow(0.01, 1.0, -theta), 1e-10);
    }
}

TEST(FirstHit, ParabolicApproach) {
    double b = first_hit(field_at(0.0), {Loop::Minus, 0.25});
    EXPECT_GT(b, -1.0);
    EXPECT_LT(b, 0.0);
    EXPECT_NEAR(b, -1.0 / 1.75, 1e-10);
}

TEST(Canonical, BasePointIsZero) {
    EXPECT_EQ(canonical_coordinate(field_at(0.05), {Loop::Minus, 0.0}).phi.value(), 0.0);
    EXPECT_EQ(canonical_coordinate(field_at(0.05), {Loop::Plus, 0.0}).phi.value(), 0.0);
}

TEST(Canonical, DegreeOneMonotone) {
    for (Loop loop : {Loop::Minus, Loop::Plus}) {
        double total = 0.0;
        double prev = canonical_coordinate(field_at(0.05), {loop, 0.0}).phi.value();
        for (int i = 1; i <= 256; ++i) {
            double cur = canonical_coordinate(field_at(0.05), LoopPoint::on(loop, i / 256.0)).phi.value();
            double step = cur - prev;
            step -= std::round(step);
            // phi runs against the loop angle
            ASSERT_LT(step, 0.0) << i;
            total += step;
            prev = cur;
        }
        EXPECT_NEAR(std::abs(total), 1.0, 1e-9);
    }
}

TEST(Transition, RotationIdentity) {
    for (double a : {0.0, 0.3}) {
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            auto field = field_at(eps, a);
            double tau = unfolding::tau(unfolding::ModelUnfolding::standard(a), eps);
            double worst = 0.0;
            for (int i = 0; i < 64; ++i) {
                LoopPoint p{Loop::Minus, (i + 0.37) / 64.0};
                double lhs = canonical_coordinate(field, transition_map(field, p).landing).phi.value();
                double rhs = canonical_coordinate(field, p).phi.value() - tau;
                worst = std::max(worst, mod1_distance(lhs - rhs));
            }
            EXPECT_LT(worst, 1e-7) << a << " " << eps;
        }
    }
}

TEST(Transition, BasePointLandsAtMinusTau) {
    auto field = field_at(0.02);
    double tau = unfolding::tau(unfolding::ModelUnfolding::standard(), 0.02);
    auto t = transition_map(field, {Loop::Minus, 0.0});
    EXPECT_LT(mod1_distance(canonical_coordinate(field, t.landing).phi.value() + tau), 1e-8);
    EXPECT_NEAR(t.turns, tau, 1e-8);
}

TEST(Transition, StuckWithoutGap) {
    EXPECT_EQ(code_of([] { transition_map(field_at(0.0), {Loop::Minus, 0.2}); }), Errc::Stuck);
    EXPECT_EQ(code_of([] { transition_map(field_at(-0.01), {Loop::Minus, 0.2}); }), Errc::Stuck);
}

TEST(ReturnMap, ParabolicTimeOneFlow) {
    for (double x = -1.0; x <= -0.05; x += 0.0475) {
        EXPECT_NEAR(return_map(field_at(0.0), x), x / (1.0 - x), 1e-9) << x;
    }
}

TEST(ReturnMap, SplitCycleHasTwoFixedPoints) {
    auto fixed = return_map_fixed_points(field_at(-0.04), -0.5, 0.5, 101);
    ASSERT_EQ(fixed.size(), 2u);
    EXPECT_NEAR(fixed[0], -0.2, 1e-9);
    EXPECT_NEAR(fixed[1], 0.2, 1e-9);
}

TEST(Detect, MatchesConnectionRoots) {
    // phi^+(s^+) - phi^-(s^-) = 0.3
    LoopPoint s_minus{Loop::Minus, 0.1};
    LoopPoint s_plus{Loop::Plus, 0.8};
    auto found = detect_sparkling_connections(field_at(0.0), s_minus, s_plus, 0.01, 0.1, {512, 1e-11});
    auto model = unfolding::ModelUnfolding::standard();
    ASSERT_FALSE(found.empty());
    for (const auto& c : found) {
        double want = unfolding::solve_connection(model, [](double) { return 0.3; }, c.n, 0.2);
        EXPECT_NEAR(c.epsilon, want, 1e-6 * want) << c.n;
    }
    // roots counted from the monotone range of tau
    long expected = static_cast<long>(std::floor(unfolding::tau(model, 0.01) + 0.3)) -
                    static_cast<long>(std::ceil(unfolding::tau(model, 0.1) + 0.3)) + 1;
    EXPECT_EQ(static_cast<long>(found.size()), expected);
}

TEST(Detect, ChannelsDoNotShareRoots) {
    LoopAngles loops{{0.0, 0.7}, {0.95, 0.45}};
    auto events = detect_scenario(field_at(0.0), loops, 0.02, 0.1, {384, 1e-11});
    EXPECT_GT(events.size(), 8u);
    for (std::size_t i = 1; i < events.size(); ++i) {
        EXPECT_GT(events[i - 1].epsilon - events[i].epsilon, 1e-9 * events[i].epsilon);
    }
}

TEST(Detect, ReversalSymmetry) {
    auto direct = detect_sparkling_connections(field_at(0.0), {Loop::Minus, 0.15}, {Loop::Plus, 0.6}, 0.02, 0.1,
                                               {384, 1e-11});
    auto swapped = detect_sparkling_connections(field_at(0.0), {Loop::Minus, 0.4}, {Loop::Plus, 0.85}, 0.02, 0.1,
                                                {384, 1e-11});
    ASSERT_EQ(direct.size(), swapped.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(direct[i].n, swapped[i].n);
        EXPECT_NEAR(direct[i].epsilon, swapped[i].epsilon, 1e-8 * direct[i].epsilon);
    }
}

TEST(Detect, CoarseGridRejected) {
    EXPECT_EQ(code_of([] {
                  detect_sparkling_connections(field_at(0.0), {Loop::Minus, 0.1}, {Loop::Plus, 0.8}, 1e-4, 0.1,
                                               {8, 1e-11});
              }),
              Errc::GridTooCoarse);
}

TEST(LoopAnglesTest, ReproduceDifferenceTable) {
    auto pair = circle::CharacteristicPair{
        circle::validate_marked_set(std::span<const double>(std::vector<double>{0.2, 0.7}), {}),
        circle::validate_marked_set(std::span<const double>(std::vector<double>{0.1, 0.45}), {})};
    auto loops = loop_angles(pair);
    auto table = circle::difference_table(pair);
    auto field = field_at(0.03);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t m = 0; m < 2; ++m) {
            double phi_plus = canonical_coordinate(field, LoopPoint::on(Loop::Plus, loops.plus[k])).phi.value();
            double phi_minus = canonical_coordinate(field, LoopPoint::on(Loop::Minus, loops.minus[m])).phi.value();
            EXPECT_LT(mod1_distance(phi_plus - phi_minus - table(k, m)), 1e-9);
        }
    }
}
