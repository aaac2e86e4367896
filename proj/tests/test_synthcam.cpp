#include "support.hpp"

#include "vog/stimulus.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace vog;

TEST(SaccadeProfile, Examples)
{
    for (double t : {0.0, 10.0, 100.0})
        EXPECT_EQ(saccade_profile(0.0, t), 0.0);
    for (double t : {43.0, 43.5, 60.0, 1000.0})
        EXPECT_EQ(saccade_profile(10.0, t), 10.0);
    EXPECT_NEAR(saccade_profile(10.0, 21.5), 5.0, 1e-12);
    EXPECT_EQ(saccade_profile(10.0, 0.0), 0.0);
    EXPECT_THROW(saccade_profile(10.0, -1.0), Error);
    EXPECT_THROW(saccade_profile(-1.0, 5.0), Error);
}

TEST(SaccadeProfile, MonotoneWithFlatEnds)
{
    double prev = 0.0;
    for (double t = 0.0; t <= 43.0; t += 0.25) {
        const double p = saccade_profile(10.0, t);
        EXPECT_GE(p, prev);
        prev = p;
    }
    EXPECT_LT(saccade_profile(10.0, 0.5), 0.01);
    EXPECT_GT(saccade_profile(10.0, 42.5), 9.99);
}

TEST(Wobble, PeakEqualsAmplitude)
{
    double peak = 0.0;
    for (double t = 0.0; t < 200.0; t += 0.01)
        peak = std::max(peak, std::abs(wobble(0.3, 20.0, 30.0, t)));
    EXPECT_NEAR(peak, 0.3, 1e-4);
    EXPECT_EQ(wobble(0.0, 20.0, 30.0, 12.0), 0.0);
    EXPECT_EQ(wobble(0.3, 20.0, 30.0, -1.0), 0.0);
}

TEST(Render, ZeroOffsetPutsP4AtPupilCenter)
{
    const auto r = render_frame(EyeState{}, {}, CameraModel{}, 0.0, 1);
    EXPECT_EQ(r.truth.p4_center, (Point2d{256.0, 160.0}));
    EXPECT_EQ(r.truth.pupil_center, (Point2d{256.0, 160.0}));
    EXPECT_EQ(r.frame.width, 512);
    EXPECT_EQ(r.frame.height, 320);
}

TEST(Render, LayerOrder)
{
    EyeState eye;
    eye.p4_offset = {-15.0, 12.0};
    const auto r = render_frame(eye, {}, CameraModel{}, 0.0, 1);
    EXPECT_EQ(r.frame.at(256, 160), 20);  // pupil body
    EXPECT_EQ(r.frame.at(100, 100), 120); // iris
    EXPECT_EQ(r.frame.at(266, 150), 250); // P1 on top of the pupil edge region
    EXPECT_EQ(r.frame.at(241, 172), 55);  // P4 inside the pupil
}

TEST(Render, OutOfBoundsGeometry)
{
    EyeState eye;
    eye.pupil_center = {20.0, 160.0};
    try {
        render_frame(eye, {}, CameraModel{}, 0.0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GeometryOutOfBounds);
    }
}

TEST(Render, SeedDeterminism)
{
    const auto a = render_frame(EyeState{}, {}, CameraModel{}, 4.0, 77);
    const auto b = render_frame(EyeState{}, {}, CameraModel{}, 4.0, 77);
    const auto c = render_frame(EyeState{}, {}, CameraModel{}, 4.0, 78);
    EXPECT_EQ(a.frame.pixels, b.frame.pixels);
    EXPECT_NE(a.frame.pixels, c.frame.pixels);
}

TEST(Render, NoiseHasRequestedSigma)
{
    EyeState eye;
    const auto r = render_frame(eye, {}, CameraModel{}, 5.0, 3);
    double s = 0, s2 = 0;
    int n = 0;
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 150; ++x) {
            const double d = r.frame.at(x, y) - 120.0;
            s += d;
            s2 += d * d;
            ++n;
        }
    EXPECT_NEAR(s / n, 0.0, 0.1);
    EXPECT_NEAR(std::sqrt(s2 / n), 5.0, 0.15);
}

TEST(Timestamps, TwoDistinctIntervals)
{
    const auto ts = simulate_timestamps(CameraModel{}, 5000, 4);
    std::set<long long> intervals_ns;
    for (std::size_t i = 1; i < ts.size(); ++i)
        intervals_ns.insert(std::llround((ts[i] - ts[i - 1]) * 1000.0));
    EXPECT_EQ(intervals_ns, (std::set<long long>{2003000, 2003100}));
}

TEST(Timestamps, StrictAlternation)
{
    CameraModel cam;
    cam.alternation_prob = 1.0;
    const auto ts = simulate_timestamps(cam, 1000, 4);
    for (std::size_t i = 2; i < ts.size(); ++i) {
        const auto a = std::llround((ts[i - 1] - ts[i - 2]) * 1000.0);
        const auto b = std::llround((ts[i] - ts[i - 1]) * 1000.0);
        EXPECT_NE(a, b);
    }
}

namespace {

SessionSimulator saccade_session(double wobble_amp)
{
    const auto schedule = resolve(point_sequence({{0.0, 0.0}, {10.0, 0.0}}, 0.5, 0.5), 1);
    MotionModel motion;
    motion.wobble_amplitude = wobble_amp;
    return SessionSimulator(schedule, motion, EyeState{}, CameraModel{}, 2);
}

} // namespace

TEST(Session, FrameCountFollowsDuration)
{
    const auto sim = saccade_session(0.3);
    EXPECT_EQ(sim.frame_count(), 500);
    EXPECT_DOUBLE_EQ(sim.timestamps_us().front(), 0.0);
}

TEST(Session, ZeroWobbleLeavesNoPostSaccadicOscillation)
{
    const auto sim = saccade_session(0.0);
    const double end_us = 500000.0 + 43000.0;
    const auto ref = sim.eye_state(sim.kinematics(end_us));
    const Point2d dpi0 = ref.p1_center() - ref.p4_center();
    for (double t = end_us; t < 1000000.0; t += 1000.0) {
        const auto e = sim.eye_state(sim.kinematics(t));
        EXPECT_LT(distance(e.p1_center() - e.p4_center(), dpi0), 1e-9) << t;
    }
}

TEST(Session, WobbleAppearsAfterSaccadeOnly)
{
    const auto sim = saccade_session(0.3);
    double before = 0.0, after = 0.0;
    for (double t = 0.0; t < 500000.0; t += 1000.0)
        before = std::max(before, norm(sim.kinematics(t).wobble_deg));
    for (double t = 543000.0; t < 700000.0; t += 100.0)
        after = std::max(after, norm(sim.kinematics(t).wobble_deg));
    EXPECT_EQ(before, 0.0);
    EXPECT_NEAR(after, 0.3, 0.01);
}

TEST(Session, EyeFollowsTargetBetweenSaccades)
{
    const auto sim = saccade_session(0.0);
    const auto k0 = sim.kinematics(200000.0);
    const auto k1 = sim.kinematics(800000.0);
    EXPECT_EQ(k0.eye_deg, (Point2d{0.0, 0.0}));
    EXPECT_NEAR(k1.eye_deg.x, 10.0, 1e-12);
    EXPECT_EQ(k1.target_deg, (Point2d{10.0, 0.0}));
    const auto e = sim.eye_state(k1);
    EXPECT_NEAR(e.pupil_center.x, 256.0 + 50.0, 1e-9);
}

TEST(Session, RenderIsIndependentPerFrame)
{
    const auto sim = saccade_session(0.3);
    const auto a = sim.render(123);
    const auto b = sim.render(123);
    EXPECT_EQ(a.frame, b.frame);
    EXPECT_EQ(a.frame.index, 123);
    EXPECT_DOUBLE_EQ(a.frame.timestamp_us, sim.timestamps_us()[123]);
}

TEST(Render, BrightestNonGlintPupilPixelIsP4)
{
    EyeState eye;
    eye.p4_offset = {-9.0, 6.0};
    const auto r = render_frame(eye, {}, CameraModel{}, 0.0, 1);
    int brightest = 0;
    for (int y = 120; y <= 200; ++y)
        for (int x = 216; x <= 296; ++x) {
            const bool in_pupil = std::hypot(x - 256.0, y - 160.0) <= 38.0;
            const bool near_p1 = std::hypot(x - eye.p1_center().x, y - eye.p1_center().y) <= 6.0;
            if (in_pupil && !near_p1)
                brightest = std::max<int>(brightest, r.frame.at(x, y));
        }
    EXPECT_EQ(brightest, 55);
    EXPECT_LE(brightest, 65);
}
