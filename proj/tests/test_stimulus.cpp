#include "vog/error.hpp"
#include "vog/stimulus.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace vog;

namespace {

ErrorCode parse_error(const std::string& xml)
{
    try {
        parse_program(xml);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "accepted: " << xml;
    return ErrorCode::InvalidArgument;
}

StimulusProgram repeated_fixations(int n, double lo, double hi)
{
    StimulusProgram p;
    p.commands.push_back(DotShow{});
    for (int i = 0; i < n; ++i)
        p.commands.push_back(Fixate{lo, hi});
    return p;
}

} // namespace

TEST(ParseProgram, Minimal)
{
    const auto p = parse_program(R"(<stimulus version="1"><dot_show x="0" y="0"/><fixate min="1" max="2"/></stimulus>)");
    ASSERT_EQ(p.commands.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<DotShow>(p.commands[0]));
    const auto& f = std::get<Fixate>(p.commands[1]);
    EXPECT_EQ(f.dwell_min_s, 1.0);
    EXPECT_EQ(f.dwell_max_s, 2.0);
}

TEST(ParseProgram, AllCommands)
{
    const auto p = parse_program(R"(<stimulus version="1" background="180" dot="10">
  <dot_show x="1" y="-2" diameter="0.5"/>
  <fixate min="1" max="1.5"/>
  <jump x="3" y="4"/>
  <smooth_move x="-3" y="4" velocity="12"/>
  <shrink diameter="0.1" over="0.4"/>
  <image path="a.png" duration="2"/>
  <video path="b.mp4" duration="3"/>
</stimulus>)");
    ASSERT_EQ(p.commands.size(), 7u);
    EXPECT_EQ(p.background_intensity, 180.0);
    EXPECT_EQ(std::get<SmoothMove>(p.commands[3]).velocity_deg_s, 12.0);
    EXPECT_EQ(std::get<VideoShow>(p.commands[6]).path, "b.mp4");
}

TEST(ParseProgram, Errors)
{
    EXPECT_EQ(parse_error(R"(<stimulus version="1"><fixate min="2" max="1"/></stimulus>)"), ErrorCode::SchemaError);
    EXPECT_EQ(parse_error(R"(<stimulus version="1"><dot_show x="0" y="0"/>)"), ErrorCode::ParseError);
    EXPECT_EQ(parse_error(R"(<stimulus version="1"><fixate min="1" max="2" color="red"/></stimulus>)"),
              ErrorCode::SchemaError);
    EXPECT_EQ(parse_error(R"(<stimulus version="1"><teleport/></stimulus>)"), ErrorCode::SchemaError);
    EXPECT_EQ(parse_error(R"(<stimulus version="7"></stimulus>)"), ErrorCode::SchemaError);
    EXPECT_EQ(parse_error(R"(<stimulus version="1"><fixate min="x" max="2"/></stimulus>)"), ErrorCode::SchemaError);
}

TEST(ParseProgram, ErrorCarriesPosition)
{
    try {
        parse_program("<stimulus version=\"1\">\n  <dot_show x=\"0\" y=\"0\">\n</stimulus>");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}

TEST(Resolve, DwellsWithinBoundsAndCentered)
{
    const auto s = resolve(repeated_fixations(100, 1.0, 2.0), 42);
    ASSERT_EQ(s.events.size(), 100u);
    double total = 0;
    for (const auto& e : s.events) {
        const double d = (e.t_end_us - e.t_start_us) / 1e6;
        EXPECT_GE(d, 1.0);
        EXPECT_LE(d, 2.0);
        total += d;
    }
    EXPECT_GE(total / 100, 1.4);
    EXPECT_LE(total / 100, 1.6);
}

TEST(Resolve, DegenerateInterval)
{
    const auto s = resolve(repeated_fixations(10, 1.5, 1.5), 1);
    for (const auto& e : s.events)
        EXPECT_EQ(e.t_end_us - e.t_start_us, 1500000);
}

TEST(Resolve, DeterministicPerSeed)
{
    const auto p = repeated_fixations(20, 1.0, 2.0);
    EXPECT_EQ(resolve(p, 9), resolve(p, 9));
    EXPECT_NE(resolve(p, 9), resolve(p, 10));
}

TEST(Resolve, EventsAreContiguous)
{
    const auto s = resolve(point_sequence({{0, 0}, {5, 5}, {-5, 2}}, 1.0, 2.0), 3);
    ASSERT_EQ(s.events.size(), 3u);
    EXPECT_EQ(s.events[0].t_start_us, 0);
    for (std::size_t i = 1; i < s.events.size(); ++i)
        EXPECT_EQ(s.events[i].t_start_us, s.events[i - 1].t_end_us);
    EXPECT_EQ(s.events[1].target, (Point2d{5, 5}));
}

TEST(Resolve, OffScreenTarget)
{
    try {
        resolve(point_sequence({{60.0, 0.0}}, 1.0, 1.0), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    }
}

TEST(SaccadeGrid, AmplitudeCounts)
{
    SaccadeGridSpec h;
    EXPECT_EQ(grid_amplitudes(h).size(), 16u);
    SaccadeGridSpec v;
    v.axis = GridAxis::Vertical;
    v.amp_max = 30.0;
    EXPECT_EQ(grid_amplitudes(v).size(), 12u);
    SaccadeGridSpec one;
    one.amp_min = one.amp_max = 10.0;
    EXPECT_EQ(grid_amplitudes(one), std::vector<double>{10.0});
}

TEST(SaccadeGrid, TargetsAlternateSides)
{
    SaccadeGridSpec v;
    v.axis = GridAxis::Vertical;
    v.amp_max = 30.0;
    const auto s = resolve(saccade_grid(v), 5);
    std::set<double> amplitudes;
    for (std::size_t i = 1; i < s.events.size(); ++i) {
        EXPECT_EQ(s.events[i].target.x, 0.0);
        if (s.events[i].target.y > 0)
            amplitudes.insert(2 * s.events[i].target.y);
    }
    EXPECT_EQ(amplitudes.size(), 12u);
}

TEST(EmitResolved, EmptySchedule)
{
    const ResolvedSchedule empty;
    const auto back = parse_resolved(emit_resolved(empty));
    EXPECT_TRUE(back.events.empty());
}

TEST(EmitResolved, CanonicalRoundTrip)
{
    auto p = point_sequence({{0, 0}, {4.25, -3}, {-7, 6.5}}, 1.0, 2.0);
    p.commands.push_back(ImageShow{"pic.png", 1.25});
    p.commands.push_back(SmoothMove{{2, 2}, 8.0});
    const auto s = resolve(p, 12);
    const auto text = emit_resolved(s);
    const auto back = parse_resolved(text);
    EXPECT_EQ(back, s);
    EXPECT_EQ(emit_resolved(back), text);
}

TEST(EmitResolved, MicrosecondTimes)
{
    ResolvedSchedule s;
    s.events.push_back({0, 1500000, {0, 0}, EventKind::Fixation, 0.67, ""});
    const auto text = emit_resolved(s);
    EXPECT_NE(text.find("t_start_us=\"0\""), std::string::npos);
    EXPECT_NE(text.find("t_end_us=\"1500000\""), std::string::npos);
}

TEST(EmitProgram, RoundTrip)
{
    const auto p = saccade_grid(SaccadeGridSpec{});
    EXPECT_EQ(emit_program(parse_program(emit_program(p))), emit_program(p));
}

TEST(EmitResolved, ScheduleKeepsRecordedSeed)
{
    const auto s = resolve(point_sequence({{0, 0}, {3, 1}}, 1.0, 2.0), 0xF00DFACECAFEBEEFull);
    const auto text = emit_resolved(s);
    EXPECT_EQ(parse_resolved(text).seed, 0xF00DFACECAFEBEEFull);
    EXPECT_EQ(emit_resolved(resolve(parse_program(text), 5)), text);
    EXPECT_THROW(parse_resolved(emit_program(point_sequence({{0, 0}}, 1.0, 1.0))), Error);
}
