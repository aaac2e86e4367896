#pragma once

#include "vog/gaze.hpp"
#include "vog/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vog {

// ---------------------------------------------------------------------------
// Authored program
// ---------------------------------------------------------------------------

struct DotShow {
    Point2d position;   // degrees
    double diameter = 0.67;
};
struct Fixate {
    double dwell_min_s = 1.0;
    double dwell_max_s = 2.0;
};
struct Jump {
    Point2d to;
};
struct SmoothMove {
    Point2d to;
    double velocity_deg_s = 10.0;
};
struct Shrink {
    double to_diameter = 0.2;
    double over_s = 0.5;
};
struct ImageShow {
    std::string path;
    double duration_s = 1.0;
};
struct VideoShow {
    std::string path;
    double duration_s = 1.0;
};

enum class EventKind { Fixation, Pursuit, Shrink, Image, Video };

std::string_view to_string(EventKind k);

/// One interval of a resolved schedule. `target` is where the dot is (or, for
/// pursuits, where it ends up).
struct ResolvedEvent {
    std::int64_t t_start_us = 0;
    std::int64_t t_end_us = 0;
    Point2d target;
    EventKind kind = EventKind::Fixation;
    double diameter_deg = 0.67;
    std::string media;

    friend bool operator==(const ResolvedEvent&, const ResolvedEvent&) = default;
};

/// An already-resolved event read back from a schedule document; resolving it
/// reproduces it verbatim.
struct FrozenEvent {
    ResolvedEvent event;
};

using Command = std::variant<DotShow, Fixate, Jump, SmoothMove, Shrink, ImageShow, VideoShow, FrozenEvent>;

struct StimulusProgram {
    int version = 1;
    double background_intensity = 200.0;
    double dot_intensity = 0.0;
    std::vector<Command> commands;
    // Set when parsed from a <schedule> document; resolve() then keeps it.
    std::optional<std::uint64_t> recorded_seed;
};

struct ResolvedSchedule {
    std::vector<ResolvedEvent> events;
    std::uint64_t seed = 0;

    std::int64_t start_us() const { return events.empty() ? 0 : events.front().t_start_us; }
    std::int64_t end_us() const { return events.empty() ? 0 : events.back().t_end_us; }
    std::int64_t duration_us() const { return end_us() - start_us(); }

    friend bool operator==(const ResolvedSchedule&, const ResolvedSchedule&) = default;
};

inline constexpr int kStimulusSchemaVersion = 1;

/// Parses a `<stimulus>` program or a `<schedule>` document. Throws
/// ParseError (with line and column) or SchemaError.
StimulusProgram parse_program(std::string_view xml);

/// Resolves every random quantity with the seeded xorshift64* stream. A
/// program read from a schedule document keeps its recorded seed instead.
/// Throws SchemaError when a target falls outside the screen.
ResolvedSchedule resolve(const StimulusProgram& program, std::uint64_t seed, const ScreenGeometry& geometry = {});

/// Canonical schedule document; times in microseconds.
std::string emit_resolved(const ResolvedSchedule& schedule);

/// parse_program + resolve for schedule documents, keeping the recorded seed.
ResolvedSchedule parse_resolved(std::string_view xml);

std::string emit_program(const StimulusProgram& program);

enum class GridAxis { Horizontal, Vertical };

struct SaccadeGridSpec {
    GridAxis axis = GridAxis::Horizontal;
    double amp_min = 2.5;
    double amp_max = 40.0;
    double step = 2.5;
    double dwell_min_s = 1.0;
    double dwell_max_s = 2.0;
    double dot_diameter = 0.67;
};

/// Amplitudes amp_min, amp_min + step, ... up to amp_max.
std::vector<double> grid_amplitudes(const SaccadeGridSpec& spec);

/// Dot starts at the center; for each amplitude it jumps to -a/2 and then to
/// +a/2 along the axis, so consecutive targets alternate sides. Every jump is
/// followed by a random fixation.
StimulusProgram saccade_grid(const SaccadeGridSpec& spec);

/// Fixation at each listed point in order (calibration and test layouts).
StimulusProgram point_sequence(const std::vector<Point2d>& points, double dwell_min_s, double dwell_max_s,
                               double dot_diameter = 0.67);

} // namespace vog
