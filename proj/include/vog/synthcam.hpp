#pragma once

#include "vog/frame.hpp"
#include "vog/geometry.hpp"
#include "vog/stimulus.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace vog {

class FrameSink;

struct CameraModel {
    int width = 512;
    int height = 320;
    double nominal_rate_hz = 500.0;
    double interval_a_ms = 2.0030;
    double interval_b_ms = 2.0031;
    // Probability that the next interval differs from the current one.
    double alternation_prob = 0.95;

    void validate() const;
};

struct EyeState {
    Point2d pupil_center{256.0, 160.0};
    double pupil_radius = 40.0;
    double pupil_intensity = 20.0;
    double iris_intensity = 120.0;
    Point2d p1_offset{10.0, -10.0};
    double p1_intensity = 250.0;
    double p1_radius = 3.5;
    bool p1_visible = true;
    Point2d p4_offset{0.0, 0.0};
    // Equal to pupil_intensity means "no P4 in the image".
    double p4_intensity = 55.0;
    double p4_radius = 1.5;

    void validate() const;
    Point2d p1_center() const { return pupil_center + p1_offset; }
    Point2d p4_center() const { return pupil_center + p4_offset; }
};

enum class ConfounderKind { E1_nose, E2_eyelash, E3_supraorbital, E4_supraorbital };

std::string_view to_string(ConfounderKind k);
ConfounderKind confounder_from_string(std::string_view s);

struct ConfounderSpec {
    ConfounderKind kind = ConfounderKind::E3_supraorbital;
    Point2d center;
    double radius = 3.0;
    double intensity = 50.0;
};

/// Scenario presets in the style of the four reflection cases: 'a' is clean,
/// 'b' adds a bright nose reflection, 'c' an eyelash shadow over the upper
/// pupil edge with specks, 'd' two supraorbital reflections inside the pupil
/// (one too large, one too bright to pass the P4 filters).
std::vector<ConfounderSpec> confounder_preset(char scenario, Point2d pupil_center);

struct GroundTruthRecord {
    std::int64_t frame_index = 0;
    double timestamp_us = 0.0;
    Point2d pupil_center;
    Point2d p1_center;
    Point2d p4_center;
    Point2d target_deg;
    std::vector<ConfounderKind> confounders;
};

struct RenderedFrame {
    Frame frame;
    GroundTruthRecord truth;
};

/// Anti-aliased (4x4 supersampled edges) rendering of iris, pupil, P4,
/// confounders and P1, then additive Gaussian noise clamped to [0, 255].
/// Throws GeometryOutOfBounds when a feature extends past the frame.
RenderedFrame render_frame(const EyeState& state, const std::vector<ConfounderSpec>& confounders,
                           const CameraModel& camera, double noise_sigma, std::uint64_t seed);

struct SaccadeTiming {
    double base_ms = 21.0;
    double per_deg_ms = 2.2;
    double duration_ms(double amplitude) const { return base_ms + per_deg_ms * amplitude; }
};

/// Cosine ramp from 0 to `amplitude`; zero velocity at both ends.
double saccade_profile(double amplitude, double t_ms, const SaccadeTiming& timing = {});

/// Post-saccadic P4 oscillation A*exp(-t/tau)*sin(2*pi*f*t), scaled so its
/// largest excursion equals A.
double wobble(double amplitude_deg, double frequency_hz, double decay_ms, double t_ms);

struct MotionModel {
    Point2d gain_px_per_deg{5.0, 5.0}; // pupil image displacement per degree
    // P1 moves against the pupil by this fraction of its gain, P4 with it.
    double p1_relative_gain = 0.2;
    double p4_relative_gain = 0.24;
    double wobble_amplitude = 0.3; // degrees
    double wobble_frequency = 20.0;
    double wobble_decay = 30.0; // ms
    double noise_sigma = 0.0;
    // Orthogonal leakage: horizontal rotation into the vertical image axis
    // and vice versa.
    double coupling_h_to_v = 0.0;
    double coupling_v_to_h = 0.0;
    SaccadeTiming saccade;
    // Fixed in frame coordinates.
    std::vector<ConfounderSpec> confounders;

    void validate() const;
};

/// Eye rotation, target and wobble at one instant.
struct EyeKinematics {
    Point2d eye_deg;
    Point2d target_deg;
    Point2d wobble_deg;
};

/// Renders a session frame by frame. Frame i is independent of the others
/// (its noise seed is derived from the session seed and i).
class SessionSimulator {
public:
    SessionSimulator(ResolvedSchedule schedule, MotionModel motion, EyeState eye, CameraModel camera,
                     std::uint64_t seed);

    std::int64_t frame_count() const { return static_cast<std::int64_t>(timestamps_us_.size()); }
    const std::vector<double>& timestamps_us() const { return timestamps_us_; }
    EyeKinematics kinematics(double t_us) const;
    EyeState eye_state(const EyeKinematics& k) const;
    RenderedFrame render(std::int64_t index) const;

private:
    struct Movement {
        double t0_us;
        Point2d from;
        Point2d to;
        bool pursuit;
        double duration_ms;
    };

    ResolvedSchedule schedule_;
    MotionModel motion_;
    EyeState eye_;
    CameraModel camera_;
    std::uint64_t seed_;
    std::vector<double> timestamps_us_;
    std::vector<Movement> movements_;
};

/// Frame timestamps in microseconds built from whole-nanosecond intervals.
std::vector<double> simulate_timestamps(const CameraModel& camera, std::int64_t count, std::uint64_t seed);

std::string truth_csv_header();
std::string truth_csv_row(const GroundTruthRecord& r);

/// Writes every frame into `sink` and returns the truth log.
std::vector<GroundTruthRecord> simulate_session(const SessionSimulator& sim, FrameSink& sink);

/// FrameStore plus truth.csv under `dir`.
void write_session(const SessionSimulator& sim, const std::filesystem::path& dir,
                   std::uint64_t segment_limit_bytes);

} // namespace vog
