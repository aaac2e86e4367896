#pragma once

#include "vog/features.hpp"
#include "vog/geometry.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace vog {

/// Stimulus monitor and viewing distance. Angles are per-axis arctangents of
/// on-screen millimeters over the eye distance, origin at the screen center,
/// x to the right and y downwards (pixel row order).
struct ScreenGeometry {
    double width_mm = 374.0;
    double height_mm = 300.0;
    int width_px = 1280;
    int height_px = 1024;
    double eye_distance_mm = 500.0;

    void validate() const;
    /// Largest |x|, |y| in degrees that still lands on the screen.
    Point2d half_extent_deg() const;
};

Point2d target_px_to_deg(const ScreenGeometry& geometry, Point2d px);
Point2d target_deg_to_px(const ScreenGeometry& geometry, Point2d deg);

enum class SignalSource { VOG, DPI };

std::string_view to_string(SignalSource s);
SignalSource signal_from_string(std::string_view s);

/// Raw (uncalibrated) gaze signal in camera pixels.
struct DifferenceVector {
    double dx = 0.0;
    double dy = 0.0;
    SignalSource source = SignalSource::VOG;
};

struct DifferenceVectors {
    std::optional<DifferenceVector> vog; // pupil - P1
    std::optional<DifferenceVector> dpi; // P1 - P4
};

/// Uses the refined (sub-pixel) P1/P4 centroids.
DifferenceVectors difference_vectors(const FeatureSet& features);

/// Second-order polynomial per axis over the basis {1, u, v, u^2, v^2, uv}.
struct CalibrationModel {
    std::array<double, 6> coeff_x{};
    std::array<double, 6> coeff_y{};
    double residual_rms = 0.0;
    int point_count = 0;
    SignalSource source = SignalSource::VOG;
};

struct CalibrationPoint {
    DifferenceVector raw;
    Point2d target_deg;
};

inline constexpr std::size_t kMinCalibrationPoints = 6;

/// Least-squares fit per axis. Throws TooFewPoints, RankDeficient.
CalibrationModel fit_calibration(std::span<const CalibrationPoint> points);

Point2d apply_calibration(const CalibrationModel& model, const DifferenceVector& raw);

/// Text form: a header line with point count and residual, then one line per
/// axis with the six coefficients in shortest round-trip form.
std::string format_calibration(const CalibrationModel& model);
CalibrationModel parse_calibration(std::string_view text);

struct GazeSample {
    double timestamp_us = 0.0;
    double x_deg = 0.0;
    double y_deg = 0.0;
    SignalSource source = SignalSource::VOG;
    bool valid = false;
    DifferenceVector raw;
};

} // namespace vog
