#pragma once

#include "vog/gaze.hpp"
#include "vog/stimulus.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vog {

struct FixationSegment {
    std::size_t event_index = 0;
    double t_start_us = 0.0; // window, after settle/tail clipping
    double t_end_us = 0.0;
    Point2d target_deg;
    std::vector<GazeSample> samples; // valid samples only
    DifferenceVector raw_mean;
};

struct Segmentation {
    std::vector<FixationSegment> segments;
    std::size_t dropped = 0; // fixation windows without a valid sample
};

/// One segment per fixation event, clipped to [start + settle, end - tail].
/// Throws ScheduleMismatch when the samples end before the first window opens.
Segmentation segment_fixations(std::span<const GazeSample> samples, const ResolvedSchedule& schedule,
                               double settle_ms = 300.0, double tail_ms = 20.0);

struct SpreadStats {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation across fixations
    std::vector<double> per_fixation;
};

/// Distance from each segment's gaze centroid to its target. Throws NoSegments.
SpreadStats accuracy(std::span<const FixationSegment> segments);

/// RMS of successive-sample distances per segment. Throws NoSegments,
/// SegmentTooShort.
SpreadStats precision_rms_s2s(std::span<const FixationSegment> segments);

enum class Axis { Horizontal, Vertical };

std::string_view to_string(Axis a);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double max_residual = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. r^2 is 1 when y has no
/// variance and the fit is exact.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Per-fixation raw mean component against target amplitude, same axis.
/// Throws TooFewAmplitudes below three distinct amplitudes.
LinearFit linearity(std::span<const FixationSegment> segments, Axis axis);

/// 100 * |orthogonal slope| / |driven slope|. Throws DegenerateDrivenSlope.
double crosstalk(std::span<const FixationSegment> segments, Axis driven);

struct IntervalBin {
    double interval_ms = 0.0;
    std::size_t count = 0;
    double proportion = 0.0;
};

struct TemporalStats {
    std::size_t interval_count = 0;
    double mean_interval_ms = 0.0;
    double factual_rate_hz = 0.0;
    std::vector<IntervalBin> histogram; // ascending interval
    double lag1_autocorr = 0.0;
    bool zero_variance = false;
};

/// Intervals are rounded to whole nanoseconds before binning. Throws
/// InvalidArgument below three timestamps, NonMonotoneTimestamps.
TemporalStats temporal_stability(std::span<const double> timestamps_us);

double validity(std::span<const GazeSample> samples);

struct QualityReport {
    SignalSource signal = SignalSource::VOG;
    std::size_t sample_count = 0;
    double validity_fraction = 0.0;
    std::size_t fixation_count = 0;
    std::size_t dropped_fixations = 0;
    std::optional<SpreadStats> accuracy;
    std::optional<SpreadStats> precision;
    std::optional<LinearFit> linearity_h;
    std::optional<LinearFit> linearity_v;
    std::optional<double> crosstalk_h_pct;
    std::optional<double> crosstalk_v_pct;
    TemporalStats temporal;
    std::vector<FixationSegment> segments;
};

/// Runs every metric that the data supports: accuracy and precision need
/// calibrated degrees, linearity and crosstalk an axis with at least three
/// distinct target amplitudes (crosstalk additionally a constant orthogonal
/// target).
QualityReport build_report(std::span<const GazeSample> samples, const ResolvedSchedule& schedule,
                           double settle_ms = 300.0, double tail_ms = 20.0);

/// name,value,unit
std::string format_report_csv(const QualityReport& report);
/// One row per fixation segment.
std::string format_fixation_csv(const QualityReport& report);

} // namespace vog
