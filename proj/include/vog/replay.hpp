#pragma once

#include "vog/features.hpp"
#include "vog/framestore.hpp"
#include "vog/gaze.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vog {

/// One SampleLog row. Feature positions are the refined sub-pixel centroids,
/// so the raw VOG (pupil - P1) and DPI (P1 - P4) vectors can be recomputed
/// from the log alone.
struct SampleRow {
    std::int64_t frame_index = 0;
    double timestamp_us = 0.0;
    std::optional<Point2d> pupil;
    std::optional<double> pupil_r;
    std::optional<Point2d> p1;
    std::optional<Point2d> p4;
    std::optional<Point2d> vog_deg;
    std::optional<Point2d> dpi_deg;
    bool vog_valid = false;
    bool dpi_valid = false;
    std::vector<ErrorCode> failure_reasons;

    std::optional<DifferenceVector> raw(SignalSource source) const;
};

using SampleLog = std::vector<SampleRow>;

SampleRow make_sample_row(const FeatureSet& features, const CalibrationModel* vog_calibration,
                          const CalibrationModel* dpi_calibration);

std::string format_sample_log(const SampleLog& log);
SampleLog parse_sample_log(std::string_view text);

/// A calibration applies to the signal it was fitted on; the other signal's
/// degree columns stay empty.
SampleLog replay(FrameStoreReader& store, const DetectionParams& params,
                 const CalibrationModel* calibration = nullptr);

struct SweepResult {
    int threshold = 0;
    SampleLog log;
};

std::vector<SweepResult> threshold_sweep(FrameStoreReader& store, const std::vector<int>& thresholds,
                                         const DetectionParams& base = {});

/// Gaze samples of one signal. Degrees come from `calibration` when given,
/// otherwise from the log's degree columns (absent columns leave x/y NaN).
std::vector<GazeSample> to_gaze_samples(const SampleLog& log, SignalSource source,
                                        const CalibrationModel* calibration = nullptr);

} // namespace vog
