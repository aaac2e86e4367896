#include "vog/replay.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"

#include <cmath>
#include <limits>

namespace vog {

std::optional<DifferenceVector> SampleRow::raw(SignalSource source) const
{
    if (source == SignalSource::VOG) {
        if (!pupil || !p1)
            return std::nullopt;
        return DifferenceVector{pupil->x - p1->x, pupil->y - p1->y, SignalSource::VOG};
    }
    if (!p1 || !p4)
        return std::nullopt;
    return DifferenceVector{p1->x - p4->x, p1->y - p4->y, SignalSource::DPI};
}

SampleRow make_sample_row(const FeatureSet& features, const CalibrationModel* vog_calibration,
                          const CalibrationModel* dpi_calibration)
{
    SampleRow row;
    row.frame_index = features.frame_index;
    row.timestamp_us = features.timestamp_us;
    if (features.pupil) {
        row.pupil = features.pupil->refined_center;
        row.pupil_r = features.pupil->radius;
    }
    if (features.p1)
        row.p1 = features.p1->refined_centroid;
    if (features.p4)
        row.p4 = features.p4->refined_centroid;
    row.failure_reasons = features.failure_reasons;

    const auto dv = difference_vectors(features);
    row.vog_valid = dv.vog.has_value();
    row.dpi_valid = dv.dpi.has_value();
    if (dv.vog && vog_calibration)
        row.vog_deg = apply_calibration(*vog_calibration, *dv.vog);
    if (dv.dpi && dpi_calibration)
        row.dpi_deg = apply_calibration(*dpi_calibration, *dv.dpi);
    return row;
}

namespace {

constexpr std::string_view kHeader = "frame_index,timestamp_us,pupil_x,pupil_y,pupil_r,p1_x,p1_y,p4_x,p4_y,"
                                     "vog_x_deg,vog_y_deg,dpi_x_deg,dpi_y_deg,vog_valid,dpi_valid,failure_reasons";

void put_point(std::string& out, const std::optional<Point2d>& p)
{
    if (p)
        out += csv::num(p->x) + ',' + csv::num(p->y) + ',';
    else
        out += ",,";
}

std::optional<Point2d> get_point(std::string_view x, std::string_view y)
{
    const auto vx = csv::to_opt_double(x);
    const auto vy = csv::to_opt_double(y);
    if (vx.has_value() != vy.has_value())
        throw Error(ErrorCode::ParseError, "half-empty coordinate pair in sample log");
    if (!vx)
        return std::nullopt;
    return Point2d{*vx, *vy};
}

ErrorCode error_code_from(std::string_view s)
{
    for (int i = 0; i <= static_cast<int>(ErrorCode::IoError); ++i) {
        const auto c = static_cast<ErrorCode>(i);
        if (to_string(c) == s)
            return c;
    }
    throw Error(ErrorCode::ParseError, "unknown failure reason '" + std::string(s) + "'");
}

} // namespace

std::string format_sample_log(const SampleLog& log)
{
    std::string out(kHeader);
    out += '\n';
    for (const auto& r : log) {
        out += std::to_string(r.frame_index) + ',' + csv::num(r.timestamp_us) + ',';
        put_point(out, r.pupil);
        out += csv::opt(r.pupil_r) + ',';
        put_point(out, r.p1);
        put_point(out, r.p4);
        put_point(out, r.vog_deg);
        put_point(out, r.dpi_deg);
        out += r.vog_valid ? "1," : "0,";
        out += r.dpi_valid ? "1," : "0,";
        for (std::size_t i = 0; i < r.failure_reasons.size(); ++i) {
            if (i)
                out += ';';
            out += to_string(r.failure_reasons[i]);
        }
        out += '\n';
    }
    return out;
}

SampleLog parse_sample_log(std::string_view text)
{
    csv::Table t{std::string(text)};
    std::vector<std::size_t> c;
    for (auto name : csv::split(kHeader))
        c.push_back(t.column(name));
    SampleLog log;
    log.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        auto cell = [&](int k) { return t.cell(r, c[static_cast<std::size_t>(k)]); };
        SampleRow row;
        row.frame_index = csv::to_int(cell(0));
        row.timestamp_us = csv::to_double(cell(1));
        row.pupil = get_point(cell(2), cell(3));
        row.pupil_r = csv::to_opt_double(cell(4));
        row.p1 = get_point(cell(5), cell(6));
        row.p4 = get_point(cell(7), cell(8));
        row.vog_deg = get_point(cell(9), cell(10));
        row.dpi_deg = get_point(cell(11), cell(12));
        row.vog_valid = csv::to_int(cell(13)) != 0;
        row.dpi_valid = csv::to_int(cell(14)) != 0;
        if (!cell(15).empty())
            for (auto reason : csv::split(cell(15), ';'))
                row.failure_reasons.push_back(error_code_from(reason));
        if (!log.empty() && row.timestamp_us < log.back().timestamp_us)
            throw Error(ErrorCode::NonMonotoneTimestamps, "sample log timestamps decrease at row " + std::to_string(r));
        log.push_back(std::move(row));
    }
    return log;
}

SampleLog replay(FrameStoreReader& store, const DetectionParams& params, const CalibrationModel* calibration)
{
    const CalibrationModel* vog_cal = calibration && calibration->source == SignalSource::VOG ? calibration : nullptr;
    const CalibrationModel* dpi_cal = calibration && calibration->source == SignalSource::DPI ? calibration : nullptr;
    SampleLog log;
    log.reserve(static_cast<std::size_t>(store.frame_count()));
    for (std::int64_t i = 0; i < store.frame_count(); ++i) {
        const Frame frame = store.read(i);
        log.push_back(make_sample_row(detect_all(frame, params), vog_cal, dpi_cal));
    }
    return log;
}

std::vector<SweepResult> threshold_sweep(FrameStoreReader& store, const std::vector<int>& thresholds,
                                         const DetectionParams& base)
{
    if (thresholds.empty())
        throw Error(ErrorCode::InvalidArgument, "threshold list is empty");
    std::vector<SweepResult> out;
    for (int t : thresholds) {
        DetectionParams p = base;
        p.pupil_threshold = t;
        out.push_back({t, replay(store, p)});
    }
    return out;
}

std::vector<GazeSample> to_gaze_samples(const SampleLog& log, SignalSource source, const CalibrationModel* calibration)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<GazeSample> out;
    out.reserve(log.size());
    for (const auto& r : log) {
        GazeSample s;
        s.timestamp_us = r.timestamp_us;
        s.source = source;
        const auto raw = r.raw(source);
        s.valid = raw.has_value() && (source == SignalSource::VOG ? r.vog_valid : r.dpi_valid);
        if (raw)
            s.raw = *raw;
        s.x_deg = s.y_deg = nan;
        if (s.valid) {
            std::optional<Point2d> deg;
            if (calibration)
                deg = apply_calibration(*calibration, *raw);
            else
                deg = source == SignalSource::VOG ? r.vog_deg : r.dpi_deg;
            if (deg) {
                s.x_deg = deg->x;
                s.y_deg = deg->y;
            }
        }
        out.push_back(s);
    }
    return out;
}

} // namespace vog
