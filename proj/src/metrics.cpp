#include "vog/metrics.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace vog {

Segmentation segment_fixations(std::span<const GazeSample> samples, const ResolvedSchedule& schedule, double settle_ms,
                               double tail_ms)
{
    if (settle_ms < 0.0 || tail_ms < 0.0)
        throw Error(ErrorCode::InvalidArgument, "settle and tail must be non-negative");

    Segmentation out;
    bool first_window = true;
    for (std::size_t i = 0; i < schedule.events.size(); ++i) {
        const auto& e = schedule.events[i];
        if (e.kind != EventKind::Fixation)
            continue;
        const double ws = static_cast<double>(e.t_start_us) + settle_ms * 1000.0;
        const double we = static_cast<double>(e.t_end_us) - tail_ms * 1000.0;
        if (first_window) {
            first_window = false;
            if (samples.empty() || samples.back().timestamp_us < ws)
                throw Error(ErrorCode::ScheduleMismatch, "samples end before the first fixation window opens");
        }
        FixationSegment seg;
        seg.event_index = i;
        seg.t_start_us = ws;
        seg.t_end_us = we;
        seg.target_deg = e.target;
        if (we >= ws) {
            auto it = std::lower_bound(samples.begin(), samples.end(), ws,
                                       [](const GazeSample& s, double t) { return s.timestamp_us < t; });
            for (; it != samples.end() && it->timestamp_us <= we; ++it)
                if (it->valid)
                    seg.samples.push_back(*it);
        }
        if (seg.samples.empty()) {
            ++out.dropped;
            continue;
        }
        double sx = 0.0, sy = 0.0;
        for (const auto& s : seg.samples) {
            sx += s.raw.dx;
            sy += s.raw.dy;
        }
        const double n = static_cast<double>(seg.samples.size());
        seg.raw_mean = {sx / n, sy / n, seg.samples.front().source};
        out.segments.push_back(std::move(seg));
    }
    return out;
}

namespace {

SpreadStats summarize(std::vector<double> values)
{
    SpreadStats s;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    s.per_fixation = std::move(values);
    return s;
}

void require_degrees(const FixationSegment& seg)
{
    for (const auto& s : seg.samples)
        if (!std::isfinite(s.x_deg) || !std::isfinite(s.y_deg))
            throw Error(ErrorCode::InvalidArgument, "gaze samples carry no calibrated degrees");
}

Point2d centroid(const FixationSegment& seg)
{
    double sx = 0.0, sy = 0.0;
    for (const auto& s : seg.samples) {
        sx += s.x_deg;
        sy += s.y_deg;
    }
    const double n = static_cast<double>(seg.samples.size());
    return {sx / n, sy / n};
}

double segment_rms_s2s(const FixationSegment& seg)
{
    if (seg.samples.size() < 2)
        throw Error(ErrorCode::SegmentTooShort, "fixation segment has fewer than two samples");
    double ss = 0.0;
    for (std::size_t i = 1; i < seg.samples.size(); ++i) {
        const double dx = seg.samples[i].x_deg - seg.samples[i - 1].x_deg;
        const double dy = seg.samples[i].y_deg - seg.samples[i - 1].y_deg;
        ss += dx * dx + dy * dy;
    }
    return std::sqrt(ss / static_cast<double>(seg.samples.size() - 1));
}

double along(Point2d p, Axis a) { return a == Axis::Horizontal ? p.x : p.y; }
double along(const DifferenceVector& d, Axis a) { return a == Axis::Horizontal ? d.dx : d.dy; }
Axis other(Axis a) { return a == Axis::Horizontal ? Axis::Vertical : Axis::Horizontal; }

std::size_t distinct_count(const std::vector<double>& v)
{
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i == 0 || s[i] - s[i - 1] > 1e-9)
            ++n;
    return n;
}

} // namespace

SpreadStats accuracy(std::span<const FixationSegment> segments)
{
    if (segments.empty())
        throw Error(ErrorCode::NoSegments, "no fixation segments");
    std::vector<double> per;
    for (const auto& seg : segments) {
        require_degrees(seg);
        per.push_back(distance(centroid(seg), seg.target_deg));
    }
    return summarize(std::move(per));
}

SpreadStats precision_rms_s2s(std::span<const FixationSegment> segments)
{
    if (segments.empty())
        throw Error(ErrorCode::NoSegments, "no fixation segments");
    std::vector<double> per;
    for (const auto& seg : segments) {
        require_degrees(seg);
        per.push_back(segment_rms_s2s(seg));
    }
    return summarize(std::move(per));
}

std::string_view to_string(Axis a) { return a == Axis::Horizontal ? "h" : "v"; }

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "line fit needs at least two paired values");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw Error(ErrorCode::InvalidArgument, "line fit needs variation in x");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
        f.max_residual = std::max(f.max_residual, std::abs(r));
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

LinearFit linearity(std::span<const FixationSegment> segments, Axis axis)
{
    std::vector<double> x, y;
    for (const auto& seg : segments) {
        x.push_back(along(seg.target_deg, axis));
        y.push_back(along(seg.raw_mean, axis));
    }
    if (distinct_count(x) < 3)
        throw Error(ErrorCode::TooFewAmplitudes, "linearity needs at least three distinct target amplitudes");
    return fit_line(x, y);
}

double crosstalk(std::span<const FixationSegment> segments, Axis driven)
{
    std::vector<double> x, same, orth;
    for (const auto& seg : segments) {
        x.push_back(along(seg.target_deg, driven));
        same.push_back(along(seg.raw_mean, driven));
        orth.push_back(along(seg.raw_mean, other(driven)));
    }
    if (distinct_count(x) < 2)
        throw Error(ErrorCode::TooFewAmplitudes, "crosstalk needs at least two distinct driven amplitudes");
    const double driven_slope = fit_line(x, same).slope;
    if (std::abs(driven_slope) < 1e-12)
        throw Error(ErrorCode::DegenerateDrivenSlope, "driven-axis slope is zero");
    return 100.0 * std::abs(fit_line(x, orth).slope) / std::abs(driven_slope);
}

TemporalStats temporal_stability(std::span<const double> timestamps_us)
{
    if (timestamps_us.size() < 3)
        throw Error(ErrorCode::InvalidArgument, "temporal stability needs at least three timestamps");
    std::vector<std::int64_t> ns;
    ns.reserve(timestamps_us.size() - 1);
    for (std::size_t i = 1; i < timestamps_us.size(); ++i) {
        if (!(timestamps_us[i] > timestamps_us[i - 1]))
            throw Error(ErrorCode::NonMonotoneTimestamps, "timestamps must strictly increase");
        ns.push_back(std::llround((timestamps_us[i] - timestamps_us[i - 1]) * 1000.0));
    }

    TemporalStats t;
    t.interval_count = ns.size();
    std::int64_t sum = 0;
    std::map<std::int64_t, std::size_t> bins;
    for (auto d : ns) {
        sum += d;
        ++bins[d];
    }
    const double n = static_cast<double>(ns.size());
    const double mean_ns = static_cast<double>(sum) / n;
    t.mean_interval_ms = mean_ns / 1e6;
    t.factual_rate_hz = 1000.0 / t.mean_interval_ms;
    for (const auto& [d, count] : bins)
        t.histogram.push_back({static_cast<double>(d) / 1e6, count, static_cast<double>(count) / n});

    t.zero_variance = bins.size() == 1;
    if (!t.zero_variance) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double di = static_cast<double>(ns[i]) - mean_ns;
            den += di * di;
            if (i + 1 < ns.size())
                num += di * (static_cast<double>(ns[i + 1]) - mean_ns);
        }
        t.lag1_autocorr = std::clamp(num / den, -1.0, 1.0);
    }
    return t;
}

double validity(std::span<const GazeSample> samples)
{
    if (samples.empty())
        return 0.0;
    std::size_t valid = 0;
    for (const auto& s : samples)
        valid += s.valid;
    return static_cast<double>(valid) / static_cast<double>(samples.size());
}

QualityReport build_report(std::span<const GazeSample> samples, const ResolvedSchedule& schedule, double settle_ms,
                           double tail_ms)
{
    QualityReport r;
    r.signal = samples.empty() ? SignalSource::VOG : samples.front().source;
    r.sample_count = samples.size();
    r.validity_fraction = validity(samples);

    std::vector<double> ts;
    ts.reserve(samples.size());
    for (const auto& s : samples)
        ts.push_back(s.timestamp_us);
    if (ts.size() >= 3)
        r.temporal = temporal_stability(ts);

    auto seg = segment_fixations(samples, schedule, settle_ms, tail_ms);
    r.segments = std::move(seg.segments);
    r.fixation_count = r.segments.size();
    r.dropped_fixations = seg.dropped;
    if (r.segments.empty())
        return r;

    bool have_degrees = true;
    for (const auto& s : r.segments)
        for (const auto& g : s.samples)
            have_degrees = have_degrees && std::isfinite(g.x_deg) && std::isfinite(g.y_deg);
    if (have_degrees) {
        r.accuracy = accuracy(r.segments);
        bool long_enough = true;
        for (const auto& s : r.segments)
            long_enough = long_enough && s.samples.size() >= 2;
        if (long_enough)
            r.precision = precision_rms_s2s(r.segments);
    }

    std::vector<double> tx, ty;
    for (const auto& s : r.segments) {
        tx.push_back(s.target_deg.x);
        ty.push_back(s.target_deg.y);
    }
    const auto nx = distinct_count(tx), ny = distinct_count(ty);
    if (nx >= 3)
        r.linearity_h = linearity(r.segments, Axis::Horizontal);
    if (ny >= 3)
        r.linearity_v = linearity(r.segments, Axis::Vertical);
    if (nx >= 3 && ny == 1)
        r.crosstalk_h_pct = crosstalk(r.segments, Axis::Horizontal);
    if (ny >= 3 && nx == 1)
        r.crosstalk_v_pct = crosstalk(r.segments, Axis::Vertical);
    return r;
}

std::string format_report_csv(const QualityReport& r)
{
    std::string out = "name,value,unit\n";
    auto row = [&](std::string_view name, double v, std::string_view unit) {
        out += std::string(name) + ',' + csv::num(v) + ',' + std::string(unit) + '\n';
    };
    row("signal_is_dpi", r.signal == SignalSource::DPI ? 1.0 : 0.0, "flag");
    row("sample_count", static_cast<double>(r.sample_count), "samples");
    row("validity", r.validity_fraction, "fraction");
    row("fixation_count", static_cast<double>(r.fixation_count), "fixations");
    row("dropped_fixations", static_cast<double>(r.dropped_fixations), "fixations");
    if (r.accuracy) {
        row("accuracy_mean", r.accuracy->mean, "deg");
        row("accuracy_std", r.accuracy->std, "deg");
    }
    if (r.precision) {
        row("precision_rms_s2s_mean", r.precision->mean, "deg");
        row("precision_rms_s2s_std", r.precision->std, "deg");
    }
    for (auto [fit, axis] : {std::pair{&r.linearity_h, "h"}, std::pair{&r.linearity_v, "v"}}) {
        if (!*fit)
            continue;
        const std::string p = std::string("linearity_") + axis + "_";
        row(p + "slope", (*fit)->slope, "px/deg");
        row(p + "intercept", (*fit)->intercept, "px");
        row(p + "r_squared", (*fit)->r_squared, "ratio");
        row(p + "max_residual", (*fit)->max_residual, "px");
    }
    if (r.crosstalk_h_pct)
        row("crosstalk_h", *r.crosstalk_h_pct, "percent");
    if (r.crosstalk_v_pct)
        row("crosstalk_v", *r.crosstalk_v_pct, "percent");
    if (r.temporal.interval_count > 0) {
        row("mean_interval", r.temporal.mean_interval_ms, "ms");
        row("factual_rate", r.temporal.factual_rate_hz, "Hz");
        row("lag1_autocorr", r.temporal.lag1_autocorr, "ratio");
        row("interval_zero_variance", r.temporal.zero_variance ? 1.0 : 0.0, "flag");
        for (const auto& b : r.temporal.histogram)
            row("interval_share_" + csv::num(b.interval_ms), b.proportion, "fraction");
    }
    return out;
}

std::string format_fixation_csv(const QualityReport& r)
{
    std::string out = "event_index,t_start_us,t_end_us,target_x_deg,target_y_deg,samples,centroid_x_deg,"
                      "centroid_y_deg,accuracy_deg,precision_rms_s2s_deg,raw_mean_dx,raw_mean_dy\n";
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const auto& s = r.segments[i];
        const Point2d c = centroid(s);
        out += std::to_string(s.event_index) + ',' + csv::num(s.t_start_us) + ',' + csv::num(s.t_end_us) + ',' +
               csv::num(s.target_deg.x) + ',' + csv::num(s.target_deg.y) + ',' + std::to_string(s.samples.size()) +
               ',';
        if (r.accuracy)
            out += csv::num(c.x) + ',' + csv::num(c.y) + ',' + csv::num(r.accuracy->per_fixation[i]) + ',';
        else
            out += ",,,";
        if (r.precision)
            out += csv::num(r.precision->per_fixation[i]);
        out += ',' + csv::num(s.raw_mean.dx) + ',' + csv::num(s.raw_mean.dy) + '\n';
    }
    return out;
}

} // namespace vog
