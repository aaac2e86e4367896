#include "vog/synthcam.hpp"

#include "vog/csv.hpp"
#include "vog/error.hpp"
#include "vog/framestore.hpp"
#include "vog/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace vog {

void CameraModel::validate() const
{
    if (width < 64 || height < 64)
        throw Error(ErrorCode::InvalidArgument, "camera must be at least 64x64");
    if (!(nominal_rate_hz > 0.0))
        throw Error(ErrorCode::InvalidArgument, "camera rate must be positive");
    if (!(interval_a_ms > 0.0) || interval_a_ms > interval_b_ms)
        throw Error(ErrorCode::InvalidArgument, "camera intervals must satisfy 0 < a <= b");
    if (!(alternation_prob >= 0.0 && alternation_prob <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "alternation probability must lie in [0, 1]");
}

void EyeState::validate() const
{
    if (!(pupil_radius > 0.0) || !(p1_radius > 0.0) || !(p4_radius > 0.0))
        throw Error(ErrorCode::InvalidArgument, "feature radii must be positive");
    if (!(pupil_intensity < iris_intensity))
        throw Error(ErrorCode::InvalidArgument, "pupil must be darker than the iris");
    if (!(p1_intensity > 200.0 && p1_intensity <= 255.0))
        throw Error(ErrorCode::InvalidArgument, "P1 intensity must lie in (200, 255]");
    if (!(p4_intensity >= pupil_intensity && p4_intensity <= 65.0))
        throw Error(ErrorCode::InvalidArgument, "P4 intensity must lie in [pupil, 65]");
    if (!(norm(p4_offset) < pupil_radius))
        throw Error(ErrorCode::InvalidArgument, "P4 must lie inside the pupil");
}

std::string_view to_string(ConfounderKind k)
{
    switch (k) {
    case ConfounderKind::E1_nose: return "E1";
    case ConfounderKind::E2_eyelash: return "E2";
    case ConfounderKind::E3_supraorbital: return "E3";
    case ConfounderKind::E4_supraorbital: return "E4";
    }
    return "E1";
}

ConfounderKind confounder_from_string(std::string_view s)
{
    for (auto k : {ConfounderKind::E1_nose, ConfounderKind::E2_eyelash, ConfounderKind::E3_supraorbital,
                   ConfounderKind::E4_supraorbital})
        if (to_string(k) == s)
            return k;
    throw Error(ErrorCode::ParseError, "unknown confounder kind '" + std::string(s) + "'");
}

std::vector<ConfounderSpec> confounder_preset(char scenario, Point2d pc)
{
    switch (scenario) {
    case 'a':
        return {};
    case 'b':
        return {{ConfounderKind::E1_nose, pc + Point2d{-22.0, 14.0}, 4.0, 140.0}};
    case 'c':
        return {{ConfounderKind::E2_eyelash, pc + Point2d{10.0, -42.0}, 20.0, 46.0},
                {ConfounderKind::E2_eyelash, pc + Point2d{-30.0, -38.0}, 1.2, 30.0},
                {ConfounderKind::E2_eyelash, pc + Point2d{25.0, -40.0}, 1.2, 30.0}};
    case 'd':
        // E3: ~40 px at 50 (too large); E4: peak 80 (above the bright cutoff).
        return {{ConfounderKind::E3_supraorbital, pc + Point2d{-18.0, -8.0}, 3.57, 50.0},
                {ConfounderKind::E4_supraorbital, pc + Point2d{16.0, 12.0}, 2.5, 80.0}};
    default:
        throw Error(ErrorCode::InvalidArgument, std::string("unknown confounder scenario '") + scenario + "'");
    }
}

namespace {

void check_in_frame(Point2d c, double r, const CameraModel& camera, std::string_view what)
{
    if (c.x - r < 0.0 || c.y - r < 0.0 || c.x + r > camera.width - 1.0 || c.y + r > camera.height - 1.0)
        throw Error(ErrorCode::GeometryOutOfBounds, std::string(what) + " extends past the frame edge");
}

// Blends a disk into `img` with per-pixel coverage. Pixel (x, y) spans
// [x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]; edge pixels are 4x4 supersampled.
void paint_disk(std::vector<float>& img, int w, int h, Point2d c, double r, double intensity)
{
    constexpr double half_diag = 0.70710678118654752;
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x - r - 1.0)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + r + 1.0)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y - r - 1.0)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + r + 1.0)));
    const double inner = r > half_diag ? (r - half_diag) * (r - half_diag) : -1.0;
    const double outer = (r + half_diag) * (r + half_diag);
    const double r2 = r * r;
    for (int y = y0; y <= y1; ++y) {
        const double dy = y - c.y;
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - c.x;
            const double d2 = dx * dx + dy * dy;
            if (d2 >= outer)
                continue;
            double coverage = 1.0;
            if (d2 > inner) {
                int hits = 0;
                for (int j = 0; j < 4; ++j) {
                    const double sy = dy - 0.375 + 0.25 * j;
                    for (int i = 0; i < 4; ++i) {
                        const double sx = dx - 0.375 + 0.25 * i;
                        hits += sx * sx + sy * sy <= r2;
                    }
                }
                coverage = hits / 16.0;
            }
            auto& px = img[static_cast<std::size_t>(y) * w + x];
            px = static_cast<float>(coverage * intensity + (1.0 - coverage) * px);
        }
    }
}

// Standard normal quantiles at the midpoints of 65536 equal-probability
// bins. Pixel noise draws four 16-bit indices from each 64-bit random word.
const std::array<float, 65536>& normal_table()
{
    static const auto table = [] {
        std::array<float, 65536> t{};
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double p = (static_cast<double>(i) + 0.5) / 65536.0;
            t[i] = static_cast<float>(std::numbers::sqrt2 * boost::math::erf_inv(2.0 * p - 1.0));
        }
        return t;
    }();
    return table;
}

} // namespace

RenderedFrame render_frame(const EyeState& state, const std::vector<ConfounderSpec>& confounders,
                           const CameraModel& camera, double noise_sigma, std::uint64_t seed)
{
    camera.validate();
    state.validate();
    if (noise_sigma < 0.0)
        throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");

    check_in_frame(state.pupil_center, state.pupil_radius, camera, "pupil");
    check_in_frame(state.p4_center(), state.p4_radius, camera, "P4");
    if (state.p1_visible)
        check_in_frame(state.p1_center(), state.p1_radius, camera, "P1");
    for (const auto& c : confounders) {
        if (!(c.radius > 0.0) || c.intensity > 255.0 || c.intensity < 0.0)
            throw Error(ErrorCode::InvalidArgument, "confounder radius must be positive and intensity <= 255");
        check_in_frame(c.center, c.radius, camera, to_string(c.kind));
    }

    const int w = camera.width;
    const int h = camera.height;
    std::vector<float> img(static_cast<std::size_t>(w) * h, static_cast<float>(state.iris_intensity));
    paint_disk(img, w, h, state.pupil_center, state.pupil_radius, state.pupil_intensity);
    paint_disk(img, w, h, state.p4_center(), state.p4_radius, state.p4_intensity);
    for (const auto& c : confounders)
        paint_disk(img, w, h, c.center, c.radius, c.intensity);
    if (state.p1_visible)
        paint_disk(img, w, h, state.p1_center(), state.p1_radius, state.p1_intensity);

    RenderedFrame out;
    out.frame = Frame(w, h);
    auto& px = out.frame.pixels;
    if (noise_sigma > 0.0) {
        const auto& table = normal_table();
        const auto sigma = static_cast<float>(noise_sigma);
        Xorshift64Star rng(seed);
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < img.size(); ++i) {
            if ((i & 3) == 0)
                bits = rng.next();
            const float v = img[i] + sigma * table[bits & 0xFFFF];
            bits >>= 16;
            px[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    } else {
        for (std::size_t i = 0; i < img.size(); ++i)
            px[i] = static_cast<std::uint8_t>(std::clamp(std::lround(img[i]), 0L, 255L));
    }

    out.truth.pupil_center = state.pupil_center;
    out.truth.p1_center = state.p1_center();
    out.truth.p4_center = state.p4_center();
    for (const auto& c : confounders)
        out.truth.confounders.push_back(c.kind);
    return out;
}

double saccade_profile(double amplitude, double t_ms, const SaccadeTiming& timing)
{
    if (amplitude < 0.0 || t_ms < 0.0)
        throw Error(ErrorCode::InvalidArgument, "saccade amplitude and time must be non-negative");
    const double d = timing.duration_ms(amplitude);
    if (amplitude == 0.0)
        return 0.0;
    if (t_ms >= d)
        return amplitude;
    return amplitude * (1.0 - std::cos(std::numbers::pi * t_ms / d)) / 2.0;
}

double wobble(double amplitude_deg, double frequency_hz, double decay_ms, double t_ms)
{
    if (amplitude_deg == 0.0 || t_ms < 0.0)
        return 0.0;
    const double omega = 2.0 * std::numbers::pi * frequency_hz / 1000.0; // rad per ms
    const double t_peak = std::atan(omega * decay_ms) / omega;
    const double peak = std::exp(-t_peak / decay_ms) * std::sin(omega * t_peak);
    return amplitude_deg * std::exp(-t_ms / decay_ms) * std::sin(omega * t_ms) / peak;
}

void MotionModel::validate() const
{
    if (!(gain_px_per_deg.x > 0.0) || !(gain_px_per_deg.y > 0.0))
        throw Error(ErrorCode::InvalidArgument, "gain must be positive");
    if (wobble_amplitude < 0.0)
        throw Error(ErrorCode::InvalidArgument, "wobble amplitude must be non-negative");
    if (!(wobble_decay > 0.0))
        throw Error(ErrorCode::InvalidArgument, "wobble decay must be positive");
    if (noise_sigma < 0.0)
        throw Error(ErrorCode::InvalidArgument, "noise sigma must be non-negative");
}

std::vector<double> simulate_timestamps(const CameraModel& camera, std::int64_t count, std::uint64_t seed)
{
    camera.validate();
    const std::int64_t a = std::llround(camera.interval_a_ms * 1e6);
    const std::int64_t b = std::llround(camera.interval_b_ms * 1e6);
    Xorshift64Star rng(splitmix64(seed ^ 0x7469'6d65'7374'616dull));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
    std::int64_t t_ns = 0;
    std::int64_t current = a;
    for (std::int64_t i = 0; i < count; ++i) {
        if (i > 0) {
            t_ns += current;
            if (rng.uniform() < camera.alternation_prob)
                current = current == a ? b : a;
        }
        out.push_back(static_cast<double>(t_ns) / 1000.0);
    }
    return out;
}

SessionSimulator::SessionSimulator(ResolvedSchedule schedule, MotionModel motion, EyeState eye, CameraModel camera,
                                   std::uint64_t seed)
    : schedule_(std::move(schedule)), motion_(std::move(motion)), eye_(eye), camera_(camera), seed_(seed)
{
    camera_.validate();
    eye_.validate();
    motion_.validate();
    if (schedule_.events.empty())
        throw Error(ErrorCode::InvalidArgument, "schedule is empty");

    const auto count = static_cast<std::int64_t>(
        std::floor(static_cast<double>(schedule_.duration_us()) * camera_.nominal_rate_hz / 1e6));
    timestamps_us_ = simulate_timestamps(camera_, count, seed_);
    for (auto& t : timestamps_us_)
        t += static_cast<double>(schedule_.start_us());

    Point2d pos = schedule_.events.front().target;
    for (const auto& e : schedule_.events) {
        const auto t0 = static_cast<double>(e.t_start_us);
        if (e.kind == EventKind::Pursuit) {
            const Point2d from = kinematics(t0).eye_deg;
            movements_.push_back({t0, from, e.target, true, (e.t_end_us - e.t_start_us) / 1000.0});
        } else if (!(e.target == pos)) {
            const Point2d from = kinematics(t0).eye_deg;
            movements_.push_back({t0, from, e.target, false, motion_.saccade.duration_ms(distance(from, e.target))});
        }
        pos = e.target;
    }
}

EyeKinematics SessionSimulator::kinematics(double t_us) const
{
    EyeKinematics k;
    k.eye_deg = schedule_.events.front().target;

    auto ev = std::upper_bound(schedule_.events.begin(), schedule_.events.end(), t_us,
                               [](double t, const ResolvedEvent& e) { return t < static_cast<double>(e.t_start_us); });
    k.target_deg = ev == schedule_.events.begin() ? schedule_.events.front().target : std::prev(ev)->target;

    auto mv = std::upper_bound(movements_.begin(), movements_.end(), t_us,
                               [](double t, const Movement& m) { return t < m.t0_us; });
    if (mv == movements_.begin())
        return k;
    const Movement& m = *std::prev(mv);
    const double dt_ms = (t_us - m.t0_us) / 1000.0;
    const Point2d delta = m.to - m.from;
    const double amp = norm(delta);
    if (m.pursuit) {
        const double frac = m.duration_ms > 0.0 ? std::clamp(dt_ms / m.duration_ms, 0.0, 1.0) : 1.0;
        k.eye_deg = m.from + frac * delta;
        if (frac < 1.0)
            k.target_deg = k.eye_deg;
        return k;
    }
    if (amp == 0.0) {
        k.eye_deg = m.to;
        return k;
    }
    k.eye_deg = m.from + (saccade_profile(amp, dt_ms, motion_.saccade) / amp) * delta;
    if (dt_ms >= m.duration_ms) {
        const double w = wobble(motion_.wobble_amplitude, motion_.wobble_frequency, motion_.wobble_decay,
                                dt_ms - m.duration_ms);
        k.wobble_deg = (w / amp) * delta;
    }
    return k;
}

EyeState SessionSimulator::eye_state(const EyeKinematics& k) const
{
    const Point2d th{k.eye_deg.x + motion_.coupling_v_to_h * k.eye_deg.y,
                     k.eye_deg.y + motion_.coupling_h_to_v * k.eye_deg.x};
    const Point2d g = motion_.gain_px_per_deg;
    const Point2d shift{g.x * th.x, g.y * th.y};
    const Point2d wob{g.x * k.wobble_deg.x, g.y * k.wobble_deg.y};
    const double a = motion_.p1_relative_gain;
    const double b = motion_.p4_relative_gain;

    EyeState s = eye_;
    s.pupil_center = eye_.pupil_center + shift;
    s.p1_offset = eye_.p1_offset - a * shift;
    s.p4_offset = eye_.p4_offset + b * shift + (a + b) * wob;
    return s;
}

RenderedFrame SessionSimulator::render(std::int64_t index) const
{
    if (index < 0 || index >= frame_count())
        throw Error(ErrorCode::InvalidArgument, "frame index out of range");
    const double t = timestamps_us_[static_cast<std::size_t>(index)];
    const auto k = kinematics(t);
    auto out = render_frame(eye_state(k), motion_.confounders, camera_, motion_.noise_sigma,
                            splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));
    out.frame.index = index;
    out.frame.timestamp_us = t;
    out.truth.frame_index = index;
    out.truth.timestamp_us = t;
    out.truth.target_deg = k.target_deg;
    return out;
}

std::string truth_csv_header()
{
    return "frame_index,timestamp_us,pupil_x,pupil_y,p1_x,p1_y,p4_x,p4_y,target_x_deg,target_y_deg,confounders\n";
}

std::string truth_csv_row(const GroundTruthRecord& r)
{
    std::string kinds;
    for (std::size_t i = 0; i < r.confounders.size(); ++i) {
        if (i)
            kinds += ';';
        kinds += to_string(r.confounders[i]);
    }
    std::string row = std::to_string(r.frame_index);
    for (double v : {r.timestamp_us, r.pupil_center.x, r.pupil_center.y, r.p1_center.x, r.p1_center.y,
                     r.p4_center.x, r.p4_center.y, r.target_deg.x, r.target_deg.y})
        row += ',' + csv::num(v);
    row += ',' + kinds + '\n';
    return row;
}

std::vector<GroundTruthRecord> simulate_session(const SessionSimulator& sim, FrameSink& sink)
{
    std::vector<GroundTruthRecord> truth;
    truth.reserve(static_cast<std::size_t>(sim.frame_count()));
    for (std::int64_t i = 0; i < sim.frame_count(); ++i) {
        auto r = sim.render(i);
        sink.write(r.frame);
        truth.push_back(std::move(r.truth));
    }
    return truth;
}

void write_session(const SessionSimulator& sim, const std::filesystem::path& dir, std::uint64_t segment_limit_bytes)
{
    FrameStoreWriter writer(dir, {segment_limit_bytes});
    const auto truth = simulate_session(sim, writer);
    writer.close();
    std::string text = truth_csv_header();
    for (const auto& r : truth)
        text += truth_csv_row(r);
    csv::write_file(dir / "truth.csv", text);
}

} // namespace vog
